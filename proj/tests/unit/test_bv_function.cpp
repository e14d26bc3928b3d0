#include "properties.hpp"

#include "wlsc/bv_function.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wlsc;
using namespace wlsc::testing;

namespace {

// Brute-force L1 distance by midpoint sampling on a fine grid.
double sampled_l1(const BVFunction& u, const BVFunction& v, int samples = 200000) {
  double s = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Point p((i + 0.5) / samples, 0.0);
    s += (u.value(p) - v.value(p)).norm();
  }
  return s / samples;
}

BVFunction chi(const MeshPtr& mesh, double a, double b) {
  std::vector<BVFunction::CellValues> cells(mesh->num_cells(), {scalar(0), scalar(0), scalar(0)});
  std::vector<Atom> atoms{{a, scalar(1.0)}, {b, scalar(-1.0)}};
  return BVFunction(mesh, 1, cells, atoms);
}

}  // namespace

TEST(BVFunction, ContinuousP1HasNoSingularPart) {
  const MeshPtr m = square_mesh(0.2);
  Matrix A(1, 2);
  A << 0.3, -1.2;
  const BVFunction u =
      BVFunction::interpolate(m, 1, [&](const Point& x) { return scalar(0.5 + (A * x)(0)); });
  const MatrixMeasure du = derivative(u);
  EXPECT_TRUE(du.singular.empty());
  for (const auto& d : du.density) EXPECT_NEAR((d - A).norm(), 0.0, 1e-12);
  EXPECT_NEAR(total_variation(du), A.norm(), 1e-12);
}

TEST(BVFunction, AtomsBecomeChargesWithTheirJumps) {
  const MeshPtr m = interval_mesh(0, 1, 0.125);
  const BVFunction u = chi(m, 0.3, 0.7);
  const MatrixMeasure du = derivative(u);
  ASSERT_EQ(du.singular.size(), 2u);
  EXPECT_NEAR(du.singular_mass(), 2.0, 1e-15);
  EXPECT_NEAR(du.absolutely_continuous_mass(), 0.0, 1e-15);
  EXPECT_NEAR(u.value(Point(0.5, 0))(0), 1.0, 1e-15);
  EXPECT_NEAR(u.value(Point(0.8, 0))(0), 0.0, 1e-15);
  // Right limits at the discontinuity.
  EXPECT_NEAR(u.value(Point(0.3, 0))(0), 1.0, 1e-15);
}

TEST(BVFunction, FacetJumpsIn2DCarryLengthTimesJump) {
  const MeshPtr m = square_mesh(0.5);
  std::vector<BVFunction::CellValues> cells(m->num_cells());
  // Cellwise constants 0 left of x = 1/2 and 1 right of it.
  for (std::size_t c = 0; c < m->num_cells(); ++c) {
    const double v = m->centroid(c).x() > 0.5 ? 1.0 : 0.0;
    cells[c] = {scalar(v), scalar(v), scalar(v)};
  }
  const BVFunction u(m, 1, cells);
  const MatrixMeasure du = derivative(u);
  // Only the vertical line x = 1/2 carries jumps (total length 1); diagonals
  // inside each half carry none.
  EXPECT_NEAR(du.singular_mass(), 1.0, 1e-12);
  for (const auto& q : du.singular) EXPECT_NEAR(q.location.x(), 0.5, 1e-12);
}

TEST(BVFunction, DerivativeIsLinear) {
  const MeshPtr m = interval_mesh(0, 1, 0.1);
  for_all(20, 2, [&](Gen& g) {
    const BVFunction u = g.bv_1d(m, 1, 3), v = g.bv_1d(m, 1, 2);
    const double a = g.uniform(-2, 2);
    const MatrixMeasure lhs = derivative(u + v.scaled(a));
    const MatrixMeasure rhs = derivative(u) + derivative(v).scaled(a);
    EXPECT_NEAR(total_variation(lhs - rhs), 0.0, 1e-12);
  });
}

TEST(BVFunction, TotalVariationMatchesHandSum) {
  const MeshPtr m = interval_mesh(0, 1, 0.1);
  for_all(20, 3, [&](Gen& g) {
    const BVFunction u = g.bv_1d(m, 1, 3);
    double expected = 0.0;
    for (std::size_t c = 0; c < m->num_cells(); ++c)
      expected += std::abs(u.cell_value(c, 1)(0) - u.cell_value(c, 0)(0));
    for (const auto& a : u.atoms()) expected += std::abs(a.jump(0));
    for (std::size_t c = 0; c + 1 < m->num_cells(); ++c)
      expected += std::abs(u.cell_value(c + 1, 0)(0) - u.cell_value(c, 1)(0));
    EXPECT_NEAR(total_variation(derivative(u)), expected, 1e-10);
  });
}

TEST(BVFunction, L1DistanceMatchesSampling) {
  const MeshPtr m = interval_mesh(0, 1, 0.1);
  for_all(5, 4, [&](Gen& g) {
    const BVFunction u = g.bv_1d(m, 1, 3), v = g.bv_1d(m, 1, 1);
    EXPECT_NEAR(l1_distance(u, v), sampled_l1(u, v), 1e-4);
    EXPECT_NEAR(l1_distance(u, v), l1_distance(v, u), 1e-14);
  });
}

TEST(BVFunction, L1DistanceAcrossMeshesOfOneInterval) {
  const MeshPtr coarse = interval_mesh(0, 1, 0.25), fine = interval_mesh(0, 1, 0.0625);
  const BVFunction u = chi(coarse, 0.2, 0.6), v = chi(fine, 0.3, 0.6);
  EXPECT_NEAR(l1_distance(u, v), 0.1, 1e-14);
}

TEST(BVFunction, CutoffMultiplyEdgeCasesAndReassembly) {
  const MeshPtr m = interval_mesh(0, 1, 0.1);
  for_all(20, 5, [&](Gen& g) {
    const BVFunction u = g.bv_1d(m, 1, 3);
    const std::vector<double> one(m->num_vertices(), 1.0), zero(m->num_vertices(), 0.0);
    EXPECT_NEAR(l1_distance(cutoff_multiply(u, one), u), 0.0, 1e-13);
    EXPECT_NEAR(l1_distance(cutoff_multiply(u, zero), BVFunction::zero(m, 1)), 0.0, 1e-13);
    std::vector<double> phi(m->num_vertices()), rest(m->num_vertices());
    for (std::size_t v = 0; v < phi.size(); ++v) {
      phi[v] = g.uniform();
      rest[v] = 1.0 - phi[v];
    }
    const BVFunction sum = cutoff_multiply(u, phi) + cutoff_multiply(u, rest);
    EXPECT_NEAR(l1_distance(sum, u), 0.0, 1e-12);
  });
}

TEST(BVFunction, CutoffMultiplySatisfiesTheLeibnizBound) {
  // |D(phi u)|(Omega) <= |Du|(Omega) + int |u| |grad phi| for phi in [0, 1], up to
  // the P1 representation error of the product (vanishing for cellwise-constant u).
  const MeshPtr m = interval_mesh(0, 1, 0.05);
  for_all(20, 6, [&](Gen& g) {
    std::vector<BVFunction::CellValues> cells(m->num_cells());
    for (auto& c : cells) {
      const Vector v = g.vector(1);
      c = {v, v, Vector::Zero(1)};
    }
    const BVFunction u(m, 1, cells);
    std::vector<double> phi(m->num_vertices());
    for (auto& p : phi) p = g.uniform();
    double coupling = 0.0;
    for (std::size_t c = 0; c < m->num_cells(); ++c) {
      const auto cv = m->cell(c);
      const double grad = std::abs(phi[std::size_t(cv[1])] - phi[std::size_t(cv[0])]) / m->cell_measure(c);
      coupling += grad * std::abs(u.cell_value(c, 0)(0)) * m->cell_measure(c);
    }
    EXPECT_LE(total_variation(derivative(cutoff_multiply(u, phi))),
              total_variation(derivative(u)) + coupling + 1e-12);
  });
}

TEST(BVFunction, CutoffRejectsValuesOutsideTheUnitInterval) {
  const MeshPtr m = interval_mesh(0, 1, 0.5);
  const BVFunction u = BVFunction::zero(m, 1);
  EXPECT_THROW(cutoff_multiply(u, {0.0, 1.5, 0.0}), Error);
  EXPECT_THROW(cutoff_multiply(u, {0.0, 1.0}), Error);
}

TEST(BVFunction, DoesNotChargeDistinguishesConcentrationPoints) {
  const MeshPtr m = interval_mesh(0, 1, 1.0 / 128);
  std::vector<MatrixMeasure> seq;
  for (int n = 2; n <= 64; n *= 2) seq.push_back(derivative(chi(m, 0.0 + 1e-9, 1.0 / n)));
  const std::vector<double> deltas{0.25, 0.125, 0.0625, 0.03125};
  // Mass concentrates at 0: every neighborhood of 0 keeps unit mass.
  const ChargeReport at0 = does_not_charge(seq, CompactSet::point(Point(0, 0)), deltas);
  EXPECT_FALSE(at0.tight);
  for (double s : at0.sup_mass) EXPECT_GE(s, 1.0);
  // Nothing approaches 3/4.
  const ChargeReport away = does_not_charge(seq, CompactSet::point(Point(0.75, 0)), deltas);
  EXPECT_TRUE(away.tight);
  EXPECT_EQ(away.sup_mass.back(), 0.0);
}

TEST(BVFunction, WeakStarDiagnosticsOnMigratingJumps) {
  const MeshPtr m = interval_mesh(0, 1, 1.0 / 128);
  std::vector<BVFunction> seq;
  for (int n = 2; n <= 64; n *= 2) seq.push_back(chi(m, 1.0 / (2 * n), 1.0 / n));
  const WeakStarReport r = weakstar_diagnostics(seq, BVFunction::zero(m, 1));
  EXPECT_TRUE(r.l1_converging);
  EXPECT_TRUE(r.tv_bounded);
  EXPECT_TRUE(r.plausible);
  EXPECT_NEAR(r.sup_tv, 2.0, 1e-14);
  EXPECT_NEAR(r.l1.back(), 1.0 / 128, 1e-14);
}
