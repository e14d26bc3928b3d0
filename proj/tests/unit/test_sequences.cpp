#include "properties.hpp"

#include "wlsc/sequences.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace wlsc;
using namespace wlsc::testing;

namespace {

SequenceSpec jump_spec(double a, double b) {
  SequenceSpec s;
  s.kind = SequenceKind::JumpMigration;
  s.domain = Domain::interval(a, b);
  s.h = 0.125;
  return s;
}

double l1_norm(const BVFunction& u) { return l1_distance(u, BVFunction::zero(u.mesh_ptr(), u.components())); }

// Max of the skew profile on (0, 1): phi' = 1/2 - 2y - 3y^2/2 vanishes at y*.
double skew_peak() {
  const double y = (-2.0 + std::sqrt(7.0)) / 3.0;
  return (1 - y * y) * (1 + 0.5 * y);
}

}  // namespace

TEST(Profiles, GradientsMatchFiniteDifferencesInsideTheBall) {
  for (const char* name : {"hat", "bump", "skew"}) {
    for (int dim : {1, 2}) {
      const Profile p = profiles::get(name, dim);
      for_all(20, 61, [&](Gen& g) {
        Point y = dim == 1 ? Point(g.uniform(-0.95, 0.95), 0) : g.direction() * g.uniform(0.05, 0.95);
        if (dim == 1 && std::abs(y.x()) < 0.05) y.x() = 0.5;
        const Matrix grad = p.gradient(y);
        for (int j = 0; j < dim; ++j) {
          Point e = Point::Zero();
          e[j] = 1e-6;
          const double fd = (p.value(y + e)(0) - p.value(y - e)(0)) / 2e-6;
          EXPECT_NEAR(grad(0, j), fd, 1e-6) << name;
        }
      });
      EXPECT_EQ(p.value(Point(1.2, 0))(0), 0.0);
    }
  }
  EXPECT_THROW(profiles::get("nope", 1), Error);
}

TEST(JumpMigration, LinearEnergyIsMinusOneOnTheUnitInterval) {
  const Integrand f = catalog::linear(mat11(1.0));
  const SequenceSpec s = jump_spec(0, 1);
  for (int n = 2; n <= 64; n *= 2) {
    const BVFunction u = generate(s, n);
    EXPECT_NEAR(eval_F(f, recession_of(f), u).total, -1.0, 1e-12);
    EXPECT_NEAR(l1_norm(u), 1.0 / n, 1e-14);
    EXPECT_NEAR(total_variation(derivative(u)), 1.0, 1e-14);
  }
  // n = 1: chi_(0,1) is the constant 1.
  EXPECT_NEAR(eval_F(f, recession_of(f), generate(s, 1)).total, 0.0, 1e-14);
}

TEST(JumpMigration, LinearEnergyVanishesOnTheExtendedInterval) {
  const Integrand f = catalog::linear(mat11(1.0));
  const SequenceSpec s = jump_spec(-1, 1);
  for (int n = 2; n <= 64; n *= 2) {
    const BVFunction u = generate(s, n);
    EXPECT_NEAR(eval_F(f, recession_of(f), u).total, 0.0, 1e-12);
    EXPECT_NEAR(total_variation(derivative(u)), 2.0, 1e-14);
  }
  // n = 1: chi_(0,1) keeps only the up-jump at 0.
  EXPECT_NEAR(eval_F(f, recession_of(f), generate(s, 1)).total, 1.0, 1e-12);
  EXPECT_THROW(generate(jump_spec(0.5, 1), 2), Error);
  EXPECT_THROW(generate(s, 65), Error);
}

TEST(IndexGrid, PowersOfTwoPlusTheLastIndex) {
  EXPECT_EQ(index_grid(1, 64), (std::vector<int>{1, 2, 4, 8, 16, 32, 64}));
  EXPECT_EQ(index_grid(3, 20), (std::vector<int>{3, 6, 12, 20}));
  EXPECT_EQ(index_grid(5, 5), (std::vector<int>{5}));
  EXPECT_THROW(index_grid(0, 4), Error);
  EXPECT_THROW(index_grid(8, 4), Error);
}

TEST(Liminf, ViolatedOnTheUnitIntervalAndNotOnTheExtendedOne) {
  const Integrand f = catalog::linear(mat11(1.0));
  const LiminfReport bad = empirical_liminf(f, recession_of(f), jump_spec(0, 1), index_grid(1, 64));
  EXPECT_TRUE(bad.violated);
  EXPECT_EQ(bad.limit_energy, 0.0);
  EXPECT_NEAR(bad.tail_max, -1.0, 1e-12);
  for (std::size_t i = 0; i + 1 < bad.rows.size(); ++i) {
    EXPECT_LE(bad.rows[i].running_min, bad.rows[i].energy);
    EXPECT_LE(bad.rows[i].running_min, bad.rows[i + 1].running_min);
  }
  const LiminfReport ok = empirical_liminf(f, recession_of(f), jump_spec(-1, 1), index_grid(1, 64));
  EXPECT_FALSE(ok.violated);
  EXPECT_NEAR(ok.tail_min, 0.0, 1e-12);
}

TEST(BoundaryRescale, MembersAreSupportedNearX0WithBoundedVariation) {
  SequenceSpec s;
  s.kind = SequenceKind::BoundaryRescale;
  s.domain = Domain::unit_square();
  s.profile = profiles::hat(2);
  s.x0 = {Point(0.5, 0.0), Point(0, -1)};
  s.resolution = 4;
  s.n_max = 16;
  for (int n : {2, 8, 16}) {
    const BVFunction u = generate(s, n);
    for (std::size_t v = 0; v < u.mesh().num_vertices(); ++v) {
      const Point p = u.mesh().vertex(int(v));
      if ((p - s.x0.x0).norm() > 1.0 / n + 1e-12) {
        EXPECT_EQ(u.value(p)(0), 0.0);
      }
    }
    // k^{N-1} scaling keeps the total variation at the half-disk value pi/2.
    EXPECT_NEAR(total_variation(derivative(u)), std::numbers::pi / 2, 0.1);
    EXPECT_LT(l1_norm(u), 1.0 / n);
  }
}

TEST(PureBoundaryConcentration, UnitVariationInAShrinkingLayer) {
  SequenceSpec s;
  s.kind = SequenceKind::PureBoundaryConcentration;
  s.domain = Domain::interval(0, 1);
  s.resolution = 4;
  for (int n : {2, 8, 32}) {
    const BVFunction u = generate(s, n);
    EXPECT_NEAR(total_variation(derivative(u)), 1.0, 1e-12);
    EXPECT_EQ(u.value(Point(0.5, 0))(0), 0.0);
    EXPECT_LE(l1_norm(u), 1.0 / n);
  }
}

TEST(FixedTraceOscillation, ZeroTraceAndVanishingL1Norm) {
  SequenceSpec s;
  s.kind = SequenceKind::FixedTraceOscillation;
  s.domain = Domain::unit_square();
  s.resolution = 4;
  s.n_max = 16;
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {2, 4, 8, 16}) {
    const BVFunction u = generate(s, n);
    const auto boundary = u.mesh().boundary_vertex_mask();
    for (std::size_t v = 0; v < boundary.size(); ++v)
      if (boundary[v]) {
        EXPECT_EQ(u.value(u.mesh().vertex(int(v)))(0), 0.0);
      }
    const double l1 = l1_norm(u);
    EXPECT_LT(l1, prev);
    prev = l1;
    EXPECT_LT(total_variation(derivative(u)), 2.0);
  }
  s.amplitude = Vector::Ones(2);
  EXPECT_THROW(generate(s, 2), Error);
}

TEST(HalfBallProfileIntegral, MatchesClosedForms) {
  const Integrand nrm1 = catalog::norm(1, 1), nrm2 = catalog::norm(1, 2);
  // int_0^1 |phi'| = phi(0) for monotone profiles, 2 max - phi(0) otherwise.
  EXPECT_NEAR(halfball_profile_integral(nrm1, profiles::hat(1), 1, Point(-1, 0)), 1.0, 1e-10);
  EXPECT_NEAR(halfball_profile_integral(nrm1, profiles::bump(1), 1, Point(1, 0)), 1.0, 1e-10);
  EXPECT_NEAR(halfball_profile_integral(nrm1, profiles::skew(1), 1, Point(-1, 0)), 2 * skew_peak() - 1, 1e-6);
  // |grad (1 - |y|)| = 1 on the half disk.
  EXPECT_NEAR(halfball_profile_integral(nrm2, profiles::hat(2), 2, Point(0, 1)), std::numbers::pi / 2, 1e-2);
}

TEST(LimitEnergy, RescaledProfilesReachTheHalfBallIntegral) {
  const Integrand nrm = catalog::norm(1, 1);
  for (const Profile& p : {profiles::hat(1), profiles::skew(1)}) {
    const LimitEnergyReport r = limit_energy_check(nrm, recession_of(nrm), p, Domain::interval(0, 1),
                                                   {Point(0, 0), Point(-1, 0)}, {4, 16, 64});
    EXPECT_LE(r.relative_gap, 0.02) << p.name;
    EXPECT_EQ(r.rows.size(), 3u);
  }
  const Integrand xdep = catalog::modulated(nrm, [](const Point& x) { return 1 + x.x(); }, 2.0);
  EXPECT_THROW(limit_energy_check(xdep, recession_of(xdep), profiles::hat(1), Domain::interval(0, 1),
                                  {Point(0, 0), Point(-1, 0)}, {4}),
               Error);
  EXPECT_THROW(limit_energy_check(nrm, recession_of(nrm), profiles::hat(2), Domain::unit_square(),
                                  {Point(0, 0), Point(-1, 0)}, {4}),
               Error);
}

TEST(Necessity, HalfBallWitnessTransfersToTheDomain) {
  const Integrand f = catalog::linear(mat11(1.0));
  QslbOptions o;
  o.h = 0.05;
  o.solver.restarts = 2;
  o.solver.max_iter = 50;
  const QslbReport q = halfball_deficit(recession_of(f), 1, 1, {Point(0, 0), Point(-1, 0)}, o);
  ASSERT_EQ(q.verdict, CheckVerdict::Violated);
  const NecessityCertificate c = necessity_witness(f, recession_of(f), Domain::interval(0, 1), q, -q.deficit,
                                                   {2, 4, 8, 16, 32, 64});
  EXPECT_TRUE(c.certified);
  EXPECT_LE(c.liminf, c.bound);
  for (const auto& row : c.rows) EXPECT_NEAR(row.w11_norm, 1.0, 1e-12);
  EXPECT_THROW(necessity_witness(f, recession_of(f), Domain::interval(0, 1), q, 2.0, {2}), Error);
  QslbReport fine = q;
  fine.verdict = CheckVerdict::Plausible;
  EXPECT_THROW(necessity_witness(f, recession_of(f), Domain::interval(0, 1), fine, 0.5, {2}), Error);
}
