#include "properties.hpp"

#include "wlsc/qc_check.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wlsc;
using namespace wlsc::testing;

namespace {

QcOptions fast() {
  QcOptions o;
  o.h = 0.25;
  o.solver.restarts = 4;
  o.solver.max_iter = 150;
  return o;
}

// Independent recomputation of int_B g(xi + grad phi) - g(xi) from the witness,
// one-point rule per cell (exact for x-free g and P1 phi).
double witness_deficit(const Integrand& g, const Matrix& xi, const TestField& w) {
  const Mesh& m = w.mesh();
  double s = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const Point x = m.centroid(c);
    s += m.cell_measure(c) * (g(x, xi + w.cell_gradient(c)) - g(x, xi));
  }
  return s;
}

}  // namespace

TEST(QcCheck, NegativeNormIsViolatedAtZeroWithACheckableWitness) {
  const Integrand g = catalog::negnorm(1, 2);
  const Matrix xi = Matrix::Zero(1, 2);
  const QcReport r = qc_deficit(g, xi, fast());
  EXPECT_EQ(r.verdict, CheckVerdict::Violated);
  EXPECT_LT(r.deficit, -0.5);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_NEAR(witness_deficit(g, xi, *r.witness), r.deficit, 1e-12);
  // The witness respects the largest cap and the zero trace.
  EXPECT_LE(r.witness->max_cell_gradient(), r.table.back().L * (1 + 1e-12));
  for (std::size_t v = 0; v < r.witness->clamped().size(); ++v)
    if (r.witness->clamped()[v]) {
      EXPECT_EQ(r.witness->values.col(Eigen::Index(v)).norm(), 0.0);
    }
}

TEST(QcCheck, TableIsNonIncreasingInTheCap) {
  const QcReport r = qc_deficit(catalog::negnorm(1, 2), Matrix::Zero(1, 2), fast());
  ASSERT_EQ(r.table.size(), 3u);
  for (std::size_t i = 1; i < r.table.size(); ++i) EXPECT_LE(r.table[i].deficit, r.table[i - 1].deficit);
  EXPECT_EQ(r.deficit, r.table.back().deficit);
  // -|xi| is 1-homogeneous: the deficit is bounded by -L in the continuum.
  for (const auto& row : r.table) EXPECT_GE(row.deficit, -row.L * (1 + 1e-12));
}

TEST(QcCheck, ConvexIntegrandsAreNotViolated) {
  for_all(3, 41, [](Gen& g) {
    const Matrix xi = g.matrix(1, 2, 2.0);
    for (const Integrand& f : {catalog::norm(1, 2), catalog::area(1, 2)}) {
      const QcReport r = qc_deficit(f, xi, fast());
      EXPECT_GE(r.deficit, -1e-6) << f.tag();
      EXPECT_LE(r.deficit, 0.0) << f.tag();  // phi = 0 is admissible
      EXPECT_EQ(r.verdict, CheckVerdict::Plausible) << f.tag();
    }
  });
}

TEST(QcCheck, LinearIntegrandsHaveZeroDeficit) {
  for_all(3, 42, [](Gen& g) {
    const Matrix a = g.matrix(2, 2);
    const QcReport r = qc_deficit(catalog::linear(a), g.matrix(2, 2), fast());
    EXPECT_LE(std::abs(r.deficit), 1e-8);
  });
}

TEST(QcCheck, OneDimensionalCellIsSupported) {
  QcOptions o = fast();
  const QcReport r = qc_deficit(catalog::negnorm(1, 1), Matrix::Zero(1, 1), unit_cube_mesh(1, 0.125), o);
  EXPECT_EQ(r.verdict, CheckVerdict::Violated);
  EXPECT_LT(r.deficit, -0.5);
}

TEST(QcCheck, RejectsMisuse) {
  const Integrand xdep = catalog::modulated(catalog::norm(1, 2), [](const Point& x) { return 1 + x.x(); }, 2.0);
  EXPECT_THROW(qc_deficit(xdep, Matrix::Zero(1, 2), fast()), Error);
  EXPECT_THROW(qc_deficit(catalog::norm(1, 2), Matrix::Zero(2, 2), fast()), Error);
  QcOptions o = fast();
  o.L_grid = {};
  EXPECT_THROW(qc_deficit(catalog::norm(1, 2), Matrix::Zero(1, 2), o), Error);
  o.L_grid = {1.0, -1.0};
  EXPECT_THROW(qc_deficit(catalog::norm(1, 2), Matrix::Zero(1, 2), o), Error);
  // Freezing removes the x dependence.
  const Integrand frozen = xdep.frozen(Point(0.5, 0.5));
  EXPECT_FALSE(frozen.x_dependent());
  EXPECT_NO_THROW(qc_deficit(frozen, Matrix::Zero(1, 2), fast()));
}
