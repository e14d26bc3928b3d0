#include "wlsc/qc_check.hpp"

#include <algorithm>
#include <cmath>

namespace wlsc {

std::string to_string(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::Plausible: return "plausible";
    case CheckVerdict::Violated: return "violated";
    case CheckVerdict::Unsupported: return "unsupported";
  }
  return "unknown";
}

MeshPtr unit_square_mesh(double h) { return std::make_shared<const Mesh>(build_mesh(Domain::unit_square(), h)); }

MeshPtr unit_cube_mesh(int dim, double h) {
  if (dim == 1) return std::make_shared<const Mesh>(build_mesh(Domain::interval(0.0, 1.0), h));
  return unit_square_mesh(h);
}

std::vector<bool> boundary_clamping(const Mesh& mesh) { return mesh.boundary_vertex_mask(); }

QcReport qc_deficit(const Integrand& g, const Matrix& xi, const MeshPtr& square, const QcOptions& options) {
  if (g.x_dependent()) throw Error("qc_deficit needs an x-free integrand; freeze it at a point first");
  if (xi.rows() != g.rows() || xi.cols() != g.cols()) throw Error("qc_deficit: xi has the wrong shape");
  if (square->dim() != g.cols()) throw Error("qc_deficit: mesh dimension does not match the integrand");
  if (options.L_grid.empty()) throw Error("qc_deficit needs a non-empty L grid");

  const double measure = square->total_measure();
  const Point origin = Point::Zero();
  const double g0 = g(origin, xi);
  Integrand shifted(g.tag() + "_at_xi", g.rows(), g.cols(), g.growth(),
                    [g, xi, g0](const Point& x, const Matrix& eta) { return g(x, xi + eta) - g0; },
                    [g, xi](const Point& x, const Matrix& eta, double s) { return g.gradient(x, xi + eta, s); });
  const FieldObjective obj = integral_objective(shifted);
  const auto clamped = boundary_clamping(*square);

  QcReport rep;
  rep.xi = xi;
  rep.tol = options.tol_factor * measure * (1.0 + xi.norm());
  rep.deficit = 0.0;
  std::vector<double> grid = options.L_grid;
  std::sort(grid.begin(), grid.end());
  std::optional<TestField> carry;
  TestField best(square, g.rows(), clamped);
  for (double L : grid) {
    if (!(L > 0)) throw Error("gradient caps must be positive");
    SolverOptions so = options.solver;
    so.constraint = ConstraintMode::GradientCap;
    so.cap = L;
    if (carry) so.warm_starts.push_back(*carry);
    const SolveResult r = minimize_field(obj, square, clamped, g.rows(), so);
    double value = r.value;
    TestField witness = r.witness;
    // Carry the smaller-cap witness forward when it is still better.
    if (carry) {
      const double vc = obj.value(*carry);
      if (vc < value) {
        value = vc;
        witness = *carry;
      }
    }
    rep.table.push_back({L, value, r.low_confidence, r.iterations});
    rep.low_confidence = rep.low_confidence || r.low_confidence;
    carry = witness;
    if (value < rep.deficit || rep.table.size() == 1) {
      rep.deficit = value;
      best = witness;
    }
  }
  if (rep.deficit < -rep.tol) {
    rep.verdict = CheckVerdict::Violated;
    rep.witness = best;
  }
  return rep;
}

QcReport qc_deficit(const Integrand& g, const Matrix& xi, const QcOptions& options) {
  return qc_deficit(g, xi, unit_cube_mesh(g.cols(), options.h), options);
}

}  // namespace wlsc
