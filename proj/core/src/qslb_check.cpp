#include "wlsc/qslb_check.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace wlsc {

namespace {

constexpr double kFlatTol = 1e-9;

double sampled_unit_bound(const Integrand& g) {
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> nd(0.0, 1.0);
  double m = 0.0;
  for (int k = 0; k < 256; ++k) {
    Matrix xi(g.rows(), g.cols());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = nd(rng);
    xi /= xi.norm();
    m = std::max(m, std::abs(g(Point::Zero(), xi)));
  }
  return m;
}

QslbReport quotient_report(const Integrand& g, const MeshPtr& mesh, const std::vector<bool>& clamped,
                           const QslbOptions& options) {
  SolverOptions so = options.solver;
  so.constraint = ConstraintMode::Normalized;
  const SolveResult r = minimize_field(integral_objective(g), mesh, clamped, g.rows(), so);
  QslbReport rep;
  rep.dim = mesh->dim();
  rep.deficit = r.value;
  rep.tol = options.tol;
  rep.bound = sampled_unit_bound(g);
  rep.low_confidence = r.low_confidence;
  rep.iterations = r.iterations;
  if (r.value < -options.tol) {
    rep.verdict = CheckVerdict::Violated;
    rep.witness = r.witness;
  }
  return rep;
}

}  // namespace

MeshPtr halfball_mesh(int dim, const Point& normal, double h) {
  return std::make_shared<const Mesh>(build_mesh(Domain::half_ball(dim, normal), h));
}

std::vector<bool> halfball_clamping(const Mesh& mesh, const Point& normal) {
  const auto boundary = mesh.boundary_vertex_mask();
  std::vector<bool> clamped(mesh.num_vertices(), false);
  for (std::size_t v = 0; v < clamped.size(); ++v) {
    if (!boundary[v]) continue;
    const Point& y = mesh.vertex(static_cast<int>(v));
    clamped[v] = std::abs(y.dot(normal)) > kFlatTol || y.norm() > 1.0 - kFlatTol;
  }
  return clamped;
}

Integrand frozen_recession(const RecessionFn& finf, const Point& x0, int rows, int cols) {
  Integrand::Grad grad;
  if (finf.grad) grad = [finf, x0](const Point&, const Matrix& xi, double s) { return finf.grad(x0, xi, s); };
  Integrand g("recession_at_x0", rows, cols, 0.0, [finf, x0](const Point&, const Matrix& xi) { return finf(x0, xi); },
              grad);
  g.with_recession([finf, x0](const Point&, const Matrix& xi) { return finf(x0, xi); }, grad);
  return g;
}

QslbReport halfball_deficit(const RecessionFn& finf, int rows, const BoundaryPoint& x0, const MeshPtr& mesh,
                            const QslbOptions& options) {
  if (std::abs(x0.normal.norm() - 1.0) > 1e-12) throw Error("half-ball normal must have unit length");
  const Integrand g = frozen_recession(finf, x0.x0, rows, mesh->dim());
  QslbReport rep = quotient_report(g, mesh, halfball_clamping(*mesh, x0.normal), options);
  rep.x0 = x0.x0;
  rep.normal = x0.normal;
  return rep;
}

QslbReport halfball_deficit(const RecessionFn& finf, int rows, int dim, const BoundaryPoint& x0,
                            const QslbOptions& options) {
  return halfball_deficit(finf, rows, x0, halfball_mesh(dim, x0.normal, options.h), options);
}

QslbReport patch_quotient(const RecessionFn& finf, int rows, const Point& x0, const Patch& patch,
                          const QslbOptions& options) {
  auto mesh = std::make_shared<const Mesh>(patch.mesh);
  const Integrand g = frozen_recession(finf, x0, rows, mesh->dim());
  if (patch.num_clamped() == 0) throw Error("patch has no clamped part; enlarge the domain or shrink delta");
  QslbReport rep = quotient_report(g, mesh, patch.clamped, options);
  rep.x0 = x0;
  return rep;
}

EpsDeltaReport epsdelta_probe(const Integrand& f, const Point& x0, const Mesh& mesh, const EpsDeltaOptions& options) {
  if (options.eps_grid.empty() || options.delta_grid.empty() || options.R_grid.size() < 2)
    throw Error("eps-delta probe needs eps and delta grids and at least two norm caps");
  for (double e : options.eps_grid)
    if (!(e > 0)) throw Error("eps grid must be positive");
  EpsDeltaReport rep;
  rep.x0 = x0;
  rep.R_grid = options.R_grid;
  std::sort(rep.R_grid.begin(), rep.R_grid.end());
  std::vector<bool> eps_fails(options.eps_grid.size(), true);
  for (double delta : options.delta_grid) {
    if (!(delta > 0)) throw Error("delta grid must be positive");
    const Patch patch = local_patch(mesh, x0, delta, options.patch);
    auto pm = std::make_shared<const Mesh>(patch.mesh);
    for (std::size_t ie = 0; ie < options.eps_grid.size(); ++ie) {
      const double eps = options.eps_grid[ie];
      const Integrand g = catalog::sum({{1.0, f}, {eps, catalog::norm(f.rows(), f.cols())}});
      const FieldObjective obj = integral_objective(g);
      EpsDeltaRow row;
      row.eps = eps;
      row.delta = delta;
      std::optional<TestField> carry;
      for (double R : rep.R_grid) {
        SolverOptions so = options.solver;
        so.constraint = ConstraintMode::L1Cap;
        so.cap = R;
        if (carry) so.warm_starts.push_back(*carry);
        const SolveResult r = minimize_field(obj, pm, patch.clamped, f.rows(), so);
        rep.low_confidence = rep.low_confidence || r.low_confidence;
        row.minima.push_back(r.value);
        carry = r.witness;
      }
      const double last = row.minima.back();
      const double prev = row.minima[row.minima.size() - 2];
      row.unbounded = prev < -options.tol && last < -options.tol && last <= options.growth_ratio * prev;
      eps_fails[ie] = eps_fails[ie] && row.unbounded;
      rep.rows.push_back(std::move(row));
    }
  }
  rep.violated = std::any_of(eps_fails.begin(), eps_fails.end(), [](bool b) { return b; });
  return rep;
}

EquivalenceReport equivalence_harness(const Integrand& f, const RecessionFn& finf, const Domain& domain,
                                      const Point& x0, const EquivalenceOptions& options) {
  if (!domain.contains(x0)) throw Error("x0 lies outside the domain");
  EquivalenceReport rep;
  rep.x0 = x0;
  std::optional<BoundaryPoint> bp;
  bool on_boundary = true;
  try {
    bp = boundary_point(domain, x0);
  } catch (const Error&) {
    on_boundary = false;
  }
  rep.interior = !on_boundary;
  const Mesh mesh = build_mesh(domain, options.h);
  const int rows = f.rows();

  FormResult frozen;
  frozen.form = "frozen";
  {
    const Patch patch = local_patch(mesh, x0, options.delta);
    const QslbReport q = patch_quotient(finf, rows, x0, patch, options.qslb);
    frozen.ran = true;
    frozen.verdict = q.verdict;
    frozen.value = q.deficit;
  }
  rep.forms.push_back(frozen);

  if (options.run_unfrozen) {
    FormResult unfrozen;
    unfrozen.form = "unfrozen";
    const EpsDeltaReport e = epsdelta_probe(f, x0, mesh, options.epsdelta);
    unfrozen.ran = true;
    unfrozen.verdict = e.violated ? CheckVerdict::Violated : CheckVerdict::Plausible;
    unfrozen.value = e.rows.empty() ? 0.0 : e.rows.front().minima.back();
    rep.forms.push_back(unfrozen);
  }

  if (on_boundary) {
    FormResult hb;
    hb.form = "halfball";
    const bool curved = domain.kind == Domain::Kind::HalfBall && domain.dim == 2 && bp &&
                        std::abs(x0.dot(domain.normal)) > kFlatTol;
    if (!bp) {
      hb.reason = "corner point: no single outer normal; rely on the eps-delta probe";
    } else if (curved) {
      hb.reason = "curved boundary: flattening is out of scope";
    } else {
      const QslbReport q = halfball_deficit(finf, rows, mesh.dim(), *bp, options.qslb);
      hb.ran = true;
      hb.verdict = q.verdict;
      hb.value = q.deficit;
    }
    rep.forms.push_back(hb);
  } else {
    FormResult qc;
    qc.form = "qc_at_0";
    const Integrand g = frozen_recession(finf, x0, rows, mesh.dim());
    const QcReport q = qc_deficit(g, Matrix::Zero(rows, mesh.dim()), options.qc);
    qc.ran = true;
    qc.verdict = q.verdict;
    qc.value = q.deficit;
    rep.forms.push_back(qc);
  }

  rep.agree = true;
  std::optional<CheckVerdict> first;
  for (const auto& fr : rep.forms) {
    if (!fr.ran) continue;
    if (!first) first = fr.verdict;
    rep.agree = rep.agree && fr.verdict == *first;
  }
  return rep;
}

}  // namespace wlsc
