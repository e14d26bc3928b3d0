#include "wlsc/functional.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace wlsc {

namespace {

using ChargeKey = std::tuple<double, double, int>;

ChargeKey key_of(const SingularCharge& c) { return {c.location.x(), c.location.y(), c.facet}; }

double head_tail_ratio(const std::vector<double>& v) {
  if (v.size() < 2) return 1.0;
  const std::size_t half = v.size() / 2;
  const double head = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half));
  const double tail = *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(half), v.end());
  if (head <= 0.0) return tail <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return tail / head;
}

}  // namespace

CellQuadrature cell_quadrature(const Mesh& mesh, std::size_t c, int order) {
  if (order < 1 || order > 3) throw Error("quadrature order must be 1, 2 or 3");
  const auto cv = mesh.cell(c);
  const double area = mesh.cell_measure(c);
  CellQuadrature q;
  if (mesh.dim() == 1) {
    const Point& a = mesh.vertex(cv[0]);
    const Point& b = mesh.vertex(cv[1]);
    static const std::vector<std::vector<std::pair<double, double>>> rules = {
        {{0.5, 1.0}},
        {{0.5 - 0.5 / std::sqrt(3.0), 0.5}, {0.5 + 0.5 / std::sqrt(3.0), 0.5}},
        {{0.5 - 0.5 * std::sqrt(0.6), 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + 0.5 * std::sqrt(0.6), 5.0 / 18.0}}};
    for (const auto& [t, w] : rules[static_cast<std::size_t>(order - 1)]) {
      q.points.push_back((1 - t) * a + t * b);
      q.weights.push_back(w * area);
    }
    return q;
  }
  const Point& a = mesh.vertex(cv[0]);
  const Point& b = mesh.vertex(cv[1]);
  const Point& d = mesh.vertex(cv[2]);
  auto add = [&](double l0, double l1, double l2, double w) {
    q.points.push_back(l0 * a + l1 * b + l2 * d);
    q.weights.push_back(w * area);
  };
  if (order == 1) {
    add(1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0);
  } else if (order == 2) {
    add(2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3);
    add(1.0 / 6, 2.0 / 3, 1.0 / 6, 1.0 / 3);
    add(1.0 / 6, 1.0 / 6, 2.0 / 3, 1.0 / 3);
  } else {
    // Degree-4 six-point rule.
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    for (const auto& [s, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      add(1 - 2 * s, s, s, w);
      add(s, 1 - 2 * s, s, w);
      add(s, s, 1 - 2 * s, w);
    }
  }
  return q;
}

FunctionalValue eval_G(const Integrand& f, const RecessionFn& finf, const MatrixMeasure& mu, const EvalOptions& options) {
  if (f.rows() != mu.rows() || f.cols() != mu.cols())
    throw Error("dimension mismatch: integrand is " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                ", measure is " + std::to_string(mu.rows()) + "x" + std::to_string(mu.cols()));
  const Mesh& mesh = mu.mesh();
  FunctionalValue out;
  out.per_cell.resize(mesh.num_cells(), 0.0);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto q = cell_quadrature(mesh, c, options.quadrature_order);
    double s = 0.0;
    for (std::size_t k = 0; k < q.points.size(); ++k) s += q.weights[k] * f(q.points[k], mu.density[c]);
    out.per_cell[c] = s;
    out.bulk += s;
  }
  for (const auto& ch : mu.singular) {
    const double v = finf(ch.location, ch.polar) * ch.mass;
    out.per_charge.push_back({ch.location, ch.facet, ch.mass, v});
    out.singular += v;
  }
  out.total = out.bulk + out.singular;
  return out;
}

FunctionalValue eval_F(const Integrand& f, const RecessionFn& finf, const BVFunction& u, const EvalOptions& options) {
  if (f.rows() != u.components() || f.cols() != u.dim())
    throw Error("dimension mismatch: integrand is " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                ", function has " + std::to_string(u.components()) + " components in dimension " + std::to_string(u.dim()));
  return eval_G(f, finf, derivative(u), options);
}

ContinuityReport uniform_continuity_probe(const Integrand& f, const RecessionFn& finf, const std::vector<MeasurePair>& pairs,
                                          const ContinuityOptions& options) {
  if (pairs.empty()) throw Error("continuity probe needs at least one pair");
  ContinuityReport rep;
  std::vector<double> masses;
  for (const auto& p : pairs) {
    ContinuityRow row;
    row.n = p.n;
    row.tv_gap = total_variation(p.mu - p.lambda);
    row.mass = std::max(total_variation(p.mu), total_variation(p.lambda));
    if (!std::isfinite(row.mass)) throw Error("continuity probe: non-finite mass at n = " + std::to_string(p.n));
    row.g_gap = std::abs(eval_G(f, finf, p.mu).total - eval_G(f, finf, p.lambda).total);
    masses.push_back(row.mass);
    rep.rows.push_back(row);
  }
  if (head_tail_ratio(masses) > options.mass_growth)
    throw Error("continuity probe: masses are unbounded along the sequence");
  const auto& last = rep.rows.back();
  if (!(last.tv_gap < options.tv_threshold)) {
    rep.verdict = ContinuityVerdict::Refused;
    rep.reason = "total-variation gap does not tend to zero";
    return rep;
  }
  if (last.g_gap < options.g_threshold) {
    rep.verdict = ContinuityVerdict::Consistent;
  } else {
    rep.verdict = ContinuityVerdict::Inconsistent;
    rep.reason = "G gap stays above threshold while the total-variation gap vanishes";
  }
  return rep;
}

AdditivityReport additivity_residual(const Integrand& f, const RecessionFn& finf, const BVFunction& v,
                                     const std::vector<AdditivityCase>& cases, double threshold,
                                     const EvalOptions& options) {
  if (cases.empty()) throw Error("additivity residual needs at least one case");
  AdditivityReport rep;
  rep.threshold = threshold;
  const double fv = eval_F(f, finf, v, options).total;
  for (const auto& cs : cases) {
    if (cs.components.empty()) throw Error("additivity case without components");
    BVFunction sum = cs.components.front();
    for (std::size_t j = 1; j < cs.components.size(); ++j) sum = sum + cs.components[j];
    const double scale = 1.0 + total_variation(derivative(cs.u));
    const double l1 = l1_distance(sum, cs.u);
    const double tv = total_variation(derivative(sum - cs.u));
    if (l1 > 1e-9 * scale || tv > 1e-9 * scale)
      throw Error("components do not sum to u_n at n = " + std::to_string(cs.n));
    AdditivityRow row;
    row.n = cs.n;
    row.whole = eval_F(f, finf, cs.u + v, options).total - fv;
    for (const auto& c : cs.components) row.parts += eval_F(f, finf, c + v, options).total - fv;
    row.residual = std::abs(row.whole - row.parts);
    rep.rows.push_back(row);
  }
  rep.additive = rep.rows.back().residual < threshold;
  return rep;
}

FourTermResidual four_term_residual(const Integrand& f, const RecessionFn& finf, const BVFunction& u,
                                    const BVFunction& un, const EvalOptions& options) {
  if (!u.same_mesh(un)) throw Error("four-term residual needs both functions on one mesh");
  const MatrixMeasure du = derivative(u);
  const MatrixMeasure dn = derivative(un);
  const Mesh& mesh = du.mesh();
  const Matrix zero = Matrix::Zero(du.rows(), du.cols());
  double acc = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto q = cell_quadrature(mesh, c, options.quadrature_order);
    const Matrix& a = du.density[c];
    const Matrix& b = dn.density[c];
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Point& x = q.points[k];
      acc += q.weights[k] * (f(x, a + b) - f(x, a) - f(x, b) + f(x, zero));
    }
  }
  std::map<ChargeKey, std::pair<Matrix, Matrix>> charges;
  for (const auto& ch : du.singular) charges.try_emplace(key_of(ch), zero, zero).first->second.first += ch.value();
  for (const auto& ch : dn.singular) charges.try_emplace(key_of(ch), zero, zero).first->second.second += ch.value();
  for (const auto& [k, ab] : charges) {
    const Point x(std::get<0>(k), std::get<1>(k));
    const auto& [a, b] = ab;
    acc += finf(x, a + b) - finf(x, a) - finf(x, b);
  }
  FourTermResidual r;
  r.absolute = std::abs(acc);
  r.tv = total_variation(dn);
  r.relative = r.absolute / (1.0 + r.tv);
  return r;
}

}  // namespace wlsc
