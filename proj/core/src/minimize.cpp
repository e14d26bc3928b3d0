#include "wlsc/minimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace wlsc {

namespace {

constexpr double kTiny = 1e-300;

std::string snapshot(const TestField& f) {
  std::ostringstream os;
  os << "field snapshot: max|phi| = " << (f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0) << ", first values [";
  const Eigen::Index n = std::min<Eigen::Index>(f.values.cols(), 4);
  for (Eigen::Index i = 0; i < n; ++i) os << (i ? ", " : "") << f.values(0, i);
  os << "]";
  return os.str();
}

double checked(double v, const TestField& f) {
  if (!std::isfinite(v)) throw Error("objective returned a non-finite value; " + snapshot(f));
  return v;
}

void project(TestField& f, ConstraintMode mode, double cap) {
  f.apply_clamping();
  switch (mode) {
    case ConstraintMode::None: break;
    case ConstraintMode::GradientCap: {
      const double m = f.max_cell_gradient();
      if (m > cap) f.values *= cap / m;
      break;
    }
    case ConstraintMode::L1Cap: {
      const double t = f.gradient_l1();
      if (t > cap) f.values *= cap / t;
      break;
    }
    case ConstraintMode::Normalized: {
      const double t = f.gradient_l1();
      if (t > kTiny) f.values /= t;
      break;
    }
  }
}

// int |grad phi| and its (smoothed) subgradient in one pass.
double l1_fused(const TestField& f, double s, Eigen::MatrixXd& g) {
  const Mesh& mesh = f.mesh();
  g.setZero(f.values.rows(), f.values.cols());
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Matrix grad = f.cell_gradient(c);
    const double sq = grad.squaredNorm();
    total += mesh.cell_measure(c) * std::sqrt(sq);
    const double n = std::sqrt(sq + s * s);
    if (n <= 0.0) continue;
    const Matrix d = grad * (mesh.cell_measure(c) / n);
    const auto cv = mesh.cell(c);
    for (int i = 0; i < mesh.cell_size(); ++i)
      g.col(cv[static_cast<std::size_t>(i)]) += d * mesh.basis_gradient(c, i).head(mesh.dim());
  }
  return total;
}

struct Descent {
  TestField best;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  double stationarity = 0.0;
  bool still_improving = false;
};

constexpr int kStagnation = 60;

Descent descend(const FieldObjective& obj, TestField phi, const SolverOptions& opt) {
  Descent out;
  const bool normalized = opt.constraint == ConstraintMode::Normalized;
  project(phi, opt.constraint, opt.cap);
  if (normalized && phi.gradient_l1() <= kTiny) return out;

  const int stages = static_cast<int>(std::max<std::size_t>(1, opt.smoothing.size()));
  const int per_stage = std::max(1, opt.max_iter / stages);
  const int total = per_stage * stages;
  const double h = phi.mesh().h();
  int best_iter = 0;
  double value_at_80 = std::numeric_limits<double>::infinity();
  double last_gn = 0.0;
  Eigen::MatrixXd g, gt;

  // Value (quotient in normalized mode) and projected search direction at phi.
  auto evaluate = [&](double s) {
    const double j = checked(obj.evaluate(phi, s, g), phi);
    double v = j;
    if (normalized) {
      const double t = l1_fused(phi, s, gt);
      if (t <= kTiny) return std::numeric_limits<double>::infinity();
      v = j / t;
      g = (g - v * gt) / t;
    }
    for (std::size_t k = 0; k < phi.clamped().size(); ++k)
      if (phi.clamped()[k]) g.col(static_cast<Eigen::Index>(k)).setZero();
    return v;
  };
  auto record = [&](double v) {
    if (v < out.value) {
      out.value = v;
      out.best = phi;
      best_iter = out.iterations;
    }
  };

  for (int st = 0; st < stages; ++st) {
    const double s = opt.smoothing.empty() ? 0.0 : opt.smoothing[static_cast<std::size_t>(st)];
    if (normalized) project(phi, opt.constraint, opt.cap);
    double stage_best = std::numeric_limits<double>::infinity();
    int since = 0;
    for (int k = 1; k <= per_stage; ++k) {
      const double v = evaluate(s);
      if (!std::isfinite(v)) break;
      record(v);
      if (out.iterations <= (total * 4) / 5) value_at_80 = out.value;
      if (v < stage_best - 1e-10 * (1.0 + std::abs(stage_best))) {
        stage_best = v;
        since = 0;
      } else if (++since >= kStagnation) {
        break;
      }
      const double gn = g.norm();
      last_gn = gn;
      const double scale = std::max(phi.values.cwiseAbs().maxCoeff(), h);
      if (!(gn > 1e-13 * (1.0 + scale))) break;
      ++out.iterations;
      phi.values -= (opt.step0 * scale / std::sqrt(static_cast<double>(k)) / gn) * g;
      if (normalized) {
        phi.apply_clamping();
      } else {
        project(phi, opt.constraint, opt.cap);
      }
    }
  }
  const double v = evaluate(opt.smoothing.empty() ? 0.0 : opt.smoothing.back());
  if (std::isfinite(v)) record(v);
  if (normalized && out.best.values.size()) project(out.best, opt.constraint, opt.cap);
  out.stationarity = last_gn / (1.0 + std::abs(out.value));
  out.still_improving = best_iter > (total * 19) / 20 && std::isfinite(value_at_80) &&
                        value_at_80 - out.value > 1e-4 * (1.0 + std::abs(out.value));
  return out;
}

std::vector<double> distance_to(const Mesh& mesh, const std::vector<bool>& mask) {
  std::vector<Point> targets;
  for (std::size_t v = 0; v < mask.size(); ++v)
    if (mask[v]) targets.push_back(mesh.vertex(static_cast<int>(v)));
  std::vector<double> d(mesh.num_vertices(), std::numeric_limits<double>::infinity());
  for (std::size_t v = 0; v < d.size(); ++v)
    for (const auto& t : targets) d[v] = std::min(d[v], (mesh.vertex(static_cast<int>(v)) - t).norm());
  return d;
}

}  // namespace

TestField::TestField(MeshPtr mesh, int components, std::vector<bool> clamped)
    : values(Eigen::MatrixXd::Zero(components, static_cast<Eigen::Index>(mesh->num_vertices()))),
      mesh_(std::move(mesh)), clamped_(std::move(clamped)) {
  if (clamped_.size() != mesh_->num_vertices()) throw Error("clamped mask does not match the mesh");
  if (components < 1 || components > 2) throw Error("test fields have 1 or 2 components");
}

Matrix TestField::cell_gradient(std::size_t c) const {
  const auto cv = mesh_->cell(c);
  const int n = mesh_->dim();
  Matrix g = Matrix::Zero(values.rows(), n);
  for (int i = 0; i < mesh_->cell_size(); ++i)
    g += values.col(cv[static_cast<std::size_t>(i)]) * mesh_->basis_gradient(c, i).head(n).transpose();
  return g;
}

void TestField::apply_clamping() {
  for (std::size_t v = 0; v < clamped_.size(); ++v)
    if (clamped_[v]) values.col(static_cast<Eigen::Index>(v)).setZero();
}

double TestField::gradient_l1() const {
  double s = 0.0;
  for (std::size_t c = 0; c < mesh_->num_cells(); ++c) s += mesh_->cell_measure(c) * cell_gradient(c).norm();
  return s;
}

double TestField::max_cell_gradient() const {
  double m = 0.0;
  for (std::size_t c = 0; c < mesh_->num_cells(); ++c) m = std::max(m, cell_gradient(c).norm());
  return m;
}

BVFunction TestField::to_bv() const {
  std::vector<Vector> vals;
  vals.reserve(static_cast<std::size_t>(values.cols()));
  for (Eigen::Index v = 0; v < values.cols(); ++v) vals.emplace_back(values.col(v));
  return BVFunction::from_vertex_values(mesh_, vals);
}

FieldObjective integral_objective(const Integrand& g, int quadrature_order) {
  if (quadrature_order < 1 || quadrature_order > 3) throw Error("quadrature order must be 1, 2 or 3");
  // Gradients are cellwise constant, so x-free integrands need one point per
  // cell.  x-dependent ones use the points halfway between centroid and
  // vertices: the (2/3, 1/6, 1/6) rule in 2D, exact for affine data.
  const bool xdep = g.x_dependent();
  auto points = [xdep, quadrature_order](const Mesh& mesh, std::size_t c, std::vector<Point>& p, std::vector<double>& w) {
    p.clear();
    w.clear();
    const double area = mesh.cell_measure(c);
    if (!xdep || quadrature_order == 1) {
      p.push_back(mesh.centroid(c));
      w.push_back(area);
      return;
    }
    const auto cv = mesh.cell(c);
    const Point ctr = mesh.centroid(c);
    const int k = mesh.cell_size();
    for (int i = 0; i < k; ++i) {
      p.push_back(ctr + (mesh.vertex(cv[static_cast<std::size_t>(i)]) - ctr) * 0.5);
      w.push_back(area / k);
    }
  };
  FieldObjective obj;
  obj.value = [g, points](const TestField& f) {
    const Mesh& mesh = f.mesh();
    std::vector<Point> p;
    std::vector<double> w;
    double s = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const Matrix grad = f.cell_gradient(c);
      points(mesh, c, p, w);
      for (std::size_t q = 0; q < p.size(); ++q) s += w[q] * g(p[q], grad);
    }
    return s;
  };
  obj.fused = [g, points](const TestField& f, double smoothing, Eigen::MatrixXd& out) {
    const Mesh& mesh = f.mesh();
    out.setZero(f.values.rows(), f.values.cols());
    std::vector<Point> p;
    std::vector<double> w;
    double s = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const Matrix grad = f.cell_gradient(c);
      points(mesh, c, p, w);
      Matrix G = Matrix::Zero(grad.rows(), grad.cols());
      for (std::size_t q = 0; q < p.size(); ++q) {
        s += w[q] * g(p[q], grad);
        G += w[q] * g.gradient(p[q], grad, smoothing);
      }
      const auto cv = mesh.cell(c);
      for (int i = 0; i < mesh.cell_size(); ++i)
        out.col(cv[static_cast<std::size_t>(i)]) += G * mesh.basis_gradient(c, i).head(mesh.dim());
    }
    return s;
  };
  auto fused = obj.fused;
  obj.subgradient = [fused](const TestField& f, double smoothing) {
    Eigen::MatrixXd out;
    fused(f, smoothing, out);
    return out;
  };
  return obj;
}

FieldObjective gradient_l1_objective() {
  FieldObjective obj;
  obj.value = [](const TestField& f) { return f.gradient_l1(); };
  obj.fused = [](const TestField& f, double s, Eigen::MatrixXd& g) { return l1_fused(f, s, g); };
  obj.subgradient = [](const TestField& f, double s) {
    Eigen::MatrixXd g;
    l1_fused(f, s, g);
    return g;
  };
  return obj;
}

double FieldObjective::evaluate(const TestField& f, double smoothing, Eigen::MatrixXd& grad) const {
  if (fused) return fused(f, smoothing, grad);
  grad = subgradient(f, smoothing);
  return value(f);
}

double constrained_value(const FieldObjective& objective, const TestField& field, ConstraintMode mode) {
  const double v = objective.value(field);
  if (mode != ConstraintMode::Normalized) return v;
  const double t = field.gradient_l1();
  if (t <= kTiny) throw Error("normalized objective undefined on the zero field");
  return v / t;
}

std::vector<TestField> deterministic_starts(const MeshPtr& mesh, const std::vector<bool>& clamped, int components) {
  const Mesh& m = *mesh;
  const std::size_t nv = m.num_vertices();
  const auto boundary = m.boundary_vertex_mask();
  std::vector<bool> free_boundary(nv, false);
  bool any_clamped = false, any_free = false;
  for (std::size_t v = 0; v < nv; ++v) {
    free_boundary[v] = boundary[v] && !clamped[v];
    any_clamped = any_clamped || clamped[v];
    any_free = any_free || free_boundary[v];
  }
  std::vector<double> dc = any_clamped ? distance_to(m, clamped) : std::vector<double>(nv, 1.0);
  for (auto& d : dc)
    if (!std::isfinite(d)) d = 1.0;
  Point center = Point::Zero();
  for (const auto& p : m.vertices()) center += p;
  center /= static_cast<double>(nv);

  std::vector<std::vector<double>> shapes;
  shapes.push_back(dc);
  for (int j = 0; j < m.dim(); ++j) {
    std::vector<double> s(nv);
    for (std::size_t v = 0; v < nv; ++v) s[v] = dc[v] * (m.vertex(static_cast<int>(v))[j] - center[j]);
    shapes.push_back(std::move(s));
  }
  if (any_free) {
    const auto df = distance_to(m, free_boundary);
    for (double k : {1.0, 2.0, 4.0}) {
      const double w = k * m.h();
      std::vector<double> s(nv);
      for (std::size_t v = 0; v < nv; ++v)
        s[v] = std::max(0.0, 1.0 - df[v] / w) * std::min(1.0, dc[v] / w);
      shapes.push_back(std::move(s));
    }
  }
  // Each shape times a fixed set of unit directions in R^M: +-1 for scalars,
  // 16 equally spaced angles for two components (within 11.25 degrees of any target).
  std::vector<Vector> directions;
  if (components == 1) {
    directions = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  } else {
    for (int k = 0; k < 16; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 16.0;
      Vector d(2);
      d << std::cos(a), std::sin(a);
      directions.push_back(d);
    }
  }
  std::vector<TestField> out;
  for (const auto& s : shapes) {
    for (const auto& d : directions) {
      TestField f(mesh, components, clamped);
      for (std::size_t v = 0; v < nv; ++v) f.values.col(static_cast<Eigen::Index>(v)) = s[v] * d;
      f.apply_clamping();
      out.push_back(std::move(f));
    }
  }
  return out;
}

SolveResult minimize_field(const FieldObjective& objective, const MeshPtr& mesh, const std::vector<bool>& clamped,
                           int components, const SolverOptions& options) {
  if (!objective.value || !objective.subgradient) throw Error("objective needs value and subgradient");
  if (options.restarts < 0 || options.max_iter < 0) throw Error("solver budget must be non-negative");
  const bool normalized = options.constraint == ConstraintMode::Normalized;

  SolveResult res;
  res.seed = options.seed;
  res.value = std::numeric_limits<double>::infinity();

  // Ranked deterministic pool: every member is evaluated.
  std::vector<TestField> pool = deterministic_starts(mesh, clamped, components);
  // Under a cap every shape also enters scaled onto the constraint boundary,
  // where 1-homogeneous gains are largest.
  if (options.constraint == ConstraintMode::GradientCap || options.constraint == ConstraintMode::L1Cap) {
    const std::size_t shapes = pool.size();
    for (std::size_t i = 0; i < shapes; ++i) {
      TestField f = pool[i];
      const double m = options.constraint == ConstraintMode::GradientCap ? f.max_cell_gradient() : f.gradient_l1();
      if (m <= kTiny) continue;
      f.values *= options.cap / m;
      pool.push_back(std::move(f));
    }
  }
  for (const auto& w : options.warm_starts) pool.push_back(w);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    project(pool[i], options.constraint, options.cap);
    if (normalized && pool[i].gradient_l1() <= kTiny) continue;
    const double v = checked(constrained_value(objective, pool[i], options.constraint), pool[i]);
    ranked.emplace_back(v, i);
    if (v < res.value) {
      res.value = v;
      res.witness = pool[i];
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<TestField> starts;
  if (!normalized) {
    TestField zero(mesh, components, clamped);
    const double v = checked(objective.value(zero), zero);
    if (v < res.value || !std::isfinite(res.value)) {
      res.value = v;
      res.witness = zero;
    }
    starts.push_back(zero);
  }
  const int deterministic = (options.restarts + 1) / 2;
  for (int i = 0; i < deterministic && i < static_cast<int>(ranked.size()); ++i)
    starts.push_back(pool[ranked[static_cast<std::size_t>(i)].second]);
  const int random = options.restarts - deterministic;
  for (int r = 0; r < random; ++r) {
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(r));
    std::normal_distribution<double> nd(0.0, 1.0);
    TestField f(mesh, components, clamped);
    for (Eigen::Index v = 0; v < f.values.cols(); ++v)
      for (Eigen::Index i = 0; i < f.values.rows(); ++i) f.values(i, v) = nd(rng);
    f.apply_clamping();
    const double t = f.gradient_l1();
    if (t > kTiny) f.values /= t;
    starts.push_back(std::move(f));
  }

  const std::size_t n = starts.size();
  std::vector<Descent> runs(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        runs[i] = descend(objective, starts[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads = std::min<std::size_t>(n, options.workers > 0 ? static_cast<unsigned>(options.workers) : hw);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < nthreads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  bool still_improving = false;
  for (std::size_t i = 0; i < n; ++i) {
    res.iterations += runs[i].iterations;
    res.restart_values.push_back(runs[i].value);
    if (runs[i].value < res.value) {
      res.value = runs[i].value;
      res.witness = runs[i].best;
      res.best_restart = static_cast<int>(i);
      res.stationarity = runs[i].stationarity;
      still_improving = runs[i].still_improving;
    }
  }
  res.restarts = static_cast<int>(n);
  if (!std::isfinite(res.value)) throw Error("no admissible starting field (all fields vanish under the clamping)");
  if (normalized) {
    project(res.witness, options.constraint, options.cap);
    res.value = constrained_value(objective, res.witness, options.constraint);
  }
  res.low_confidence = still_improving && res.stationarity > 1e-2;
  return res;
}

}  // namespace wlsc
