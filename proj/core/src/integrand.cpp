#include "wlsc/integrand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace wlsc {

namespace {

double smoothed_norm(const Matrix& xi, double s) { return std::sqrt(xi.squaredNorm() + s * s); }

// d|xi| with the smoothing convention; 0 is a valid subgradient at xi = 0.
Matrix norm_gradient(const Matrix& xi, double s) {
  const double n = smoothed_norm(xi, s);
  if (n == 0.0) return Matrix::Zero(xi.rows(), xi.cols());
  return xi / n;
}

Matrix finite_difference_gradient(const Integrand::Eval& f, const Point& x, const Matrix& xi) {
  Matrix g(xi.rows(), xi.cols());
  for (int i = 0; i < xi.rows(); ++i) {
    for (int j = 0; j < xi.cols(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(xi(i, j)));
      Matrix p = xi, m = xi;
      p(i, j) += h;
      m(i, j) -= h;
      g(i, j) = (f(x, p) - f(x, m)) / (2 * h);
    }
  }
  return g;
}

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

}  // namespace

Integrand::Integrand(std::string tag, int rows, int cols, double growth, Eval value, Grad gradient)
    : tag_(std::move(tag)), rows_(rows), cols_(cols), growth_(growth), value_(std::move(value)),
      gradient_(std::move(gradient)) {
  if (rows_ < 1 || rows_ > 2 || cols_ < 1 || cols_ > 2) throw Error("integrand dimensions must be 1 or 2");
  if (!value_) throw Error("integrand needs an evaluator");
}

Matrix Integrand::gradient(const Point& x, const Matrix& xi, double smoothing) const {
  if (gradient_) return gradient_(x, xi, smoothing);
  return finite_difference_gradient(value_, x, xi);
}

double Integrand::recession(const Point& x, const Matrix& xi) const {
  if (!recession_) throw Error("integrand '" + tag_ + "' has no analytic recession function");
  return recession_(x, xi);
}

Matrix Integrand::recession_gradient(const Point& x, const Matrix& xi, double smoothing) const {
  if (recession_gradient_) return recession_gradient_(x, xi, smoothing);
  if (!recession_) throw Error("integrand '" + tag_ + "' has no analytic recession function");
  return finite_difference_gradient(recession_, x, xi);
}

Integrand& Integrand::with_recession(Eval recession, Grad recession_gradient) {
  recession_ = std::move(recession);
  recession_gradient_ = std::move(recession_gradient);
  return *this;
}

Integrand& Integrand::with_modulus(std::function<double(double)> modulus, bool exact) {
  modulus_ = std::move(modulus);
  modulus_exact_ = exact;
  return *this;
}

Integrand& Integrand::mark_x_dependent(bool dependent) {
  x_dependent_ = dependent;
  return *this;
}

Integrand Integrand::frozen(const Point& x0) const {
  auto self = *this;
  Integrand g(tag_, rows_, cols_, growth_, [self, x0](const Point&, const Matrix& xi) { return self(x0, xi); },
              [self, x0](const Point&, const Matrix& xi, double s) { return self.gradient(x0, xi, s); });
  if (recession_) {
    g.with_recession([self, x0](const Point&, const Matrix& xi) { return self.recession(x0, xi); },
                     [self, x0](const Point&, const Matrix& xi, double s) { return self.recession_gradient(x0, xi, s); });
  }
  if (modulus_) g.with_modulus(*modulus_, modulus_exact_);
  return g;
}

Integrand Integrand::recession_integrand() const {
  if (!recession_) throw Error("integrand '" + tag_ + "' has no analytic recession function");
  auto self = *this;
  Integrand g(tag_ + "_recession", rows_, cols_, growth_,
              [self](const Point& x, const Matrix& xi) { return self.recession(x, xi); },
              [self](const Point& x, const Matrix& xi, double s) { return self.recession_gradient(x, xi, s); });
  g.with_recession([self](const Point& x, const Matrix& xi) { return self.recession(x, xi); },
                   [self](const Point& x, const Matrix& xi, double s) { return self.recession_gradient(x, xi, s); });
  g.with_modulus([](double) { return 0.0; }, true);
  g.mark_x_dependent(x_dependent_);
  return g;
}

// ---------------------------------------------------------------------------
// Catalog

namespace catalog {

Integrand linear(const Matrix& a) {
  Integrand f("linear", static_cast<int>(a.rows()), static_cast<int>(a.cols()), a.norm(),
              [a](const Point&, const Matrix& xi) { return contract(a, xi); },
              [a](const Point&, const Matrix&, double) { return a; });
  f.with_recession([a](const Point&, const Matrix& xi) { return contract(a, xi); },
                   [a](const Point&, const Matrix&, double) { return a; });
  f.with_modulus([](double) { return 0.0; }, true);
  return f;
}

Integrand norm(int rows, int cols) {
  auto value = [](const Point&, const Matrix& xi) { return xi.norm(); };
  auto grad = [](const Point&, const Matrix& xi, double s) { return norm_gradient(xi, s); };
  Integrand f("norm", rows, cols, 1.0, value, grad);
  f.with_recession(value, grad);
  f.with_modulus([](double) { return 0.0; }, true);
  return f;
}

Integrand negnorm(int rows, int cols) {
  auto value = [](const Point&, const Matrix& xi) { return -xi.norm(); };
  auto grad = [](const Point&, const Matrix& xi, double s) { return Matrix(-norm_gradient(xi, s)); };
  Integrand f("negnorm", rows, cols, 1.0, value, grad);
  f.with_recession(value, grad);
  f.with_modulus([](double) { return 0.0; }, true);
  return f;
}

Integrand area(int rows, int cols) {
  Integrand f("area", rows, cols, 1.0, [](const Point&, const Matrix& xi) { return std::sqrt(1.0 + xi.squaredNorm()); },
              [](const Point&, const Matrix& xi, double) { return Matrix(xi / std::sqrt(1.0 + xi.squaredNorm())); });
  f.with_recession([](const Point&, const Matrix& xi) { return xi.norm(); },
                   [](const Point&, const Matrix& xi, double s) { return norm_gradient(xi, s); });
  // sup_{s >= t} (sqrt(1+s^2) - s)/(1+s) is attained at s = t.
  f.with_modulus([](double t) { return (std::sqrt(1.0 + t * t) - t) / (1.0 + t); }, true);
  return f;
}

Integrand boundary_null_lagrangian(const Vector& a, const Vector& t, const std::optional<Vector>& normal) {
  if (normal) {
    if (normal->size() != t.size()) throw Error("normal and tangent dimensions differ");
    if (std::abs(normal->dot(t)) > 1e-12 * std::max(1.0, t.norm())) throw Error("tangent t must be orthogonal to the normal");
  }
  const Matrix m = outer(a, t);
  Integrand g("boundary_null_lagrangian", static_cast<int>(m.rows()), static_cast<int>(m.cols()), m.norm(),
                [m](const Point&, const Matrix& xi) { return contract(m, xi); },
                [m](const Point&, const Matrix&, double) { return m; });
  g.with_recession([m](const Point&, const Matrix& xi) { return contract(m, xi); },
                   [m](const Point&, const Matrix&, double) { return m; });
  g.with_modulus([](double) { return 0.0; }, true);
  return g;
}

Integrand norm_plus_sin(int rows, int cols) {
  Integrand f("norm_plus_sin", rows, cols, 2.0,
              [](const Point&, const Matrix& xi) {
                const double r = xi.norm();
                return r + std::sin(r);
              },
              [](const Point&, const Matrix& xi, double s) {
                const double r = xi.norm();
                return Matrix((1.0 + std::cos(r)) * norm_gradient(xi, s));
              });
  f.with_recession([](const Point&, const Matrix& xi) { return xi.norm(); },
                   [](const Point&, const Matrix& xi, double s) { return norm_gradient(xi, s); });
  // |sin s| / (1 + s) <= 1/(1 + t) for s >= t: an upper bound, not the exact value.
  f.with_modulus([](double t) { return 1.0 / (1.0 + t); }, false);
  return f;
}

Integrand scaled(const Integrand& f, double alpha) {
  Integrand g(f.tag() + "_scaled", f.rows(), f.cols(), std::abs(alpha) * f.growth(),
              [f, alpha](const Point& x, const Matrix& xi) { return alpha * f(x, xi); },
              [f, alpha](const Point& x, const Matrix& xi, double s) { return Matrix(alpha * f.gradient(x, xi, s)); });
  if (f.has_recession()) {
    g.with_recession([f, alpha](const Point& x, const Matrix& xi) { return alpha * f.recession(x, xi); },
                     [f, alpha](const Point& x, const Matrix& xi, double s) {
                       return Matrix(alpha * f.recession_gradient(x, xi, s));
                     });
  }
  if (f.modulus()) {
    auto m = *f.modulus();
    g.with_modulus([m, alpha](double t) { return std::abs(alpha) * m(t); }, f.modulus_exact());
  }
  g.mark_x_dependent(f.x_dependent());
  return g;
}

Integrand shifted(const Integrand& f, double constant) {
  Integrand g(f.tag() + "_shifted", f.rows(), f.cols(), f.growth() + std::abs(constant),
              [f, constant](const Point& x, const Matrix& xi) { return f(x, xi) + constant; },
              [f](const Point& x, const Matrix& xi, double s) { return f.gradient(x, xi, s); });
  if (f.has_recession()) {
    g.with_recession([f](const Point& x, const Matrix& xi) { return f.recession(x, xi); },
                     [f](const Point& x, const Matrix& xi, double s) { return f.recession_gradient(x, xi, s); });
  }
  if (f.modulus()) {
    auto m = *f.modulus();
    // |c| / (1 + |xi|) adds at most |c| / (1 + t).
    g.with_modulus([m, constant](double t) { return m(t) + std::abs(constant) / (1.0 + t); }, false);
  }
  g.mark_x_dependent(f.x_dependent());
  return g;
}

Integrand sum(const std::vector<std::pair<double, Integrand>>& terms) {
  if (terms.empty()) throw Error("composite integrand needs at least one term");
  const int rows = terms.front().second.rows(), cols = terms.front().second.cols();
  double growth = 0.0;
  bool recession = true, xdep = false, modulus = true, exact = true;
  for (const auto& [w, f] : terms) {
    if (f.rows() != rows || f.cols() != cols) throw Error("composite integrand terms have different dimensions");
    growth += std::abs(w) * f.growth();
    recession = recession && f.has_recession();
    modulus = modulus && f.modulus().has_value();
    exact = exact && f.modulus_exact() && f.modulus() && (*f.modulus())(0.0) == 0.0;
    xdep = xdep || f.x_dependent();
  }
  Integrand g("composite", rows, cols, growth,
              [terms](const Point& x, const Matrix& xi) {
                double s = 0.0;
                for (const auto& [w, f] : terms) s += w * f(x, xi);
                return s;
              },
              [terms](const Point& x, const Matrix& xi, double sm) {
                Matrix s = Matrix::Zero(xi.rows(), xi.cols());
                for (const auto& [w, f] : terms) s += w * f.gradient(x, xi, sm);
                return s;
              });
  if (recession) {
    g.with_recession(
        [terms](const Point& x, const Matrix& xi) {
          double s = 0.0;
          for (const auto& [w, f] : terms) s += w * f.recession(x, xi);
          return s;
        },
        [terms](const Point& x, const Matrix& xi, double sm) {
          Matrix s = Matrix::Zero(xi.rows(), xi.cols());
          for (const auto& [w, f] : terms) s += w * f.recession_gradient(x, xi, sm);
          return s;
        });
  }
  if (modulus) {
    g.with_modulus(
        [terms](double t) {
          double s = 0.0;
          for (const auto& [w, f] : terms) s += std::abs(w) * (*f.modulus())(t);
          return s;
        },
        exact);
  }
  g.mark_x_dependent(xdep);
  return g;
}

Integrand modulated(const Integrand& f, std::function<double(const Point&)> c, double c_bound) {
  Integrand g(f.tag() + "_modulated", f.rows(), f.cols(), c_bound * f.growth(),
              [f, c](const Point& x, const Matrix& xi) { return c(x) * f(x, xi); },
              [f, c](const Point& x, const Matrix& xi, double s) { return Matrix(c(x) * f.gradient(x, xi, s)); });
  if (f.has_recession()) {
    g.with_recession([f, c](const Point& x, const Matrix& xi) { return c(x) * f.recession(x, xi); },
                     [f, c](const Point& x, const Matrix& xi, double s) {
                       return Matrix(c(x) * f.recession_gradient(x, xi, s));
                     });
  }
  if (f.modulus()) {
    auto m = *f.modulus();
    g.with_modulus([m, c_bound](double t) { return c_bound * m(t); }, false);
  }
  g.mark_x_dependent(true);
  return g;
}

std::vector<std::string> tags() {
  return {"linear", "norm", "negnorm", "area", "boundary_null_lagrangian", "norm_plus_sin"};
}

Integrand get(const std::string& tag, const Params& p) {
  if (tag == "linear") {
    if (p.matrix.size() == 0) throw Error("linear integrand needs a matrix");
    return linear(p.matrix);
  }
  if (tag == "norm") return norm(p.rows, p.cols);
  if (tag == "negnorm") return negnorm(p.rows, p.cols);
  if (tag == "area") return area(p.rows, p.cols);
  if (tag == "norm_plus_sin") return norm_plus_sin(p.rows, p.cols);
  if (tag == "boundary_null_lagrangian") {
    if (p.a.size() == 0 || p.t.size() == 0) throw Error("boundary_null_lagrangian needs vectors a and t");
    return boundary_null_lagrangian(p.a, p.t, p.normal);
  }
  throw Error("unknown integrand tag '" + tag + "'");
}

}  // namespace catalog

// ---------------------------------------------------------------------------
// Recession functions

Integrand RecessionFn::as_integrand(int rows, int cols) const {
  auto e = eval;
  auto g = grad;
  Integrand f("recession", rows, cols, 0.0, e, g);
  f.with_recession(e, g);
  return f;
}

std::vector<double> default_t_grid() { return {1e2, 1e3, 1e4, 1e5, 1e6}; }

RecessionFn recession_of(const Integrand& f, std::vector<double> t_grid) {
  RecessionFn r;
  if (f.has_recession()) {
    r.eval = [f](const Point& x, const Matrix& xi) { return f.recession(x, xi); };
    r.grad = [f](const Point& x, const Matrix& xi, double s) { return f.recession_gradient(x, xi, s); };
    r.provenance = RecessionFn::Provenance::Analytic;
    return r;
  }
  r.provenance = RecessionFn::Provenance::Estimated;
  r.t_grid = t_grid;
  r.eval = [f, t_grid](const Point& x, const Matrix& xi) { return recession_estimate(f, x, xi, t_grid).value; };
  auto eval = r.eval;
  r.grad = [eval](const Point& x, const Matrix& xi, double) { return finite_difference_gradient(eval, x, xi); };
  return r;
}

RecessionEstimate recession_estimate(const Integrand& f, const Point& x, const Matrix& xi,
                                     const std::vector<double>& t_grid) {
  const double r = xi.norm();
  if (r == 0.0) return {};
  if (t_grid.size() < 3) throw Error("recession estimate needs at least three grid points");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 1.0 || t_grid[i] > 1e7) throw Error("recession grid must lie in [1, 1e7]");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw Error("recession grid must be increasing");
  }
  const Matrix unit = xi / r;
  std::vector<double> g;
  for (double t : t_grid) g.push_back(f(x, t * unit) / t);
  const std::size_t n = g.size();
  const double d1 = g[n - 2] - g[n - 3];
  const double d2 = g[n - 1] - g[n - 2];
  const double scale = std::max(1.0, std::abs(g[n - 1]));
  RecessionEstimate est;
  est.last_difference = d2;
  if (std::abs(d2) <= 1e-14 * scale) {
    est.value = g[n - 1] * r;
    est.observed_rate = std::numeric_limits<double>::infinity();
    return est;
  }
  if (!(std::abs(d2) < std::abs(d1))) throw Error("recession limit not detected");
  const double q = d2 / d1;
  double limit = g[n - 1];
  const double correction = d2 * q / (1.0 - q);  // geometric tail sum
  if (std::abs(correction) <= 10.0 * std::abs(d2)) limit += correction;
  est.value = limit * r;
  est.observed_rate = -std::log(std::abs(q)) / std::log(t_grid[n - 1] / t_grid[n - 2]);
  return est;
}

double recession_stability(const Integrand& f, const Point& x, const Matrix& xi, double t, double radius) {
  const double r = xi.norm();
  if (r == 0.0) return 0.0;
  const Matrix unit = xi / r;
  const double base = f(x, t * unit) / t;
  double worst = 0.0;
  std::mt19937_64 rng(99);
  for (int k = 0; k < 16; ++k) {
    Matrix d = random_matrix(rng, static_cast<int>(xi.rows()), static_cast<int>(xi.cols()));
    d *= radius / std::max(d.norm(), 1e-300);
    std::normal_distribution<double> nd(0.0, 1.0);
    Point dy(nd(rng), nd(rng));
    dy *= radius / dy.norm();
    worst = std::max(worst, std::abs(f(x + dy, t * (unit + d)) / t - base));
  }
  return worst;
}

MuEstimate mu_estimate(const Integrand& f, const RecessionFn& finf, double t, const MuOptions& options) {
  if (t < 0) throw Error("mu_estimate needs t >= 0");
  MuEstimate out;
  out.t = t;
  std::mt19937_64 rng(options.seed);
  const double lo = t > 0 ? t : 1e-3;
  const double hi = t > 0 ? 100.0 * t : 100.0;
  double sup = 0.0;
  for (const auto& x : options.x_samples) {
    if (t == 0.0) {
      const Matrix z = Matrix::Zero(f.rows(), f.cols());
      sup = std::max(sup, std::abs(f(x, z) - finf(x, z)));
    }
    for (int d = 0; d < options.directions; ++d) {
      Matrix dir = random_matrix(rng, f.rows(), f.cols());
      dir /= dir.norm();
      for (int m = 0; m < options.magnitudes; ++m) {
        const double s = options.magnitudes == 1 ? lo : lo * std::pow(hi / lo, m / (options.magnitudes - 1.0));
        const Matrix xi = s * dir;
        sup = std::max(sup, std::abs(f(x, xi) - finf(x, xi)) / (1.0 + s));
      }
    }
  }
  out.sampled = sup;
  if (f.modulus() && f.modulus_exact()) out.analytic = (*f.modulus())(t);
  return out;
}

std::vector<MuEstimate> mu_profile(const Integrand& f, const RecessionFn& finf, const std::vector<double>& t_grid,
                                   const MuOptions& options) {
  std::vector<MuEstimate> out;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw Error("mu grid must be increasing");
    out.push_back(mu_estimate(f, finf, t_grid[i], options));
  }
  for (std::size_t i = out.size(); i-- > 1;) out[i - 1].sampled = std::max(out[i - 1].sampled, out[i].sampled);
  return out;
}

GrowthCheck check_growth(const Integrand& f, const std::vector<Point>& xs, int samples, std::uint64_t seed) {
  GrowthCheck r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logmag(-3.0, 6.0);
  for (const auto& x : xs) {
    for (int k = 0; k < samples; ++k) {
      Matrix xi = random_matrix(rng, f.rows(), f.cols());
      xi *= std::pow(10.0, logmag(rng)) / xi.norm();
      const double ratio = std::abs(f(x, xi)) / (xi.norm() + 1.0);
      const double rel = f.growth() > 0 ? ratio / f.growth() : (ratio > 0 ? std::numeric_limits<double>::infinity() : 0.0);
      r.worst_ratio = std::max(r.worst_ratio, rel);
    }
  }
  r.linear_growth = r.worst_ratio <= 1.0 + 1e-12;
  return r;
}

}  // namespace wlsc
