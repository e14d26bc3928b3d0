#pragma once

#include "wlsc/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wlsc {

/// Integrand f(x, xi) of at most linear growth, |f(x, xi)| <= C (|xi| + 1).
class Integrand {
 public:
  using Eval = std::function<double(const Point&, const Matrix&)>;
  /// (Sub)gradient in xi.  `smoothing` > 0 replaces |xi| by sqrt(|xi|^2 + s^2)
  /// in nonsmooth terms; 0 means the true (sub)gradient.
  using Grad = std::function<Matrix(const Point&, const Matrix&, double smoothing)>;

  Integrand() = default;
  Integrand(std::string tag, int rows, int cols, double growth, Eval value, Grad gradient = {});

  const std::string& tag() const { return tag_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double growth() const { return growth_; }
  bool x_dependent() const { return x_dependent_; }

  double operator()(const Point& x, const Matrix& xi) const { return value_(x, xi); }
  Matrix gradient(const Point& x, const Matrix& xi, double smoothing = 0.0) const;

  bool has_recession() const { return static_cast<bool>(recession_); }
  /// Analytic recession function; throws if none is attached.
  double recession(const Point& x, const Matrix& xi) const;
  Matrix recession_gradient(const Point& x, const Matrix& xi, double smoothing = 0.0) const;

  /// Analytic modulus t -> mu(t) (exact or an upper bound) if known.
  const std::optional<std::function<double(double)>>& modulus() const { return modulus_; }
  bool modulus_exact() const { return modulus_exact_; }

  Integrand& with_recession(Eval recession, Grad recession_gradient = {});
  Integrand& with_modulus(std::function<double(double)> modulus, bool exact);
  Integrand& mark_x_dependent(bool dependent = true);

  /// f(x0, .) as an x-free integrand.
  Integrand frozen(const Point& x0) const;
  /// The analytic recession function as an integrand in its own right.
  Integrand recession_integrand() const;

 private:
  std::string tag_ = "user";
  int rows_ = 1, cols_ = 1;
  double growth_ = 0.0;
  bool x_dependent_ = false;
  Eval value_;
  Grad gradient_;
  Eval recession_;
  Grad recession_gradient_;
  std::optional<std::function<double(double)>> modulus_;
  bool modulus_exact_ = false;
};

namespace catalog {

Integrand linear(const Matrix& a);
Integrand norm(int rows, int cols);
Integrand negnorm(int rows, int cols);
Integrand area(int rows, int cols);
/// xi -> xi : (a (x) t).  When `normal` is given, t must be orthogonal to it.
Integrand boundary_null_lagrangian(const Vector& a, const Vector& t, const std::optional<Vector>& normal = std::nullopt);
/// |xi| + sin|xi|: recession |xi| with an oscillating, bounded perturbation.
Integrand norm_plus_sin(int rows, int cols);

Integrand scaled(const Integrand& f, double alpha);
Integrand shifted(const Integrand& f, double constant);
Integrand sum(const std::vector<std::pair<double, Integrand>>& terms);
/// c(x) f(xi) with smooth c; `c_bound` bounds |c| for the growth constant.
Integrand modulated(const Integrand& f, std::function<double(const Point&)> c, double c_bound);

struct Params {
  int rows = 1, cols = 1;
  Matrix matrix;                 // linear
  Vector a, t;                   // boundary_null_lagrangian
  std::optional<Vector> normal;  // boundary_null_lagrangian
};

/// Catalog lookup by tag: linear, norm, negnorm, area, boundary_null_lagrangian,
/// norm_plus_sin.  Throws on unknown tags or inconsistent dimensions.
Integrand get(const std::string& tag, const Params& params);

/// All catalog tags, in a fixed order.
std::vector<std::string> tags();

}  // namespace catalog

/// f^infinity, either analytic or estimated from f along rays.
struct RecessionFn {
  enum class Provenance { Analytic, Estimated };

  Integrand::Eval eval;
  Integrand::Grad grad;
  Provenance provenance = Provenance::Analytic;
  std::vector<double> t_grid;

  double operator()(const Point& x, const Matrix& xi) const { return eval(x, xi); }
  /// The recession function wrapped as an integrand (for the solvers).
  Integrand as_integrand(int rows, int cols) const;
};

std::vector<double> default_t_grid();

/// Analytic recession when attached, otherwise the numerical estimate.
RecessionFn recession_of(const Integrand& f, std::vector<double> t_grid = default_t_grid());

struct RecessionEstimate {
  double value = 0.0;
  double observed_rate = 0.0;  // p in |g(t) - g_inf| ~ t^-p
  double last_difference = 0.0;
};

/// lim_t f(x, t xi^)/t * |xi| with xi^ = xi/|xi|, extrapolated from the last three
/// grid points.  Throws "recession limit not detected" when the tail does not contract.
RecessionEstimate recession_estimate(const Integrand& f, const Point& x, const Matrix& xi,
                                     const std::vector<double>& t_grid = default_t_grid());

/// Largest change of f(y, t eta)/t under |y - x| <= radius, |eta - xi^| <= radius.
double recession_stability(const Integrand& f, const Point& x, const Matrix& xi, double t, double radius = 1e-3);

struct MuOptions {
  std::vector<Point> x_samples{Point::Zero()};
  int directions = 64;
  int magnitudes = 24;
  std::uint64_t seed = 12345;
};

struct MuEstimate {
  double t = 0.0;
  double sampled = 0.0;            // lower estimate of mu(t)
  std::optional<double> analytic;  // catalog modulus when known
};

/// Sampled sup of |f - f^inf| / (1 + |xi|) over |xi| in [t, 100 t] (plus xi = 0 at t = 0).
MuEstimate mu_estimate(const Integrand& f, const RecessionFn& finf, double t, const MuOptions& options = {});

/// mu estimates on an increasing grid, made non-increasing by suffix maxima
/// (every sample for t_j is admissible for t_i, i < j).
std::vector<MuEstimate> mu_profile(const Integrand& f, const RecessionFn& finf, const std::vector<double>& t_grid,
                                   const MuOptions& options = {});

struct GrowthCheck {
  bool linear_growth = true;
  double worst_ratio = 0.0;  // max |f| / (|xi| + 1) / C
};

/// Random spot-check of |f(x, xi)| <= C (|xi| + 1).
GrowthCheck check_growth(const Integrand& f, const std::vector<Point>& xs, int samples = 200, std::uint64_t seed = 7);

}  // namespace wlsc
