#pragma once

#include "wlsc/integrand.hpp"
#include "wlsc/minimize.hpp"
#include "wlsc/qc_check.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wlsc {

struct QslbOptions {
  double h = 0.05;
  double tol = 1e-3;
  SolverOptions solver{};
};

struct QslbReport {
  Point x0 = Point::Zero();
  Point normal = Point(1.0, 0.0);
  int dim = 1;
  double deficit = 0.0;  // inf of int_D f^inf(x0, grad phi) / int_D |grad phi|
  double bound = 0.0;    // sampled max_{|xi|=1} |f^inf(x0, xi)|
  double tol = 0.0;
  CheckVerdict verdict = CheckVerdict::Plausible;
  std::optional<TestField> witness;  // normalized to int |grad phi| = 1
  bool low_confidence = false;
  int iterations = 0;
  std::string reason;
};

/// Canonical half-ball D_nu = {|y| < 1, y . nu < 0} meshed at size h.
MeshPtr halfball_mesh(int dim, const Point& normal, double h);
/// Clamped on the curved part (and its end points), free on the flat facet interior.
std::vector<bool> halfball_clamping(const Mesh& mesh, const Point& normal);

/// Frozen recession integrand f^inf(x0, .) as an x-free integrand.
Integrand frozen_recession(const RecessionFn& finf, const Point& x0, int rows, int cols);

/// Sign test of the half-ball recession integral through its normalized quotient.
QslbReport halfball_deficit(const RecessionFn& finf, int rows, const BoundaryPoint& x0, const MeshPtr& mesh,
                            const QslbOptions& options = {});
QslbReport halfball_deficit(const RecessionFn& finf, int rows, int dim, const BoundaryPoint& x0,
                            const QslbOptions& options = {});

/// Same quotient on Omega cap B_delta(x0): clamped on the sphere part, free on the domain boundary.
QslbReport patch_quotient(const RecessionFn& finf, int rows, const Point& x0, const Patch& patch,
                          const QslbOptions& options = {});

struct EpsDeltaOptions {
  std::vector<double> eps_grid{0.1, 0.5};
  std::vector<double> delta_grid{0.1, 0.25};
  std::vector<double> R_grid{1.0, 10.0, 100.0};
  PatchOptions patch{};
  double tol = 1e-3;
  double growth_ratio = 5.0;  // min(R_max) <= growth_ratio * min(R_prev) signals linear decrease
  SolverOptions solver{};
};

struct EpsDeltaRow {
  double eps = 0.0;
  double delta = 0.0;
  std::vector<double> minima;  // parallel to R_grid
  bool unbounded = false;
};

struct EpsDeltaReport {
  Point x0 = Point::Zero();
  std::vector<double> R_grid;
  std::vector<EpsDeltaRow> rows;
  /// Some eps shows the unbounded-below signature for every delta.
  bool violated = false;
  bool low_confidence = false;
};

/// min over patch fields v (clamped on the sphere part, int |grad v| <= R) of
/// int f(x, grad v) + eps int |grad v|.
EpsDeltaReport epsdelta_probe(const Integrand& f, const Point& x0, const Mesh& mesh, const EpsDeltaOptions& options = {});

struct FormResult {
  std::string form;  // frozen | unfrozen | halfball | qc_at_0
  bool ran = false;
  CheckVerdict verdict = CheckVerdict::Unsupported;
  double value = 0.0;
  std::string reason;
};

struct EquivalenceOptions {
  double delta = 0.25;
  double h = 0.05;
  QslbOptions qslb{};
  EpsDeltaOptions epsdelta{};
  QcOptions qc{};
  bool run_unfrozen = true;
};

struct EquivalenceReport {
  Point x0 = Point::Zero();
  bool interior = false;
  std::vector<FormResult> forms;
  bool agree = false;
};

/// Runs the frozen patch quotient, the unfrozen eps-delta probe, the half-ball
/// test (flat boundary points only) and, for interior points, qc of f^inf at 0.
EquivalenceReport equivalence_harness(const Integrand& f, const RecessionFn& finf, const Domain& domain,
                                      const Point& x0, const EquivalenceOptions& options = {});

}  // namespace wlsc
