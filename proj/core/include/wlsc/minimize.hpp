#pragma once

#include "wlsc/bv_function.hpp"
#include "wlsc/integrand.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace wlsc {

/// Continuous P1 test field, one value in R^M per vertex; clamped vertices are 0.
class TestField {
 public:
  TestField() = default;
  TestField(MeshPtr mesh, int components, std::vector<bool> clamped);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int components() const { return static_cast<int>(values.rows()); }
  const std::vector<bool>& clamped() const { return clamped_; }

  /// components x num_vertices.
  Eigen::MatrixXd values;

  Matrix cell_gradient(std::size_t c) const;
  /// Sets clamped columns to exactly zero.
  void apply_clamping();
  /// sum_c |c| |grad phi_c|
  double gradient_l1() const;
  double max_cell_gradient() const;
  BVFunction to_bv() const;

 private:
  MeshPtr mesh_;
  std::vector<bool> clamped_;
};

/// Objective over test fields with a subgradient oracle (components x vertices).
struct FieldObjective {
  std::function<double(const TestField&)> value;
  std::function<Eigen::MatrixXd(const TestField&, double smoothing)> subgradient;
  /// Optional single-pass value plus subgradient (written to `grad`).
  std::function<double(const TestField&, double smoothing, Eigen::MatrixXd& grad)> fused;

  double evaluate(const TestField& f, double smoothing, Eigen::MatrixXd& grad) const;
};

/// phi -> int g(x, grad phi) dx.  x-free integrands use the exact one-point rule.
FieldObjective integral_objective(const Integrand& g, int quadrature_order = 2);

/// phi -> int |grad phi| dx.
FieldObjective gradient_l1_objective();

enum class ConstraintMode {
  None,
  GradientCap,  // max_c |grad phi_c| <= cap
  L1Cap,        // int |grad phi| <= cap
  Normalized,   // minimize J(phi) / int |grad phi|, witness rescaled to int |grad phi| = 1
};

struct SolverOptions {
  int restarts = 8;
  int max_iter = 500;                                  // per descent, split over the smoothing stages
  double step0 = 0.2;                                  // relative to the field sup-norm
  std::vector<double> smoothing{1e-1, 1e-2, 1e-3};
  ConstraintMode constraint = ConstraintMode::None;
  double cap = 1.0;
  std::uint64_t seed = 20240601;
  int workers = 0;                                     // 0: hardware concurrency
  std::vector<TestField> warm_starts;                  // ranked with the deterministic starts
};

struct SolveResult {
  double value = 0.0;
  TestField witness;
  int iterations = 0;        // total over all descents
  int restarts = 0;          // descents actually run
  int best_restart = -1;     // -1: best is an unrefined start
  double stationarity = 0.0; // |projected subgradient| / (1 + |value|) at the end of the best descent
  bool low_confidence = false;
  std::uint64_t seed = 0;
  std::vector<double> restart_values;
};

/// Objective value under the constraint mode (the quotient in normalized mode).
double constrained_value(const FieldObjective& objective, const TestField& field, ConstraintMode mode);

/// Multi-start projected subgradient descent with smoothing continuation.
/// Starts: the zero field (except in normalized mode), signed ramps along the
/// distance to the clamped set, boundary layers at the free boundary, warm
/// starts and seeded Gaussian fields.  Deterministic for a fixed seed.
SolveResult minimize_field(const FieldObjective& objective, const MeshPtr& mesh, const std::vector<bool>& clamped,
                           int components, const SolverOptions& options = {});

/// Deterministic starting fields used by minimize_field (exposed for tests).
std::vector<TestField> deterministic_starts(const MeshPtr& mesh, const std::vector<bool>& clamped, int components);

}  // namespace wlsc
