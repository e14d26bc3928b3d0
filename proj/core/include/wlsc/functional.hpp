#pragma once

#include "wlsc/bv_function.hpp"
#include "wlsc/integrand.hpp"

#include <vector>

namespace wlsc {

struct ChargeContribution {
  Point location = Point::Zero();
  int facet = -1;
  double mass = 0.0;
  double value = 0.0;  // f^inf(x, polar) * mass
};

/// F(u) (or G(mu)) with its bulk/singular split.  total == bulk + singular.
struct FunctionalValue {
  double total = 0.0;
  double bulk = 0.0;
  double singular = 0.0;
  std::vector<double> per_cell;
  std::vector<ChargeContribution> per_charge;
};

struct EvalOptions {
  int quadrature_order = 2;  // 1..3
};

/// Quadrature points (physical) and weights (summing to the cell measure).
struct CellQuadrature {
  std::vector<Point> points;
  std::vector<double> weights;
};
CellQuadrature cell_quadrature(const Mesh& mesh, std::size_t c, int order);

/// G(mu) = int f(x, d mu/dL^N) dx + int f^inf(x, d mu/d|mu^s|) d|mu^s|.
FunctionalValue eval_G(const Integrand& f, const RecessionFn& finf, const MatrixMeasure& mu,
                       const EvalOptions& options = {});

/// F(u) = G(Du).
FunctionalValue eval_F(const Integrand& f, const RecessionFn& finf, const BVFunction& u,
                       const EvalOptions& options = {});

// ---------------------------------------------------------------------------
// Continuity of G under convergence in total variation.

struct MeasurePair {
  int n = 0;
  MatrixMeasure mu, lambda;
};

struct ContinuityRow {
  int n = 0;
  double tv_gap = 0.0;  // |mu_n - lambda_n|(Omega)
  double g_gap = 0.0;   // |G(mu_n) - G(lambda_n)|
  double mass = 0.0;    // max(|mu_n|, |lambda_n|)
};

enum class ContinuityVerdict { Consistent, Inconsistent, Refused };

struct ContinuityReport {
  std::vector<ContinuityRow> rows;
  ContinuityVerdict verdict = ContinuityVerdict::Refused;
  std::string reason;
};

struct ContinuityOptions {
  double tv_threshold = 5e-2;
  double g_threshold = 5e-2;
  double mass_growth = 1.5;  // tail max / head max above this means unbounded
};

/// Throws when the masses are unbounded; refuses a verdict when the TV gap
/// does not tend to zero.
ContinuityReport uniform_continuity_probe(const Integrand& f, const RecessionFn& finf, const std::vector<MeasurePair>& pairs,
                                          const ContinuityOptions& options = {});

// ---------------------------------------------------------------------------
// Asymptotic additivity of decompositions.

struct AdditivityCase {
  int n = 0;
  BVFunction u;                       // u_n
  std::vector<BVFunction> components; // u_{1,n} + ... + u_{J,n} == u_n
};

struct AdditivityRow {
  int n = 0;
  double whole = 0.0;        // F(u_n + v) - F(v)
  double parts = 0.0;        // sum_j F(u_{j,n} + v) - F(v)
  double residual = 0.0;     // |whole - parts|
};

struct AdditivityReport {
  std::vector<AdditivityRow> rows;
  bool additive = false;
  double threshold = 0.0;
};

AdditivityReport additivity_residual(const Integrand& f, const RecessionFn& finf, const BVFunction& v,
                                     const std::vector<AdditivityCase>& cases, double threshold = 1e-2,
                                     const EvalOptions& options = {});

// ---------------------------------------------------------------------------
// F(u + u_n) - F(u) - F(u_n) + F(0), accumulated pointwise in one pass.

struct FourTermResidual {
  double absolute = 0.0;
  double relative = 0.0;  // absolute / (1 + |Du_n|(Omega))
  double tv = 0.0;        // |Du_n|(Omega)
};

FourTermResidual four_term_residual(const Integrand& f, const RecessionFn& finf, const BVFunction& u,
                                    const BVFunction& un, const EvalOptions& options = {});

}  // namespace wlsc
