#pragma once

#include "wlsc/bv_function.hpp"
#include "wlsc/compact_set.hpp"

#include <cstddef>
#include <vector>

namespace wlsc {

struct CoverSpec {
  std::vector<CompactSet> sets;  // K_1, ..., K_J; the last component takes the remainder
};

struct DecomposeOptions {
  /// Cutoff phi_n = clamp(c - c n d(x, K), 0, 1): 1 on (K)_{1/(2n)} for c = 2.
  double cutoff_sharpness = 2.0;
  /// Nominal cutoff gradient bound 2n (1 + gradient_slack) used by the checks.
  double gradient_slack = 0.5;
  bool select_subsequence = true;
  /// Selection also requires | |Du_k|((K_1)_{1/(2m)}) - S_m | <= 1/n for grid m <= n,
  /// with the last member standing in for the limit.
  bool match_s_table = true;
  std::vector<double> deltas{1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  double charge_threshold = 1e-3;
};

struct DecompositionStep {
  int n = 0;
  std::size_t k = 0;                        // 1-based index of the selected member
  BVFunction member;                        // u_{k(n)}
  std::vector<BVFunction> components;       // J entries summing to member
  std::vector<std::vector<double>> cutoffs; // J - 1 vertex-value cutoffs
  std::vector<double> coupling;             // int |r_{j-1} (x) grad phi_j| per stage
};

struct SmRow {
  int m = 0;
  double s_m = 0.0;        // |Du_last|((K_1)_{1/(2m)}), the last member standing in for the limit
  double deviation = 0.0;  // sup_{m <= n <= n_max} | |Du_{k(n)}|((K_1)_{1/(2m)}) - s_m |
  bool within = true;      // each deviation at index n is <= 1/n
};

struct DecompositionResult {
  CoverSpec cover;
  DecomposeOptions options;
  std::vector<DecompositionStep> steps;  // n = 1..n_max
  std::vector<std::size_t> subsequence;  // k(n)
  std::vector<SmRow> s_table;
  bool s_monotone = true;
  bool s_within = true;
  bool covered = true;                   // every mesh vertex lies in some K_j
  std::size_t uncovered_vertices = 0;
};

/// Iterated two-set splitting with piecewise-affine cutoffs and greedy-first
/// subsequence selection (smallest k > k(n-1) with coupling <= 1/n at every
/// stage and, optionally, the S_m table within 1/n).  Throws "prefix too
/// short" when the sequence runs out.
DecompositionResult local_decompose(const std::vector<BVFunction>& seq, const CoverSpec& cover, int n_max,
                                    const DecomposeOptions& options = {});

struct CellViolation {
  int n = 0;
  int component = 0;  // 1-based
  std::size_t cell = 0;
  double excess = 0.0;
};

struct VerificationReport {
  double reassembly_error = 0.0;   // max over n of sup |sum_j u_{j,n} - u_{k(n)}| over cell data and atoms
  bool reassembly_ok = false;      // <= 1e-14 (1 + sup |u|)
  bool property_i = false;
  std::vector<CellViolation> violations;
  std::vector<double> recorded_slack;  // per n: sum over cells of the allowance beyond |Du_n|
  bool supports_ok = false;            // discrete support inclusions, up to one cell
  std::vector<ChargeReport> property_ii;  // for components j >= 2 against K_1 u ... u K_{j-1}
  bool property_ii_ok = false;
};

/// Cellwise and chargewise check of |Du_{j,n}| <= |Du_n| + |c|/n + recorded slack,
/// support inclusions, and the charge table of later components.
VerificationReport verify_properties(const DecompositionResult& result);

/// int_c |u| for one cell (exact in 1D for scalar data).
double cell_l1(const BVFunction& u, std::size_t c);

}  // namespace wlsc
