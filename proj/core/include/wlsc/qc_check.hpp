#pragma once

#include "wlsc/integrand.hpp"
#include "wlsc/minimize.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wlsc {

/// Outcome of a single numerical test.  "Plausible" is evidence at the given
/// budget; "Violated" always comes with a witness.
enum class CheckVerdict { Plausible, Violated, Unsupported };

std::string to_string(CheckVerdict v);

struct QcOptions {
  std::vector<double> L_grid{1.0, 4.0, 16.0};
  double h = 0.125;          // unit-square mesh size
  double tol_factor = 1e-6;  // tol = tol_factor |B| (1 + |xi|)
  SolverOptions solver{};
};

struct QcRow {
  double L = 0.0;
  double deficit = 0.0;
  bool low_confidence = false;
  int iterations = 0;
};

struct QcReport {
  Matrix xi;
  double deficit = 0.0;  // min over the L grid
  double tol = 0.0;
  std::vector<QcRow> table;
  CheckVerdict verdict = CheckVerdict::Plausible;
  std::optional<TestField> witness;
  bool low_confidence = false;
};

/// Unit square mesh clamped on its whole boundary.
MeshPtr unit_square_mesh(double h);
/// (0,1) in 1D, the unit square in 2D.
MeshPtr unit_cube_mesh(int dim, double h);
std::vector<bool> boundary_clamping(const Mesh& mesh);

/// inf over P1 fields phi with phi = 0 on the boundary and |grad phi| <= L of
/// int_B (g(xi + grad phi) - g(xi)) dy on the unit square B.  g must be x-free
/// (freeze it first).  Runs for larger L are warm-started from the previous
/// witness, so the table is non-increasing in L.
QcReport qc_deficit(const Integrand& g, const Matrix& xi, const MeshPtr& square, const QcOptions& options = {});
QcReport qc_deficit(const Integrand& g, const Matrix& xi, const QcOptions& options = {});

}  // namespace wlsc
