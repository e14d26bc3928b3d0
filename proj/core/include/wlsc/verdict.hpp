#pragma once

#include "wlsc/decompose.hpp"
#include "wlsc/functional.hpp"
#include "wlsc/qc_check.hpp"
#include "wlsc/qslb_check.hpp"
#include "wlsc/scenario.hpp"
#include "wlsc/sequences.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wlsc {

/// "Plausible" wording: finite sampling cannot certify an almost-everywhere statement.
enum class Overall { WlscPlausible, NotWlsc, Inconclusive };

std::string to_string(Overall o);

struct QcSample {
  Point x = Point::Zero();
  std::string xi_kind;  // zero | random | rank_one
  QcReport report;
};

struct BoundarySample {
  Point x = Point::Zero();
  std::string route;  // halfball | epsdelta
  std::optional<QslbReport> halfball;
  std::optional<EpsDeltaReport> corner;
  CheckVerdict verdict = CheckVerdict::Unsupported;
  bool low_confidence = false;
};

struct RefinementRow {
  double h = 0.0;
  std::size_t cells = 0;
  double deficit = 0.0;
};

struct Verdict {
  Overall overall = Overall::Inconclusive;
  std::vector<QcSample> qc;
  std::vector<BoundarySample> boundary;
  std::vector<RefinementRow> refinement;
  std::optional<LiminfReport> liminf;
  std::optional<NecessityCertificate> certificate;
  std::vector<EquivalenceReport> equivalence;
  std::vector<std::string> violations;
  std::vector<std::string> errors;
};

/// Interior samples: explicit points plus Halton points strictly inside the domain.
std::vector<Point> interior_samples(const Scenario& s);
/// Boundary samples: explicit points plus edge midpoints (or interval end points).
std::vector<Point> boundary_samples(const Scenario& s);
/// xi samples for qc: 0, random matrices in the ball of radius 2, rank-one a (x) b.
std::vector<std::pair<std::string, Matrix>> xi_samples(const Scenario& s, int rows);

/// qc at interior samples, qslb at boundary samples (corners through the
/// eps-delta probe), and the sequence cross-check when toggled.  Sub-errors are
/// collected in the verdict and the run continues.
Verdict analyze(const Scenario& scenario);

struct DecompositionRun {
  DecompositionResult result;
  VerificationReport verification;
  AdditivityReport additivity;
};

DecompositionRun run_decomposition(const Scenario& scenario);

struct RecessionRow {
  Point x = Point::Zero();
  Matrix xi;
  double estimate = 0.0;
  std::optional<double> analytic;
  double observed_rate = 0.0;
};

struct RecessionRun {
  std::vector<RecessionRow> rows;
  double max_error = 0.0;  // vs analytic, when available
  std::vector<MuEstimate> mu;
  bool mu_monotone = true;
};

RecessionRun run_recession(const Scenario& scenario);

LiminfReport run_liminf(const Scenario& scenario);

/// Report JSON plus the files to write next to it (relative path -> contents).
/// No timing enters any artifact, so identical inputs give identical bytes.
struct Artifacts {
  nlohmann::json report;
  std::map<std::string, std::string> files;
};

enum class Command { Analyze, Liminf, Decompose, Recession };

/// Runs the command (analyze also runs the toggled extras) and renders artifacts.
Artifacts run_scenario(const Scenario& scenario, Command command = Command::Analyze);

/// Writes report.json and the artifact files under out_dir.
void write_artifacts(const Artifacts& artifacts, const std::string& out_dir);

/// Canonical text of the report (what write_artifacts stores as report.json).
std::string report_text(const Artifacts& artifacts);

}  // namespace wlsc
