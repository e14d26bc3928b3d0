#pragma once

#include "wlsc/compact_set.hpp"
#include "wlsc/integrand.hpp"
#include "wlsc/mesh.hpp"
#include "wlsc/sequences.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wlsc {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr const char* kReportSchema = "wlsc-report/1";

struct IntegrandSpec {
  std::string tag = "norm";
  catalog::Params params{};
  double scale = 1.0;
};

Integrand make_integrand(const IntegrandSpec& spec);

struct CheckToggles {
  bool qc = true;
  bool qslb = true;
  bool equivalence = false;
  bool sequences = false;
  bool decomposition = false;
  bool recession = false;
};

struct SamplingSpec {
  std::vector<Point> interior_points;
  int interior_count = 1;          // quasi-random interior points added to the explicit ones
  std::vector<Point> boundary_points;
  bool edge_midpoints = true;      // polygons: every edge midpoint; intervals: both end points
  int random_xi = 1;               // qc samples from the ball of radius 2 (besides xi = 0)
  int rank_one_xi = 1;             // qc samples a (x) b
};

struct SolverSpec {
  int restarts = 8;
  int max_iter = 500;
  double qc_h = 0.125;
  double qslb_h = 0.05;
  double tol = 1e-3;                  // qslb and liminf tolerance
  std::vector<double> refinement_h;   // half-ball deficit-vs-h curve at the first boundary sample
};

struct DecompositionSpec {
  std::vector<CompactSet> cover;
  nlohmann::json cover_json = nlohmann::json::array();  // echoed in the report
  int n_max = 64;
  int prefix = 256;                  // members u_1..u_prefix offered to the selection
  double h = 1.0 / 512;
};

struct RecessionSpec {
  int samples = 100;
  std::vector<double> t_grid{1e2, 1e3, 1e4, 1e5, 1e6};
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "scenario";
  nlohmann::json domain_json;       // echoed in the report
  Domain domain = Domain::interval(0.0, 1.0);
  IntegrandSpec integrand;
  CheckToggles checks;
  SamplingSpec sampling;
  SolverSpec solver;
  std::uint64_t seed = 20240601;
  int workers = 0;
  SequenceSpec sequence;
  nlohmann::json sequence_json = nlohmann::json::object();
  DecompositionSpec decomposition;
  RecessionSpec recession;
};

/// Schema violation: `path` is a JSON pointer, `line` is 0 when unknown.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, int line, const std::string& message);
  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

/// Parses and validates a scenario.  `text` is used to attach line numbers.
Scenario parse_scenario(const nlohmann::json& config, const std::string& text = {});
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

/// The scenario with every default filled in.
nlohmann::json scenario_to_json(const Scenario& scenario);

}  // namespace wlsc
