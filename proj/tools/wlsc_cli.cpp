// Scenario runner: analyze, liminf, decompose, recession.
// Exit codes: 0 on completion (any verdict), 1 on execution error, 2 on schema error.

#include "wlsc/verdict.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> h;
  std::string out_dir;
};

int run(const std::string& config, wlsc::Command command, const Overrides& o) {
  wlsc::Scenario s;
  try {
    s = wlsc::load_scenario(config);
    if (o.seed) s.seed = *o.seed;
    if (o.workers) {
      if (*o.workers < 0) throw wlsc::SchemaError("--workers", 0, "workers must be non-negative");
      s.workers = *o.workers;
    }
    if (o.h) {
      if (!(*o.h > 0)) throw wlsc::SchemaError("--h", 0, "mesh size must be positive");
      s.solver.qslb_h = *o.h;
    }
  } catch (const wlsc::SchemaError& e) {
    std::cerr << config << ": schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const wlsc::Artifacts a = wlsc::run_scenario(s, command);
    const std::string dir = o.out_dir.empty() ? "out/" + s.name : o.out_dir;
    wlsc::write_artifacts(a, dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Timing goes to the log only; the report stays byte-identical across runs.
    spdlog::info("{}: finished in {:.2f} s", s.name, secs);
    if (a.report.contains("verdict")) std::cout << "verdict: " << a.report["verdict"]["overall"].get<std::string>() << "\n";
    for (const auto& e : a.report["errors"]) std::cout << "error: " << e.get<std::string>() << "\n";
    std::cout << "report: " << dir << "/report.json\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak* lower semicontinuity checks for integral functionals on BV"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Overrides o;
  std::uint64_t seed = 0;
  int workers = 0;
  double h = 0.0;
  app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--workers", workers, "Worker threads per solve (0: hardware concurrency)");
  app.add_option("--out-dir", o.out_dir, "Output directory (default out/<scenario name>)");
  app.add_option("--h", h, "Override the half-ball mesh size");

  std::string config;
  wlsc::Command command = wlsc::Command::Analyze;
  const std::pair<const char*, wlsc::Command> subs[] = {
      {"analyze", wlsc::Command::Analyze},
      {"liminf", wlsc::Command::Liminf},
      {"decompose", wlsc::Command::Decompose},
      {"recession", wlsc::Command::Recession},
  };
  for (const auto& [name, cmd] : subs) {
    auto* sub = app.add_subcommand(name, std::string("Run the ") + name + " command on a scenario file");
    sub->fallthrough();
    sub->add_option("config", config, "Scenario JSON file")->required();
    sub->callback([&command, cmd = cmd] { command = cmd; });
  }
  CLI11_PARSE(app, argc, argv);
  if (app.count("--seed")) o.seed = seed;
  if (app.count("--workers")) o.workers = workers;
  if (app.count("--h")) o.h = h;
  return run(config, command, o);
}
