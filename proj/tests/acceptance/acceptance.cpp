// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include "generators.hpp"

#include "wlsc/decompose.hpp"
#include "wlsc/functional.hpp"
#include "wlsc/qc_check.hpp"
#include "wlsc/qslb_check.hpp"
#include "wlsc/scenario.hpp"
#include "wlsc/sequences.hpp"
#include "wlsc/verdict.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace wlsc;
using namespace wlsc::testing;

namespace {

const std::string kDir = WLSC_SCENARIO_DIR;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  // Records a failed condition without stopping, so one line lists every miss.
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

catalog::Params params_for(int rows, int cols) {
  catalog::Params p;
  p.rows = rows;
  p.cols = cols;
  p.matrix = Matrix::Constant(rows, cols, 0.7);
  p.a = Vector::Ones(rows);
  p.t = Vector::Zero(cols);
  p.t(cols - 1) = 1.0;
  return p;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

SequenceSpec jump_spec(double a, double b) {
  SequenceSpec s;
  s.kind = SequenceKind::JumpMigration;
  s.domain = Domain::interval(a, b);
  s.h = 0.125;
  return s;
}

double energy(const Integrand& f, const BVFunction& u) { return eval_F(f, recession_of(f), u).total; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome example_1_2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Integrand f = catalog::linear(mat11(1.0));
  const SequenceSpec s = jump_spec(0, 1);
  double worst = 0.0;
  for (int n = 2; n <= 64; ++n) worst = std::max(worst, std::abs(energy(f, generate(s, n)) + 1.0));
  o.expect(worst <= 1e-12, fmt::format("max |F(u_n) + 1| = {:.3g}", worst));
  const double f0 = energy(f, BVFunction::zero(generate(s, 2).mesh_ptr(), 1));
  o.expect(std::abs(f0) <= 1e-12, fmt::format("F(0) = {:.3g}", f0));
  o.expect(empirical_liminf(f, recession_of(f), s, index_grid(1, 64)).violated, "liminf not violated");

  QslbOptions q;
  q.h = 0.05;
  const QslbReport hb = halfball_deficit(recession_of(f), 1, 1, {Point(0, 0), Point(-1, 0)}, q);
  o.expect(hb.deficit <= -0.9, fmt::format("halfball deficit {:.4f}", hb.deficit));

  Scenario sc = load_scenario(kDir + "/example_1_2.json");
  sc.checks.decomposition = false;
  sc.checks.recession = false;
  const Verdict v = analyze(sc);
  o.expect(v.overall == Overall::NotWlsc, "overall " + to_string(v.overall));
  o.expect(v.certificate.has_value() && v.certificate->certified, "no necessity certificate");
  bool witness = false;
  for (const auto& b : v.boundary)
    if (b.halfball && b.halfball->witness && b.x.norm() < 1e-12) witness = true;
  o.expect(witness, "no half-ball witness at x0 = 0");
  const double secs = seconds_since(t0);
  o.expect(secs < 5.0, fmt::format("runtime {:.2f} s", secs));
  o.notes.push_back(fmt::format("F(u_n) = -1 for n = 2..64, deficit {:.4f}, {:.2f} s", hb.deficit, secs));
  return o;
}

Outcome extended_domain() {
  Outcome o;
  const Integrand f = catalog::linear(mat11(1.0));
  const SequenceSpec s = jump_spec(-1, 1);
  double worst = 0.0;
  for (int n = 2; n <= 64; ++n) worst = std::max(worst, std::abs(energy(f, generate(s, n))));
  o.expect(worst <= 1e-12, fmt::format("max |F(u_n)| = {:.3g}", worst));
  o.expect(!empirical_liminf(f, recession_of(f), s, index_grid(2, 64)).violated, "liminf violated");
  Scenario sc = load_scenario(kDir + "/example_1_2_extended.json");
  const Verdict v = analyze(sc);
  o.expect(v.liminf.has_value() && !v.liminf->violated, "scenario liminf violated");
  o.notes.push_back(fmt::format("max |F(u_n)| = {:.2g} for n = 2..64", worst));
  return o;
}

Outcome qc_catalog() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const QcOptions opts;
  const QcReport neg = qc_deficit(catalog::negnorm(1, 2), Matrix::Zero(1, 2), opts);
  o.expect(neg.deficit < -0.5, fmt::format("negnorm deficit {:.4f}", neg.deficit));
  o.expect(neg.verdict == CheckVerdict::Violated && neg.witness.has_value(), "negnorm not violated with witness");
  Gen g(2024);
  double convex_min = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Matrix xi = g.matrix(1, 2, 2.0);
    for (const Integrand& f : {catalog::norm(1, 2), catalog::area(1, 2)}) {
      const double d = qc_deficit(f, xi, opts).deficit;
      convex_min = std::min(convex_min, d);
      o.expect(d >= -1e-6, fmt::format("{} deficit {:.3g}", f.tag(), d));
    }
  }
  double linear_max = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = qc_deficit(catalog::linear(g.matrix(2, 2)), g.matrix(2, 2), opts).deficit;
    linear_max = std::max(linear_max, std::abs(d));
  }
  o.expect(linear_max <= 1e-8, fmt::format("linear |deficit| {:.3g}", linear_max));
  const double secs = seconds_since(t0);
  o.expect(secs < 30.0, fmt::format("runtime {:.2f} s", secs));
  o.notes.push_back(fmt::format("negnorm {:.4f}, convex min {:.2g}, linear max {:.2g}, {:.2f} s", neg.deficit,
                                convex_min, linear_max, secs));
  return o;
}

Outcome qslb_catalog() {
  Outcome o;
  QslbOptions q;
  q.h = 0.05;
  const Point nu(0, -1);
  const Vector a = vec2(0.6, 0.8);
  const Integrand normal = catalog::linear(outer(a, vec2(nu.x(), nu.y())));
  const QslbReport rn = halfball_deficit(recession_of(normal), 2, 2, {Point::Zero(), nu}, q);
  o.expect(rn.deficit <= -0.9 * a.norm(), fmt::format("normal component {:.4f}", rn.deficit));
  const Integrand tangential = catalog::boundary_null_lagrangian(a, vec2(1, 0), vec2(nu.x(), nu.y()));
  const QslbReport rt = halfball_deficit(recession_of(tangential), 2, 2, {Point::Zero(), nu}, q);
  o.expect(std::abs(rt.deficit) <= 1e-3, fmt::format("tangential {:.3g}", rt.deficit));
  const QslbReport rm = halfball_deficit(recession_of(catalog::norm(1, 2)), 1, 2, {Point::Zero(), nu}, q);
  o.expect(std::abs(rm.deficit - 1.0) <= 1e-6, fmt::format("norm {:.8f}", rm.deficit));
  o.notes.push_back(fmt::format("normal {:.4f} (|a| = 1), tangential {:.2g}, norm {:.8f}", rn.deficit, rt.deficit,
                                rm.deficit));
  return o;
}

Outcome recession() {
  Outcome o;
  Gen g(5);
  const std::vector<Integrand> fs{catalog::area(2, 2), catalog::linear(g.matrix(2, 2)), catalog::norm_plus_sin(2, 2)};
  double worst = 0.0;
  for (const Integrand& f : fs) {
    for (int i = 0; i < 100; ++i) {
      const Point x(g.uniform(), g.uniform());
      const Matrix xi = g.matrix(2, 2);
      const double err = std::abs(recession_estimate(f, x, xi).value - f.recession(x, xi));
      worst = std::max(worst, err);
    }
  }
  o.expect(worst <= 1e-4, fmt::format("max error {:.3g}", worst));
  const std::vector<double> grid{1, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  double last = 0.0;
  for (const Integrand& f : fs) {
    const auto prof = mu_profile(f, recession_of(f), grid);
    for (std::size_t i = 1; i < prof.size(); ++i)
      o.expect(prof[i].sampled <= prof[i - 1].sampled, f.tag() + " mu increases");
    o.expect(prof.back().sampled < 1e-3, fmt::format("{} mu(1e6) = {:.3g}", f.tag(), prof.back().sampled));
    last = std::max(last, prof.back().sampled);
  }
  o.notes.push_back(fmt::format("max |estimate - analytic| {:.2g} over 300 samples, max mu(1e6) {:.2g}", worst, last));
  return o;
}

// ---------------------------------------------------------------------------

struct DecompositionCase {
  std::string name;
  std::vector<BVFunction> seq;
  CoverSpec cover;
};

std::vector<DecompositionCase> decomposition_cases() {
  std::vector<DecompositionCase> out;
  SequenceSpec jump = jump_spec(0, 1);
  jump.h = 1.0 / 512;
  jump.n_max = 256;
  DecompositionCase ex{"example_1_2", {}, {{CompactSet::point(Point(0, 0)), CompactSet::interval(0.125, 1)}}};
  for (int k = 1; k <= 256; ++k) ex.seq.push_back(generate(jump, k));
  out.push_back(std::move(ex));

  const MeshPtr m = interval_mesh(0, 1, 1.0 / 512);
  // sin(2 pi k x) / k^3: weak* null with vanishing variation.
  DecompositionCase osc{"oscillation", {},
                        {{CompactSet::interval(0.4, 0.6),
                          CompactSet::interval(0, 0.4).united(CompactSet::interval(0.6, 1))}}};
  for (int k = 1; k <= 256; ++k)
    osc.seq.push_back(BVFunction::interpolate(m, 1, [k](const Point& p) {
      return scalar(std::sin(2 * std::numbers::pi * k * p.x()) / (double(k) * k * k));
    }));
  out.push_back(std::move(osc));

  // chi_(0, 1/k) - chi_(1 - 1/k, 1): jumps migrating to both end points.
  DecompositionCase two{"two_sided", {}, {{CompactSet::interval(0, 0.5), CompactSet::interval(0.5, 1)}}};
  for (int k = 1; k <= 256; ++k) {
    std::vector<BVFunction::CellValues> cells(m->num_cells(), {scalar(1), scalar(1), scalar(0)});
    two.seq.emplace_back(m, 1, cells, std::vector<Atom>{{1.0 / k, scalar(-1)}, {1.0 - 1.0 / k, scalar(-1)}});
  }
  out.push_back(std::move(two));
  return out;
}

Outcome decomposition() {
  Outcome o;
  double worst_reassembly = 0.0, worst_charge = 0.0, worst_additivity = 0.0;
  for (const auto& c : decomposition_cases()) {
    const DecompositionResult r = local_decompose(c.seq, c.cover, 64);
    const VerificationReport v = verify_properties(r);
    worst_reassembly = std::max(worst_reassembly, v.reassembly_error);
    o.expect(v.reassembly_error <= 1e-14, fmt::format("{} reassembly {:.3g}", c.name, v.reassembly_error));
    o.expect(v.property_i && v.recorded_slack.size() == r.steps.size(), c.name + " property (i)");
    o.expect(v.property_ii_ok, c.name + " property (ii)");
    for (const auto& row : v.property_ii) {
      worst_charge = std::max(worst_charge, row.sup_mass.back());
      o.expect(row.sup_mass.back() < 1e-3, fmt::format("{} charge {:.3g}", c.name, row.sup_mass.back()));
    }

    std::vector<AdditivityCase> cases;
    // Monotonicity is read from the first index whose cutoff vanishes somewhere:
    // before that the transition layer covers the whole domain and nothing is localized.
    std::size_t localized = 0;
    for (int n : index_grid(1, 64)) {
      const auto& st = r.steps[static_cast<std::size_t>(n - 1)];
      if (localized == 0 && *std::min_element(st.cutoffs[0].begin(), st.cutoffs[0].end()) == 0.0)
        localized = cases.size() + 1;
      cases.push_back({n, st.member, st.components});
    }
    o.expect(localized > 0, c.name + " cutoffs never localize");
    for (const auto& tag : catalog::tags()) {
      const Integrand f = catalog::get(tag, params_for(1, 1));
      const AdditivityReport a =
          additivity_residual(f, recession_of(f), BVFunction::zero(c.seq.front().mesh_ptr(), 1), cases);
      // Exactly additive cases sit at zero, so decrease is read as non-increasing.
      for (std::size_t i = std::max<std::size_t>(localized, 1); i < a.rows.size(); ++i)
        o.expect(a.rows[i].residual <= a.rows[i - 1].residual + 1e-14,
                 fmt::format("{} {} residual rises at n = {}", c.name, tag, a.rows[i].n));
      const double last = a.rows.back().residual;
      worst_additivity = std::max(worst_additivity, last);
      o.expect(last < 1e-2, fmt::format("{} {} residual {:.3g}", c.name, tag, last));
    }
  }
  o.notes.push_back(fmt::format("reassembly {:.2g}, charge {:.2g}, additivity at n = 64 {:.2g}", worst_reassembly,
                                worst_charge, worst_additivity));
  return o;
}

Outcome equivalence() {
  Outcome o;
  EquivalenceOptions opts;
  opts.h = 0.1;
  opts.qc.h = 0.25;
  int agreements = 0, total = 0;
  for (const auto& tag : catalog::tags()) {
    const Integrand f = catalog::get(tag, params_for(1, 2));
    for (const Point& x0 : {Point(0.5, 0.5), Point(0.3, 0.7)}) {
      ++total;
      const EquivalenceReport r = equivalence_harness(f, recession_of(f), Domain::unit_square(), x0, opts);
      const FormResult* frozen = nullptr;
      const FormResult* qc0 = nullptr;
      for (const auto& form : r.forms) {
        if (form.form == "frozen") frozen = &form;
        if (form.form == "qc_at_0") qc0 = &form;
      }
      const bool ok = r.interior && frozen && qc0 && frozen->ran && qc0->ran && frozen->verdict == qc0->verdict;
      if (ok) ++agreements;
      o.expect(ok, fmt::format("{} at ({}, {}) disagrees", tag, x0.x(), x0.y()));
    }
  }
  o.notes.push_back(fmt::format("{}/{} agreements", agreements, total));
  return o;
}

Outcome continuity() {
  Outcome o;
  const MeshPtr line = interval_mesh(0, 1, 1.0 / 64);
  const MeshPtr square = unit_square_mesh(0.125);
  const BVFunction step(line, 1,
                        std::vector<BVFunction::CellValues>(line->num_cells(), {scalar(0), scalar(0), scalar(0)}),
                        {{0.25, scalar(1.0)}, {0.75, scalar(-1.0)}});
  const BVFunction ramp = BVFunction::interpolate(line, 1, [](const Point& p) { return scalar(p.x() * p.x()); });
  const BVFunction bump = BVFunction::interpolate(square, 1, [](const Point& p) {
    return scalar(std::sin(std::numbers::pi * p.x()) * std::sin(std::numbers::pi * p.y()));
  });

  struct Family {
    std::string name;
    Integrand f;
    std::function<MeasurePair(int)> pair;
  };
  const MatrixMeasure d_step = derivative(step);
  const MatrixMeasure d_ramp = derivative(ramp);
  const MatrixMeasure d_bump = derivative(bump).scaled(1.0 / total_variation(derivative(bump)));
  const std::vector<Family> families{
      {"charge added to jumps (area)", catalog::area(1, 1),
       [&](int n) {
         MatrixMeasure lambda = d_step;
         lambda.add_charge(Point(0.5, 0), mat11(1.0 / n));
         return MeasurePair{n, d_step, lambda};
       }},
      {"scaled density (norm_plus_sin)", catalog::norm_plus_sin(1, 1),
       [&](int n) { return MeasurePair{n, d_ramp, d_ramp.scaled(1.0 + 1.0 / n)}; }},
      {"scaled 2D density (negnorm)", catalog::negnorm(1, 2),
       [&](int n) { return MeasurePair{n, d_bump, d_bump.scaled(1.0 + 1.0 / n)}; }},
  };
  std::string summary;
  for (const auto& fam : families) {
    std::vector<MeasurePair> pairs;
    for (int n = 2; n <= 64; n *= 2) pairs.push_back(fam.pair(n));
    const ContinuityReport r = uniform_continuity_probe(fam.f, recession_of(fam.f), pairs);
    for (const auto& row : r.rows)
      o.expect(std::abs(row.tv_gap - 1.0 / row.n) <= 1e-12, fmt::format("{} TV gap {:.3g}", fam.name, row.tv_gap));
    for (std::size_t i = 1; i < r.rows.size(); ++i)
      o.expect(r.rows[i].g_gap < r.rows[i - 1].g_gap, fam.name + " G gap not decreasing");
    o.expect(r.rows.back().g_gap < 0.05, fmt::format("{} G gap {:.3g}", fam.name, r.rows.back().g_gap));
    summary += fmt::format("{}{:.3g}", summary.empty() ? "G gaps at n = 64: " : ", ", r.rows.back().g_gap);
  }
  o.notes.push_back(summary);
  return o;
}

Outcome limit_formula() {
  Outcome o;
  const Integrand nrm = catalog::norm(1, 1);
  std::string summary;
  for (const Profile& p : {profiles::hat(1), profiles::skew(1)}) {
    const LimitEnergyReport r = limit_energy_check(nrm, recession_of(nrm), p, Domain::interval(0, 1),
                                                   {Point(0, 0), Point(-1, 0)}, {4, 16, 64});
    o.expect(r.rows.back().k == 64, p.name + " did not reach k = 64");
    o.expect(r.relative_gap <= 0.02, fmt::format("{} gap {:.3g}", p.name, r.relative_gap));
    summary += fmt::format("{}{} {:.2g}", summary.empty() ? "relative gaps: " : ", ", p.name, r.relative_gap);
  }
  o.notes.push_back(summary);
  return o;
}

Outcome determinism() {
  Outcome o;
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kDir)) {
    if (entry.path().extension() != ".json") continue;
    const Scenario s = load_scenario(entry.path().string());
    const std::string first = report_text(run_scenario(s));
    const std::string second = report_text(run_scenario(s));
    o.expect(first == second, entry.path().stem().string() + " differs between runs");
    const auto golden = std::filesystem::path(kDir) / "golden" / (entry.path().stem().string() + ".report.json");
    if (std::filesystem::exists(golden))
      o.expect(first == read_file(golden.string()), entry.path().stem().string() + " differs from its golden file");
    ++count;
  }
  o.expect(count > 0, "no bundled scenarios");
  o.notes.push_back(fmt::format("{} scenarios byte-identical", count));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 migrating jump on (0, 1)", example_1_2},
      {"C2 migrating jump on (-1, 1)", extended_domain},
      {"C3 qc deficits on the catalog", qc_catalog},
      {"C4 half-ball qslb on the catalog", qslb_catalog},
      {"C5 recession and modulus estimation", recession},
      {"C6 decomposition suite", decomposition},
      {"C7 interior equivalence", equivalence},
      {"C8 uniform-continuity probe", continuity},
      {"C9 limit formula", limit_formula},
      {"C10 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.notes.push_back(std::string("exception: ") + e.what());
    }
    if (!out.pass) ++failures;
    std::string detail;
    for (const auto& n : out.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
