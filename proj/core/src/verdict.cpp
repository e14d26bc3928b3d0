#include "wlsc/verdict.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace wlsc {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json point_json(const Point& p) { return json::array({p.x(), p.y()}); }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

std::string matrix_cell(const Matrix& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.size(); ++i) s += (i ? ";" : "") + num(m(i));
  return s;
}

std::string point_label(const Point& p) { return "(" + num(p.x()) + ", " + num(p.y()) + ")"; }

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

bool on_boundary(const Domain& d, const Point& p) {
  try {
    (void)boundary_point(d, p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

SolverOptions solver_options(const Scenario& s, std::uint64_t offset) {
  SolverOptions so;
  so.restarts = s.solver.restarts;
  so.max_iter = s.solver.max_iter;
  so.seed = s.seed + offset;
  so.workers = s.workers;
  return so;
}

json witness_json(const TestField& w) {
  const Mesh& m = w.mesh();
  json verts = json::array(), cells = json::array(), values = json::array(), clamped = json::array();
  for (const auto& v : m.vertices()) verts.push_back(point_json(v));
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    json cell = json::array();
    for (int v : m.cell(c)) cell.push_back(v);
    cells.push_back(cell);
  }
  for (Eigen::Index i = 0; i < w.values.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index v = 0; v < w.values.cols(); ++v) row.push_back(w.values(i, v));
    values.push_back(row);
  }
  for (bool b : w.clamped()) clamped.push_back(b);
  return {{"dim", m.dim()}, {"vertices", verts}, {"cells", cells}, {"clamped", clamped}, {"values", values},
          {"gradient_l1", w.gradient_l1()}};
}

json qc_json(const QcSample& q) {
  json table = json::array();
  for (const auto& r : q.report.table)
    table.push_back({{"L", r.L}, {"deficit", r.deficit}, {"low_confidence", r.low_confidence},
                     {"iterations", r.iterations}});
  return {{"x", point_json(q.x)},
          {"xi_kind", q.xi_kind},
          {"xi", matrix_json(q.report.xi)},
          {"deficit", q.report.deficit},
          {"tol", q.report.tol},
          {"verdict", to_string(q.report.verdict)},
          {"low_confidence", q.report.low_confidence},
          {"table", table}};
}

json boundary_json(const BoundarySample& b) {
  json j = {{"x", point_json(b.x)},
            {"route", b.route},
            {"verdict", to_string(b.verdict)},
            {"low_confidence", b.low_confidence}};
  if (b.halfball) {
    j["normal"] = point_json(b.halfball->normal);
    j["deficit"] = b.halfball->deficit;
    j["bound"] = b.halfball->bound;
    j["tol"] = b.halfball->tol;
    j["iterations"] = b.halfball->iterations;
  }
  if (b.corner) {
    json rows = json::array();
    for (const auto& r : b.corner->rows)
      rows.push_back({{"eps", r.eps}, {"delta", r.delta}, {"minima", r.minima}, {"unbounded", r.unbounded}});
    j["R_grid"] = b.corner->R_grid;
    j["epsdelta"] = rows;
  }
  return j;
}

json liminf_json(const LiminfReport& l) {
  json rows = json::array();
  for (const auto& r : l.rows)
    rows.push_back({{"n", r.n}, {"energy", r.energy}, {"gap", r.gap}, {"running_min", r.running_min}});
  return {{"limit_energy", l.limit_energy}, {"tail_min", l.tail_min}, {"tail_max", l.tail_max},
          {"tol", l.tol},                   {"violated", l.violated}, {"rows", rows}};
}

std::string liminf_csv(const LiminfReport& l) {
  std::string s = "n,energy,gap,running_min\n";
  for (const auto& r : l.rows)
    s += std::to_string(r.n) + "," + num(r.energy) + "," + num(r.gap) + "," + num(r.running_min) + "\n";
  return s;
}

std::vector<int> sequence_grid(const SequenceSpec& spec) { return index_grid(spec.n_min, spec.n_max); }

}  // namespace

std::string to_string(Overall o) {
  switch (o) {
    case Overall::WlscPlausible: return "wlsc-plausible";
    case Overall::NotWlsc: return "not-wlsc";
    case Overall::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::vector<Point> interior_samples(const Scenario& s) {
  std::vector<Point> out;
  for (const auto& p : s.sampling.interior_points)
    if (!on_boundary(s.domain, p)) out.push_back(p);
  const Domain& d = s.domain;
  Point lo, hi;
  if (d.kind == Domain::Kind::Interval) {
    lo = Point(d.a, 0.0);
    hi = Point(d.b, 0.0);
  } else {
    lo = hi = d.vertices.front();
    for (const auto& v : d.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  int added = 0;
  for (int i = 1; added < s.sampling.interior_count && i < 100000; ++i) {
    Point p(lo.x() + (hi.x() - lo.x()) * halton(i, 2), d.dim == 1 ? 0.0 : lo.y() + (hi.y() - lo.y()) * halton(i, 3));
    if (!d.contains(p) || on_boundary(d, p)) continue;
    out.push_back(p);
    ++added;
  }
  return out;
}

std::vector<Point> boundary_samples(const Scenario& s) {
  std::vector<Point> out;
  const Domain& d = s.domain;
  if (s.sampling.edge_midpoints) {
    if (d.kind == Domain::Kind::Interval) {
      out.emplace_back(d.a, 0.0);
      out.emplace_back(d.b, 0.0);
    } else {
      for (std::size_t i = 0; i < d.vertices.size(); ++i)
        out.push_back(0.5 * (d.vertices[i] + d.vertices[(i + 1) % d.vertices.size()]));
    }
  }
  for (const auto& p : s.sampling.boundary_points) out.push_back(p);
  return out;
}

std::vector<std::pair<std::string, Matrix>> xi_samples(const Scenario& s, int rows) {
  const int cols = s.domain.dim;
  std::vector<std::pair<std::string, Matrix>> out{{"zero", Matrix::Zero(rows, cols)}};
  std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int k = 0; k < s.sampling.random_xi; ++k) {
    Matrix xi(rows, cols);
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = nd(rng);
    const double radius = 2.0 * std::pow(ud(rng), 1.0 / static_cast<double>(xi.size()));
    out.emplace_back("random", xi * (radius / std::max(xi.norm(), 1e-300)));
  }
  for (int k = 0; k < s.sampling.rank_one_xi; ++k) {
    Vector a(rows), b(cols);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = nd(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = nd(rng);
    out.emplace_back("rank_one", outer(a, b));
  }
  return out;
}

Verdict analyze(const Scenario& s) {
  Verdict v;
  const Integrand f = make_integrand(s.integrand);
  const RecessionFn finf = recession_of(f);
  const int rows = f.rows();
  bool low_confidence = false;
  std::uint64_t offset = 0;

  if (s.checks.qc) {
    for (const Point& x : interior_samples(s)) {
      for (const auto& [kind, xi] : xi_samples(s, rows)) {
        try {
          QcOptions qo;
          qo.h = s.solver.qc_h;
          qo.solver = solver_options(s, ++offset);
          QcSample q{x, kind, qc_deficit(f.frozen(x), xi, unit_cube_mesh(s.domain.dim, qo.h), qo)};
          if (q.report.verdict == CheckVerdict::Violated)
            v.violations.push_back("qc at " + point_label(x) + " (xi " + kind + "): deficit " + num(q.report.deficit));
          low_confidence = low_confidence || q.report.low_confidence;
          v.qc.push_back(std::move(q));
        } catch (const std::exception& e) {
          v.errors.push_back("qc at " + point_label(x) + ": " + e.what());
        }
      }
    }
  }

  std::optional<QslbReport> first_violation;
  if (s.checks.qslb) {
    const auto samples = boundary_samples(s);
    for (const Point& x : samples) {
      BoundarySample b;
      b.x = x;
      try {
        const auto bp = boundary_point(s.domain, x);
        QslbOptions qo;
        qo.h = s.solver.qslb_h;
        qo.tol = s.solver.tol;
        qo.solver = solver_options(s, ++offset);
        if (bp) {
          b.route = "halfball";
          b.halfball = halfball_deficit(finf, rows, s.domain.dim, *bp, qo);
          b.verdict = b.halfball->verdict;
          b.low_confidence = b.halfball->low_confidence;
          if (b.verdict == CheckVerdict::Violated && !first_violation) first_violation = b.halfball;
        } else {
          b.route = "epsdelta";
          EpsDeltaOptions eo;
          eo.tol = s.solver.tol;
          eo.solver = qo.solver;
          b.corner = epsdelta_probe(f, x, build_mesh(s.domain, qo.h), eo);
          b.verdict = b.corner->violated ? CheckVerdict::Violated : CheckVerdict::Plausible;
          b.low_confidence = b.corner->low_confidence;
        }
        if (b.verdict == CheckVerdict::Violated)
          v.violations.push_back("qslb at " + point_label(x) + " (" + b.route + ")" +
                                 (b.halfball ? ": deficit " + num(b.halfball->deficit) : std::string()));
        low_confidence = low_confidence || b.low_confidence;
        v.boundary.push_back(std::move(b));
      } catch (const std::exception& e) {
        v.errors.push_back("qslb at " + point_label(x) + ": " + e.what());
      }
    }
    if (!s.solver.refinement_h.empty()) {
      for (const Point& x : samples) {
        std::optional<BoundaryPoint> bp;
        try {
          bp = boundary_point(s.domain, x);
        } catch (const Error&) {
        }
        if (!bp) continue;
        for (double h : s.solver.refinement_h) {
          try {
            QslbOptions qo;
            qo.h = h;
            qo.tol = s.solver.tol;
            qo.solver = solver_options(s, ++offset);
            const MeshPtr mesh = halfball_mesh(s.domain.dim, bp->normal, h);
            const QslbReport q = halfball_deficit(finf, rows, *bp, mesh, qo);
            v.refinement.push_back({h, mesh->num_cells(), q.deficit});
          } catch (const std::exception& e) {
            v.errors.push_back("refinement at h = " + num(h) + ": " + e.what());
          }
        }
        break;
      }
    }
  }

  if (s.checks.equivalence) {
    std::vector<Point> pts;
    const auto in = interior_samples(s);
    if (!in.empty()) pts.push_back(in.front());
    for (const Point& x : boundary_samples(s)) pts.push_back(x);
    for (const Point& x : pts) {
      try {
        EquivalenceOptions eo;
        eo.h = s.solver.qslb_h;
        eo.qslb.solver = eo.epsdelta.solver = eo.qc.solver = solver_options(s, ++offset);
        eo.qslb.h = s.solver.qslb_h;
        eo.qc.h = s.solver.qc_h;
        v.equivalence.push_back(equivalence_harness(f, finf, s.domain, x, eo));
        if (!v.equivalence.back().agree)
          v.errors.push_back("equivalence forms disagree at " + point_label(x));
      } catch (const std::exception& e) {
        v.errors.push_back("equivalence at " + point_label(x) + ": " + e.what());
      }
    }
  }

  if (s.checks.sequences) {
    try {
      v.liminf = empirical_liminf(f, finf, s.sequence, sequence_grid(s.sequence), s.solver.tol);
      if (v.liminf->violated)
        v.violations.push_back("liminf along " + to_string(s.sequence.kind) + ": tail max gap " +
                               num(v.liminf->tail_max));
    } catch (const std::exception& e) {
      v.errors.push_back("liminf: " + std::string(e.what()));
    }
    if (first_violation) {
      try {
        v.certificate = necessity_witness(f, finf, s.domain, *first_violation, -first_violation->deficit,
                                          sequence_grid(s.sequence), s.solver.tol);
      } catch (const std::exception& e) {
        v.errors.push_back("necessity witness: " + std::string(e.what()));
      }
    }
  }

  if (!v.violations.empty())
    v.overall = Overall::NotWlsc;
  else if (low_confidence || !v.errors.empty())
    v.overall = Overall::Inconclusive;
  else
    v.overall = Overall::WlscPlausible;
  return v;
}

DecompositionRun run_decomposition(const Scenario& s) {
  if (s.decomposition.cover.size() < 2) throw Error("decomposition needs a cover with at least two sets");
  SequenceSpec spec = s.sequence;
  spec.n_min = 1;
  spec.n_max = s.decomposition.prefix;
  spec.h = s.decomposition.h;
  std::vector<BVFunction> seq;
  for (int k = 1; k <= s.decomposition.prefix; ++k) seq.push_back(generate(spec, k));
  DecompositionRun run;
  run.result = local_decompose(seq, CoverSpec{s.decomposition.cover}, s.decomposition.n_max);
  run.verification = verify_properties(run.result);
  const Integrand f = make_integrand(s.integrand);
  std::vector<AdditivityCase> cases;
  for (int n : index_grid(1, s.decomposition.n_max)) {
    const auto& st = run.result.steps[static_cast<std::size_t>(n - 1)];
    cases.push_back({n, st.member, st.components});
  }
  run.additivity =
      additivity_residual(f, recession_of(f), BVFunction::zero(seq.front().mesh_ptr(), f.rows()), cases);
  return run;
}

RecessionRun run_recession(const Scenario& s) {
  const Integrand f = make_integrand(s.integrand);
  RecessionRun run;
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const auto xs = interior_samples(s);
  if (xs.empty()) throw Error("recession estimation needs an interior sample point");
  for (int i = 0; i < s.recession.samples; ++i) {
    RecessionRow row;
    row.x = xs[static_cast<std::size_t>(i) % xs.size()];
    row.xi = Matrix(f.rows(), f.cols());
    for (Eigen::Index k = 0; k < row.xi.size(); ++k) row.xi(k) = nd(rng);
    const RecessionEstimate e = recession_estimate(f, row.x, row.xi, s.recession.t_grid);
    row.estimate = e.value;
    row.observed_rate = e.observed_rate;
    if (f.has_recession()) {
      row.analytic = f.recession(row.x, row.xi);
      run.max_error = std::max(run.max_error, std::abs(*row.analytic - row.estimate));
    }
    run.rows.push_back(std::move(row));
  }
  MuOptions mo;
  mo.x_samples = {xs.front()};
  mo.seed = s.seed;
  run.mu = mu_profile(f, recession_of(f, s.recession.t_grid), s.recession.t_grid, mo);
  for (std::size_t i = 1; i < run.mu.size(); ++i)
    run.mu_monotone = run.mu_monotone && run.mu[i].sampled <= run.mu[i - 1].sampled;
  return run;
}

LiminfReport run_liminf(const Scenario& s) {
  const Integrand f = make_integrand(s.integrand);
  return empirical_liminf(f, recession_of(f), s.sequence, sequence_grid(s.sequence), s.solver.tol);
}

Artifacts run_scenario(const Scenario& s, Command command) {
  Artifacts a;
  json& r = a.report;
  r["schema"] = kReportSchema;
  r["scenario"] = scenario_to_json(s);
  json errors = json::array();

  const bool analyze_all = command == Command::Analyze;
  if (analyze_all) {
    const Verdict v = analyze(s);
    json qc = json::array(), boundary = json::array();
    std::string qc_csv = "x,y,xi_kind,xi,L,deficit,low_confidence\n";
    for (const auto& q : v.qc) {
      qc.push_back(qc_json(q));
      for (const auto& row : q.report.table)
        qc_csv += num(q.x.x()) + "," + num(q.x.y()) + "," + q.xi_kind + "," + matrix_cell(q.report.xi) + "," +
                  num(row.L) + "," + num(row.deficit) + "," + (row.low_confidence ? "1" : "0") + "\n";
    }
    std::string qslb_csv = "x,y,route,verdict,deficit,low_confidence\n";
    int witness_index = 0;
    for (const auto& b : v.boundary) {
      json bj = boundary_json(b);
      if (b.halfball && b.halfball->witness) {
        const std::string name = "witnesses/qslb_" + std::to_string(witness_index++) + ".json";
        a.files[name] = witness_json(*b.halfball->witness).dump(1) + "\n";
        bj["witness"] = name;
      }
      boundary.push_back(bj);
      qslb_csv += num(b.x.x()) + "," + num(b.x.y()) + "," + b.route + "," + to_string(b.verdict) + "," +
                  (b.halfball ? num(b.halfball->deficit) : std::string()) + "," + (b.low_confidence ? "1" : "0") +
                  "\n";
    }
    for (std::size_t i = 0; i < v.qc.size(); ++i)
      if (v.qc[i].report.witness) {
        const std::string name = "witnesses/qc_" + std::to_string(i) + ".json";
        a.files[name] = witness_json(*v.qc[i].report.witness).dump(1) + "\n";
        qc[i]["witness"] = name;
      }
    if (!v.qc.empty()) a.files["tables/qc.csv"] = qc_csv;
    if (!v.boundary.empty()) a.files["tables/qslb.csv"] = qslb_csv;

    json verdict = {{"overall", to_string(v.overall)}, {"violations", v.violations}, {"qc", qc},
                    {"qslb", boundary}};
    if (!v.refinement.empty()) {
      json rows = json::array();
      std::string csv = "h,cells,deficit\n";
      for (const auto& row : v.refinement) {
        rows.push_back({{"h", row.h}, {"cells", row.cells}, {"deficit", row.deficit}});
        csv += num(row.h) + "," + std::to_string(row.cells) + "," + num(row.deficit) + "\n";
      }
      verdict["qslb_refinement"] = rows;
      a.files["tables/qslb_refinement.csv"] = csv;
    }
    if (!v.equivalence.empty()) {
      json eq = json::array();
      for (const auto& e : v.equivalence) {
        json forms = json::array();
        for (const auto& fr : e.forms)
          forms.push_back({{"form", fr.form}, {"ran", fr.ran}, {"verdict", to_string(fr.verdict)},
                           {"value", fr.value}, {"reason", fr.reason}});
        eq.push_back({{"x", point_json(e.x0)}, {"interior", e.interior}, {"agree", e.agree}, {"forms", forms}});
      }
      verdict["equivalence"] = eq;
    }
    if (v.liminf) {
      verdict["liminf"] = liminf_json(*v.liminf);
      a.files["tables/liminf.csv"] = liminf_csv(*v.liminf);
    }
    if (v.certificate) {
      json rows = json::array();
      std::string csv = "n,gap,w11_norm\n";
      for (const auto& row : v.certificate->rows) {
        rows.push_back({{"n", row.n}, {"gap", row.gap}, {"w11_norm", row.w11_norm}});
        csv += std::to_string(row.n) + "," + num(row.gap) + "," + num(row.w11_norm) + "\n";
      }
      verdict["necessity"] = {{"eps", v.certificate->eps},
                              {"bound", v.certificate->bound},
                              {"liminf", v.certificate->liminf},
                              {"certified", v.certificate->certified},
                              {"rows", rows}};
      a.files["tables/necessity.csv"] = csv;
    }
    for (const auto& e : v.errors) errors.push_back(e);
    r["verdict"] = verdict;
  }

  if (command == Command::Liminf) {
    try {
      const LiminfReport l = run_liminf(s);
      r["liminf"] = liminf_json(l);
      a.files["tables/liminf.csv"] = liminf_csv(l);
    } catch (const std::exception& e) {
      errors.push_back("liminf: " + std::string(e.what()));
    }
  }

  if (command == Command::Decompose || (analyze_all && s.checks.decomposition)) {
    try {
      const DecompositionRun d = run_decomposition(s);
      json steps = json::array(), sm = json::array(), charges = json::array(), add = json::array();
      std::string k_csv = "n,k,coupling\n", sm_csv = "m,s_m,deviation,within\n", add_csv = "n,whole,parts,residual\n";
      for (const auto& st : d.result.steps) {
        const double c = st.coupling.empty() ? 0.0 : *std::max_element(st.coupling.begin(), st.coupling.end());
        steps.push_back({{"n", st.n}, {"k", st.k}, {"coupling", st.coupling}});
        k_csv += std::to_string(st.n) + "," + std::to_string(st.k) + "," + num(c) + "\n";
      }
      for (const auto& row : d.result.s_table) {
        sm.push_back({{"m", row.m}, {"s_m", row.s_m}, {"deviation", row.deviation}, {"within", row.within}});
        sm_csv += std::to_string(row.m) + "," + num(row.s_m) + "," + num(row.deviation) + "," +
                  (row.within ? "1" : "0") + "\n";
      }
      for (const auto& cr : d.verification.property_ii)
        charges.push_back({{"deltas", cr.deltas}, {"sup_mass", cr.sup_mass}, {"tight", cr.tight}});
      for (const auto& row : d.additivity.rows) {
        add.push_back({{"n", row.n}, {"whole", row.whole}, {"parts", row.parts}, {"residual", row.residual}});
        add_csv += std::to_string(row.n) + "," + num(row.whole) + "," + num(row.parts) + "," + num(row.residual) + "\n";
      }
      json violations = json::array();
      for (const auto& cv : d.verification.violations)
        violations.push_back({{"n", cv.n}, {"component", cv.component}, {"cell", cv.cell}, {"excess", cv.excess}});
      r["decomposition"] = {{"covered", d.result.covered},
                            {"uncovered_vertices", d.result.uncovered_vertices},
                            {"subsequence", steps},
                            {"s_table", sm},
                            {"s_monotone", d.result.s_monotone},
                            {"s_within", d.result.s_within},
                            {"reassembly_error", d.verification.reassembly_error},
                            {"reassembly_ok", d.verification.reassembly_ok},
                            {"property_i", d.verification.property_i},
                            {"property_i_violations", violations},
                            {"recorded_slack", d.verification.recorded_slack},
                            {"supports_ok", d.verification.supports_ok},
                            {"property_ii", charges},
                            {"property_ii_ok", d.verification.property_ii_ok},
                            {"additivity", add},
                            {"additive", d.additivity.additive}};
      a.files["tables/decomposition_subsequence.csv"] = k_csv;
      a.files["tables/decomposition_s_table.csv"] = sm_csv;
      a.files["tables/additivity.csv"] = add_csv;
    } catch (const std::exception& e) {
      errors.push_back("decomposition: " + std::string(e.what()));
    }
  }

  if (command == Command::Recession || (analyze_all && s.checks.recession)) {
    try {
      const RecessionRun rr = run_recession(s);
      json rows = json::array(), mu = json::array();
      std::string csv = "x,y,xi,estimate,analytic,observed_rate\n", mu_csv = "t,sampled,analytic\n";
      for (const auto& row : rr.rows) {
        json j = {{"x", point_json(row.x)}, {"xi", matrix_json(row.xi)}, {"estimate", row.estimate},
                  {"observed_rate", row.observed_rate}};
        if (row.analytic) j["analytic"] = *row.analytic;
        rows.push_back(j);
        csv += num(row.x.x()) + "," + num(row.x.y()) + "," + matrix_cell(row.xi) + "," + num(row.estimate) + "," +
               (row.analytic ? num(*row.analytic) : std::string()) + "," + num(row.observed_rate) + "\n";
      }
      for (const auto& m : rr.mu) {
        json j = {{"t", m.t}, {"sampled", m.sampled}};
        if (m.analytic) j["analytic"] = *m.analytic;
        mu.push_back(j);
        mu_csv += num(m.t) + "," + num(m.sampled) + "," + (m.analytic ? num(*m.analytic) : std::string()) + "\n";
      }
      r["recession"] = {{"rows", rows}, {"max_error", rr.max_error}, {"mu", mu}, {"mu_monotone", rr.mu_monotone}};
      a.files["tables/recession.csv"] = csv;
      a.files["tables/mu.csv"] = mu_csv;
    } catch (const std::exception& e) {
      errors.push_back("recession: " + std::string(e.what()));
    }
  }

  r["errors"] = errors;
  json listing = json::array();
  for (const auto& [name, _] : a.files) listing.push_back(name);
  r["artifacts"] = listing;
  return a;
}

std::string report_text(const Artifacts& artifacts) { return artifacts.report.dump(2) + "\n"; }

void write_artifacts(const Artifacts& artifacts, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  fs::create_directories(root);
  auto write = [](const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << text;
  };
  write(root / "report.json", report_text(artifacts));
  for (const auto& [name, text] : artifacts.files) write(root / name, text);
}

}  // namespace wlsc
