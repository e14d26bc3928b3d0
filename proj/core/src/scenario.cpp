#include "wlsc/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace wlsc {

namespace {

using nlohmann::json;

// Best-effort source line of a JSON pointer: walks the object keys in order
// through the text.  A missing key reports the line of its parent.
int line_of(const std::string& text, const std::string& pointer) {
  if (text.empty()) return 0;
  std::size_t pos = 0;
  std::size_t found = 0;
  std::stringstream ss(pointer);
  std::string token;
  while (std::getline(ss, token, '/')) {
    if (token.empty() || std::all_of(token.begin(), token.end(), ::isdigit)) continue;
    const auto at = text.find('"' + token + '"', pos);
    if (at == std::string::npos) break;
    found = pos = at;
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(found), '\n'));
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw SchemaError(path, line_of(text_, path), msg);
  }

  const json& object(const json& parent, const std::string& key, const std::string& path) const {
    const std::string p = path + "/" + key;
    if (!parent.contains(key)) fail(p, "missing required key '" + key + "'");
    if (!parent.at(key).is_object()) fail(p, "expected an object");
    return parent.at(key);
  }

  template <class T>
  T get(const json& parent, const std::string& key, const std::string& path, const T& fallback) const {
    if (!parent.contains(key)) return fallback;
    return as<T>(parent.at(key), path + "/" + key);
  }

  template <class T>
  T require(const json& parent, const std::string& key, const std::string& path) const {
    if (!parent.contains(key)) fail(path + "/" + key, "missing required key '" + key + "'");
    return as<T>(parent.at(key), path + "/" + key);
  }

  template <class T>
  T as(const json& v, const std::string& path) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(path, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(path, "expected an integer");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) fail(path, "expected a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, Point>) {
      if (!v.is_array() || v.empty() || v.size() > 2) fail(path, "expected a point [x] or [x, y]");
      Point p = Point::Zero();
      for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<Eigen::Index>(i)) = as<double>(v[i], path);
      return p;
    } else if constexpr (std::is_same_v<T, Vector>) {
      if (!v.is_array() || v.empty() || v.size() > 2) fail(path, "expected a vector of length 1 or 2");
      Vector out(static_cast<Eigen::Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = as<double>(v[i], path);
      return out;
    } else if constexpr (std::is_same_v<T, Matrix>) {
      if (!v.is_array() || v.empty() || v.size() > 2) fail(path, "expected a matrix (list of rows)");
      const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
      if (cols == 0 || cols > 2) fail(path, "matrix rows must hold 1 or 2 numbers");
      Matrix m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array() || v[i].size() != cols) fail(path, "matrix rows must have equal length");
        for (std::size_t j = 0; j < cols; ++j)
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = as<double>(v[i][j], path);
      }
      return m;
    } else if constexpr (std::is_same_v<T, std::vector<Point>> || std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) fail(path, "expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as<typename T::value_type>(v[i], path + "/" + std::to_string(i)));
      return out;
    } else {
      static_assert(sizeof(T) == 0, "unsupported type");
    }
  }

  void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
    for (const auto& [k, _] : obj.items()) {
      bool known = false;
      for (const char* key : keys) known = known || k == key;
      if (!known) fail(path + "/" + k, "unknown key '" + k + "'");
    }
  }

 private:
  const std::string& text_;
};

Domain parse_domain(const Reader& r, const json& d, const std::string& path) {
  r.only_keys(d, path, {"kind", "a", "b", "vertices"});
  const auto kind = r.require<std::string>(d, "kind", path);
  try {
    Domain out;
    if (kind == "interval") {
      out = Domain::interval(r.get<double>(d, "a", path, 0.0), r.get<double>(d, "b", path, 1.0));
    } else if (kind == "unit_square") {
      out = Domain::unit_square();
    } else if (kind == "polygon") {
      out = Domain::polygon(r.require<std::vector<Point>>(d, "vertices", path));
    } else {
      r.fail(path + "/kind", "domain kind must be interval, unit_square or polygon");
    }
    out.validate();
    return out;
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    r.fail(path, e.what());
  }
}

IntegrandSpec parse_integrand(const Reader& r, const json& j, const std::string& path, int dim) {
  r.only_keys(j, path, {"tag", "rows", "matrix", "a", "t", "normal", "scale"});
  IntegrandSpec s;
  s.tag = r.require<std::string>(j, "tag", path);
  s.params.rows = r.get<int>(j, "rows", path, 1);
  s.params.cols = dim;
  if (j.contains("matrix")) {
    s.params.matrix = r.as<Matrix>(j.at("matrix"), path + "/matrix");
    s.params.rows = static_cast<int>(s.params.matrix.rows());
    if (s.params.matrix.cols() != dim) r.fail(path + "/matrix", "matrix must have one column per space dimension");
  }
  if (j.contains("a")) {
    s.params.a = r.as<Vector>(j.at("a"), path + "/a");
    s.params.rows = static_cast<int>(s.params.a.size());
  }
  if (j.contains("t")) s.params.t = r.as<Vector>(j.at("t"), path + "/t");
  if (j.contains("normal")) s.params.normal = r.as<Vector>(j.at("normal"), path + "/normal");
  s.scale = r.get<double>(j, "scale", path, 1.0);
  if (s.params.rows < 1 || s.params.rows > 2) r.fail(path + "/rows", "rows must be 1 or 2");
  try {
    (void)make_integrand(s);
  } catch (const Error& e) {
    r.fail(path, e.what());
  }
  return s;
}

CompactSet parse_compact(const Reader& r, const json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) r.fail(path, "a cover set is one of {point}, {segment}, {interval}, {region}");
  const std::string key = j.begin().key();
  const json& v = j.begin().value();
  const std::string p = path + "/" + key;
  if (key == "point") return CompactSet::point(r.as<Point>(v, p));
  if (key == "interval") {
    const auto ab = r.as<std::vector<double>>(v, p);
    if (ab.size() != 2 || ab[0] > ab[1]) r.fail(p, "interval needs [a, b] with a <= b");
    return CompactSet::interval(ab[0], ab[1]);
  }
  if (key == "segment") {
    const auto pts = r.as<std::vector<Point>>(v, p);
    if (pts.size() != 2) r.fail(p, "segment needs two end points");
    return CompactSet::segment(pts[0], pts[1]);
  }
  if (key == "region") {
    const auto pts = r.as<std::vector<Point>>(v, p);
    if (pts.size() < 3) r.fail(p, "region needs at least three vertices");
    return CompactSet::region(pts);
  }
  r.fail(p, "unknown cover set kind '" + key + "'");
}

SequenceSpec parse_sequence(const Reader& r, const json& j, const std::string& path, const Domain& domain) {
  r.only_keys(j, path, {"kind", "n_min", "n_max", "h", "resolution", "profile", "x0", "normal", "amplitude",
                        "direction"});
  SequenceSpec s;
  s.domain = domain;
  try {
    s.kind = sequence_kind(r.get<std::string>(j, "kind", path, "jump_migration"));
  } catch (const Error& e) {
    r.fail(path + "/kind", e.what());
  }
  s.n_min = r.get<int>(j, "n_min", path, 1);
  s.n_max = r.get<int>(j, "n_max", path, 64);
  if (s.n_min < 1 || s.n_max < s.n_min) r.fail(path + "/n_max", "need 1 <= n_min <= n_max");
  s.h = r.get<double>(j, "h", path, 0.125);
  if (!(s.h > 0)) r.fail(path + "/h", "h must be positive");
  s.resolution = r.get<int>(j, "resolution", path, 16);
  try {
    s.profile = profiles::get(r.get<std::string>(j, "profile", path, "hat"), domain.dim);
  } catch (const Error& e) {
    r.fail(path + "/profile", e.what());
  }
  s.x0.x0 = r.get<Point>(j, "x0", path, Point::Zero());
  s.x0.normal = r.get<Point>(j, "normal", path, Point(-1.0, 0.0));
  s.amplitude = r.get<Vector>(j, "amplitude", path, Vector::Ones(1));
  s.components = static_cast<int>(s.amplitude.size());
  s.direction = r.get<Point>(j, "direction", path, Point(1.0, 0.0));
  return s;
}

}  // namespace

SchemaError::SchemaError(std::string path, int line, const std::string& message)
    : Error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + path + ": " + message),
      path_(std::move(path)),
      line_(line) {}

Integrand make_integrand(const IntegrandSpec& spec) {
  const Integrand f = catalog::get(spec.tag, spec.params);
  return spec.scale == 1.0 ? f : catalog::scaled(f, spec.scale);
}

Scenario parse_scenario(const json& config, const std::string& text) {
  const Reader r(text);
  if (!config.is_object()) r.fail("", "scenario must be a JSON object");
  r.only_keys(config, "", {"schema_version", "name", "domain", "integrand", "checks", "sampling", "solver", "seed",
                           "workers", "sequence", "decomposition", "recession"});
  Scenario s;
  s.schema_version = r.require<int>(config, "schema_version", "");
  if (s.schema_version != kScenarioSchemaVersion)
    r.fail("/schema_version", "unsupported schema version " + std::to_string(s.schema_version));
  s.name = r.get<std::string>(config, "name", "", "scenario");
  s.domain_json = r.object(config, "domain", "");
  s.domain = parse_domain(r, s.domain_json, "/domain");
  s.integrand = parse_integrand(r, r.object(config, "integrand", ""), "/integrand", s.domain.dim);
  s.seed = r.get<std::uint64_t>(config, "seed", "", s.seed);
  s.workers = r.get<int>(config, "workers", "", 0);
  if (s.workers < 0) r.fail("/workers", "workers must be non-negative");

  if (config.contains("checks")) {
    const auto& c = r.object(config, "checks", "");
    r.only_keys(c, "/checks", {"qc", "qslb", "equivalence", "sequences", "decomposition", "recession"});
    s.checks.qc = r.get<bool>(c, "qc", "/checks", true);
    s.checks.qslb = r.get<bool>(c, "qslb", "/checks", true);
    s.checks.equivalence = r.get<bool>(c, "equivalence", "/checks", false);
    s.checks.sequences = r.get<bool>(c, "sequences", "/checks", false);
    s.checks.decomposition = r.get<bool>(c, "decomposition", "/checks", false);
    s.checks.recession = r.get<bool>(c, "recession", "/checks", false);
  }
  if (config.contains("sampling")) {
    const std::string p = "/sampling";
    const auto& c = r.object(config, "sampling", "");
    r.only_keys(c, p, {"interior_points", "interior_count", "boundary_points", "edge_midpoints", "random_xi",
                       "rank_one_xi"});
    s.sampling.interior_points = r.get<std::vector<Point>>(c, "interior_points", p, {});
    s.sampling.interior_count = r.get<int>(c, "interior_count", p, 1);
    s.sampling.boundary_points = r.get<std::vector<Point>>(c, "boundary_points", p, {});
    s.sampling.edge_midpoints = r.get<bool>(c, "edge_midpoints", p, true);
    s.sampling.random_xi = r.get<int>(c, "random_xi", p, 1);
    s.sampling.rank_one_xi = r.get<int>(c, "rank_one_xi", p, 1);
    if (s.sampling.interior_count < 0 || s.sampling.random_xi < 0 || s.sampling.rank_one_xi < 0)
      r.fail(p, "sample counts must be non-negative");
    for (std::size_t i = 0; i < s.sampling.interior_points.size(); ++i)
      if (!s.domain.contains(s.sampling.interior_points[i]))
        r.fail(p + "/interior_points/" + std::to_string(i), "sample point lies outside the domain");
    for (std::size_t i = 0; i < s.sampling.boundary_points.size(); ++i)
      if (!s.domain.contains(s.sampling.boundary_points[i], 1e-9))
        r.fail(p + "/boundary_points/" + std::to_string(i), "sample point lies outside the domain");
  }
  if (config.contains("solver")) {
    const std::string p = "/solver";
    const auto& c = r.object(config, "solver", "");
    r.only_keys(c, p, {"restarts", "max_iter", "qc_h", "qslb_h", "tol", "refinement_h"});
    s.solver.restarts = r.get<int>(c, "restarts", p, 8);
    s.solver.max_iter = r.get<int>(c, "max_iter", p, 500);
    s.solver.qc_h = r.get<double>(c, "qc_h", p, 0.125);
    s.solver.qslb_h = r.get<double>(c, "qslb_h", p, 0.05);
    s.solver.tol = r.get<double>(c, "tol", p, 1e-3);
    s.solver.refinement_h = r.get<std::vector<double>>(c, "refinement_h", p, {});
    if (s.solver.restarts < 1 || s.solver.max_iter < 1) r.fail(p, "restarts and max_iter must be positive");
    if (!(s.solver.qc_h > 0) || !(s.solver.qslb_h > 0) || !(s.solver.tol > 0))
      r.fail(p, "mesh sizes and tolerance must be positive");
    for (double h : s.solver.refinement_h)
      if (!(h > 0)) r.fail(p + "/refinement_h", "mesh sizes must be positive");
  }
  s.sequence_json = config.contains("sequence") ? r.object(config, "sequence", "") : json::object();
  s.sequence = parse_sequence(r, s.sequence_json, "/sequence", s.domain);
  if (s.checks.sequences && !config.contains("sequence"))
    r.fail("/sequence", "the sequences check needs a sequence block");

  if (config.contains("decomposition")) {
    const std::string p = "/decomposition";
    const auto& c = r.object(config, "decomposition", "");
    r.only_keys(c, p, {"cover", "n_max", "prefix", "h"});
    if (!c.contains("cover") || !c.at("cover").is_array()) r.fail(p + "/cover", "expected an array of cover sets");
    s.decomposition.cover_json = c.at("cover");
    for (std::size_t i = 0; i < c.at("cover").size(); ++i)
      s.decomposition.cover.push_back(parse_compact(r, c.at("cover")[i], p + "/cover/" + std::to_string(i)));
    s.decomposition.n_max = r.get<int>(c, "n_max", p, 64);
    s.decomposition.prefix = r.get<int>(c, "prefix", p, 256);
    s.decomposition.h = r.get<double>(c, "h", p, 1.0 / 512);
    if (s.decomposition.cover.size() < 2) r.fail(p + "/cover", "cover needs at least two sets");
    if (s.decomposition.n_max < 1 || s.decomposition.prefix < 1) r.fail(p, "n_max and prefix must be positive");
    if (!(s.decomposition.h > 0)) r.fail(p + "/h", "h must be positive");
  } else if (s.checks.decomposition) {
    r.fail("/decomposition", "the decomposition check needs a decomposition block");
  }
  if (config.contains("recession")) {
    const std::string p = "/recession";
    const auto& c = r.object(config, "recession", "");
    r.only_keys(c, p, {"samples", "t_grid"});
    s.recession.samples = r.get<int>(c, "samples", p, 100);
    s.recession.t_grid = r.get<std::vector<double>>(c, "t_grid", p, s.recession.t_grid);
    if (s.recession.samples < 1 || s.recession.t_grid.size() < 3) r.fail(p, "need samples >= 1 and 3 grid points");
  }
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  json config;
  try {
    config = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw SchemaError("", line, std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(config, text);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

nlohmann::json scenario_to_json(const Scenario& s) {
  auto vec = [](const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  auto pts = [](const std::vector<Point>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back({p.x(), p.y()});
    return a;
  };
  json integrand = {{"tag", s.integrand.tag}, {"rows", s.integrand.params.rows}, {"scale", s.integrand.scale}};
  if (s.integrand.params.matrix.size() > 0) {
    json m = json::array();
    for (Eigen::Index i = 0; i < s.integrand.params.matrix.rows(); ++i)
      m.push_back(vec(s.integrand.params.matrix.row(i).transpose()));
    integrand["matrix"] = m;
  }
  if (s.integrand.params.a.size() > 0) integrand["a"] = vec(s.integrand.params.a);
  if (s.integrand.params.t.size() > 0) integrand["t"] = vec(s.integrand.params.t);
  if (s.integrand.params.normal) integrand["normal"] = vec(*s.integrand.params.normal);

  json seq = {{"kind", to_string(s.sequence.kind)},
              {"n_min", s.sequence.n_min},
              {"n_max", s.sequence.n_max},
              {"h", s.sequence.h},
              {"resolution", s.sequence.resolution},
              {"profile", s.sequence.profile.name},
              {"x0", {s.sequence.x0.x0.x(), s.sequence.x0.x0.y()}},
              {"normal", {s.sequence.x0.normal.x(), s.sequence.x0.normal.y()}},
              {"amplitude", vec(s.sequence.amplitude)},
              {"direction", {s.sequence.direction.x(), s.sequence.direction.y()}}};
  json out = {
      {"schema_version", s.schema_version},
      {"name", s.name},
      {"domain", s.domain_json},
      {"integrand", integrand},
      {"seed", s.seed},
      {"workers", s.workers},
      {"checks",
       {{"qc", s.checks.qc},
        {"qslb", s.checks.qslb},
        {"equivalence", s.checks.equivalence},
        {"sequences", s.checks.sequences},
        {"decomposition", s.checks.decomposition},
        {"recession", s.checks.recession}}},
      {"sampling",
       {{"interior_points", pts(s.sampling.interior_points)},
        {"interior_count", s.sampling.interior_count},
        {"boundary_points", pts(s.sampling.boundary_points)},
        {"edge_midpoints", s.sampling.edge_midpoints},
        {"random_xi", s.sampling.random_xi},
        {"rank_one_xi", s.sampling.rank_one_xi}}},
      {"solver",
       {{"restarts", s.solver.restarts},
        {"max_iter", s.solver.max_iter},
        {"qc_h", s.solver.qc_h},
        {"qslb_h", s.solver.qslb_h},
        {"tol", s.solver.tol},
        {"refinement_h", s.solver.refinement_h}}},
      {"sequence", seq},
      {"recession", {{"samples", s.recession.samples}, {"t_grid", s.recession.t_grid}}},
  };
  // Without a cover there is no valid decomposition block to echo.
  if (!s.decomposition.cover.empty())
    out["decomposition"] = {{"cover", s.decomposition.cover_json},
                            {"n_max", s.decomposition.n_max},
                            {"prefix", s.decomposition.prefix},
                            {"h", s.decomposition.h}};
  return out;
}

}  // namespace wlsc
