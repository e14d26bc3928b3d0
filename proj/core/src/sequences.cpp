#include "wlsc/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace wlsc {

namespace {

Matrix row_gradient(const Point& g, int dim) {
  Matrix m(1, dim);
  for (int j = 0; j < dim; ++j) m(0, j) = g[j];
  return m;
}

Vector scalar(double v) {
  Vector out(1);
  out(0) = v;
  return out;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

double boundary_distance(const Domain& d, const Point& p) {
  switch (d.kind) {
    case Domain::Kind::Interval: return std::max(0.0, std::min(p.x() - d.a, d.b - p.x()));
    case Domain::Kind::Polygon: {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < d.vertices.size(); ++i)
        m = std::min(m, segment_distance(p, d.vertices[i], d.vertices[(i + 1) % d.vertices.size()]));
      return m;
    }
    case Domain::Kind::HalfBall: break;
  }
  throw Error("boundary sequences need an interval or polygon domain");
}

MeshPtr member_mesh(const SequenceSpec& spec, int n) {
  const double h = std::min(spec.h, 1.0 / (static_cast<double>(spec.resolution) * n));
  return std::make_shared<const Mesh>(build_mesh(spec.domain, h));
}

void check_support(const Profile& p, int dim) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 64; ++k) {
    const double r = 1.0 + 0.5 * u(rng);
    Point y = Point::Zero();
    if (dim == 1) {
      y.x() = k % 2 ? r : -r;
    } else {
      const double a = 2.0 * std::numbers::pi * u(rng);
      y = Point(r * std::cos(a), r * std::sin(a));
    }
    if (p.value(y).norm() > 1e-14) throw Error("profile support violation: '" + p.name + "' is nonzero outside B_1(0)");
  }
}

double triangle_wave(double s) {
  const double f = s - std::floor(s);
  return 1.0 - std::abs(2.0 * f - 1.0);
}

}  // namespace

namespace profiles {

Profile hat(int dim) {
  Profile p;
  p.name = "hat";
  p.value = [](const Point& y) { return scalar(std::max(0.0, 1.0 - y.norm())); };
  p.gradient = [dim](const Point& y) {
    const double r = y.norm();
    if (r >= 1.0 || r == 0.0) return Matrix(Matrix::Zero(1, dim));
    return row_gradient(-y / r, dim);
  };
  return p;
}

Profile bump(int dim) {
  Profile p;
  p.name = "bump";
  p.value = [](const Point& y) {
    const double s = 1.0 - y.squaredNorm();
    return scalar(s > 0 ? s * s : 0.0);
  };
  p.gradient = [dim](const Point& y) {
    const double s = 1.0 - y.squaredNorm();
    if (s <= 0) return Matrix(Matrix::Zero(1, dim));
    return row_gradient(-4.0 * s * y, dim);
  };
  return p;
}

Profile skew(int dim) {
  Profile p;
  p.name = "skew";
  p.value = [](const Point& y) {
    const double s = 1.0 - y.squaredNorm();
    return scalar(s > 0 ? s * (1.0 + 0.5 * y.x()) : 0.0);
  };
  p.gradient = [dim](const Point& y) {
    const double s = 1.0 - y.squaredNorm();
    if (s <= 0) return Matrix(Matrix::Zero(1, dim));
    Point g = -2.0 * y * (1.0 + 0.5 * y.x());
    g.x() += 0.5 * s;
    return row_gradient(g, dim);
  };
  return p;
}

Profile zero(int dim) {
  Profile p;
  p.name = "zero";
  p.value = [](const Point&) { return scalar(0.0); };
  p.gradient = [dim](const Point&) { return Matrix(Matrix::Zero(1, dim)); };
  return p;
}

Profile get(const std::string& name, int dim) {
  if (name == "hat") return hat(dim);
  if (name == "bump") return bump(dim);
  if (name == "skew") return skew(dim);
  if (name == "zero") return zero(dim);
  throw Error("unknown profile '" + name + "'");
}

}  // namespace profiles

std::string to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::BoundaryRescale: return "boundary_rescale";
    case SequenceKind::JumpMigration: return "jump_migration";
    case SequenceKind::PureBoundaryConcentration: return "pure_boundary_concentration";
    case SequenceKind::FixedTraceOscillation: return "fixed_trace_oscillation";
    case SequenceKind::RescaledWitness: return "rescaled_witness";
  }
  return "unknown";
}

SequenceKind sequence_kind(const std::string& name) {
  for (auto k : {SequenceKind::BoundaryRescale, SequenceKind::JumpMigration, SequenceKind::PureBoundaryConcentration,
                 SequenceKind::FixedTraceOscillation, SequenceKind::RescaledWitness})
    if (to_string(k) == name) return k;
  throw Error("unknown sequence kind '" + name + "'");
}

bool covers_domain(const SequenceSpec& spec) { return spec.kind != SequenceKind::RescaledWitness; }

BVFunction generate(const SequenceSpec& spec, int n) {
  if (n < 1 || n < spec.n_min || n > spec.n_max)
    throw Error("sequence index " + std::to_string(n) + " outside [" + std::to_string(spec.n_min) + ", " +
                std::to_string(spec.n_max) + "]");
  const int dim = spec.domain.dim;
  switch (spec.kind) {
    case SequenceKind::JumpMigration: {
      const Domain& d = spec.domain;
      if (d.kind != Domain::Kind::Interval || d.a > 0.0 || d.b <= 0.0)
        throw Error("jump migration needs an interval containing 0 in [a, b)");
      auto mesh = std::make_shared<const Mesh>(build_mesh(d, spec.h));
      const double z = 1.0 / n;
      std::vector<BVFunction::CellValues> cells(mesh->num_cells());
      const double inside = d.a == 0.0 ? 1.0 : 0.0;  // on (0, 1/n) when 0 is the left end
      for (auto& c : cells) c = {scalar(inside), scalar(inside), Vector()};
      std::vector<Atom> atoms;
      if (d.a < 0.0) atoms.push_back({0.0, scalar(1.0)});
      if (z < d.b) atoms.push_back({z, scalar(-1.0)});
      else if (d.a == 0.0) break;  // chi_(0,1/n) covers the whole interval: constant 1
      return BVFunction(mesh, 1, std::move(cells), std::move(atoms));
    }
    case SequenceKind::BoundaryRescale: {
      check_support(spec.profile, dim);
      auto mesh = member_mesh(spec, n);
      const double scale = std::pow(static_cast<double>(n), dim - 1);
      const Point x0 = spec.x0.x0;
      const Profile prof = spec.profile;
      return BVFunction::interpolate(mesh, prof.components,
                                     [&](const Point& x) { return Vector(scale * prof.value(n * (x - x0))); });
    }
    case SequenceKind::PureBoundaryConcentration: {
      auto mesh = member_mesh(spec, n);
      const Domain d = spec.domain;
      auto u = BVFunction::interpolate(mesh, spec.components, [&](const Point& x) {
        Vector v = Vector::Ones(spec.components);
        return Vector(v * std::max(0.0, 1.0 - n * boundary_distance(d, x)));
      });
      const double tv = total_variation(derivative(u));
      return tv > 0 ? u.scaled(1.0 / tv) : u;
    }
    case SequenceKind::FixedTraceOscillation: {
      if (spec.amplitude.size() != spec.components) throw Error("oscillation amplitude has the wrong length");
      auto mesh = member_mesh(spec, n);
      const Domain d = spec.domain;
      const Point dir = spec.direction.normalized();
      return BVFunction::interpolate(mesh, spec.components, [&](const Point& x) {
        const double layer = std::min(1.0, n * boundary_distance(d, x));
        return Vector(spec.amplitude * (triangle_wave(n * x.dot(dir)) * layer / n));
      });
    }
    case SequenceKind::RescaledWitness: {
      if (!spec.witness) throw Error("rescaled witness sequence without a witness field");
      const TestField& w = *spec.witness;
      const Mesh& hb = w.mesh();
      std::vector<Point> verts;
      verts.reserve(hb.num_vertices());
      for (const auto& y : hb.vertices()) verts.push_back(spec.x0.x0 + y / static_cast<double>(n));
      auto mesh = std::make_shared<const Mesh>(Mesh(hb.dim(), std::move(verts), hb.cells()));
      std::vector<Vector> vals;
      for (Eigen::Index v = 0; v < w.values.cols(); ++v) vals.emplace_back(w.values.col(v));
      BVFunction u = BVFunction::from_vertex_values(mesh, vals);
      const double norm = l1_distance(u, BVFunction::zero(mesh, u.components())) + total_variation(derivative(u));
      if (!(norm > 0)) throw Error("witness field vanishes");
      return u.scaled(1.0 / norm);
    }
  }
  // JumpMigration with 1/n beyond the interval.
  auto mesh = std::make_shared<const Mesh>(build_mesh(spec.domain, spec.h));
  return BVFunction::from_vertex_values(mesh, std::vector<Vector>(mesh->num_vertices(), scalar(1.0)));
}

std::vector<int> index_grid(int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) throw Error("invalid index range");
  std::vector<int> out;
  for (int n = n_min; n < n_max; n *= 2) out.push_back(n);
  out.push_back(n_max);
  return out;
}

LiminfReport empirical_liminf(const Integrand& f, const RecessionFn& finf, const SequenceSpec& spec,
                              const std::vector<int>& ns, double tol) {
  if (ns.empty()) throw Error("empirical liminf needs at least one index");
  LiminfReport rep;
  rep.tol = tol;
  auto base = std::make_shared<const Mesh>(build_mesh(spec.domain, spec.h));
  rep.limit_energy = eval_F(f, finf, BVFunction::zero(base, spec.components)).total;
  for (int n : ns) {
    const BVFunction u = generate(spec, n);
    LiminfRow row;
    row.n = n;
    const double fu = eval_F(f, finf, u).total;
    row.gap = fu - eval_F(f, finf, BVFunction::zero(u.mesh_ptr(), u.components())).total;
    row.energy = covers_domain(spec) ? fu : rep.limit_energy + row.gap;
    rep.rows.push_back(row);
  }
  double run = std::numeric_limits<double>::infinity();
  for (std::size_t i = rep.rows.size(); i-- > 0;) {
    run = std::min(run, rep.rows[i].energy);
    rep.rows[i].running_min = run;
  }
  const std::size_t half = rep.rows.size() / 2;
  rep.tail_min = std::numeric_limits<double>::infinity();
  rep.tail_max = -std::numeric_limits<double>::infinity();
  double tail_gap_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = half; i < rep.rows.size(); ++i) {
    rep.tail_min = std::min(rep.tail_min, rep.rows[i].energy);
    rep.tail_max = std::max(rep.tail_max, rep.rows[i].energy);
    tail_gap_max = std::max(tail_gap_max, rep.rows[i].gap);
  }
  rep.violated = tail_gap_max < -tol;
  return rep;
}

double halfball_profile_integral(const Integrand& f, const Profile& profile, int dim, const Point& normal) {
  if (dim == 1) {
    const double lo = normal.x() > 0 ? -1.0 : 0.0;
    const int panels = 4096;
    const double w = 1.0 / panels;
    const double g = std::sqrt(0.6);
    double s = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double mid = lo + (i + 0.5) * w;
      for (const auto& [t, wt] : {std::pair{-g, 5.0 / 9.0}, std::pair{0.0, 8.0 / 9.0}, std::pair{g, 5.0 / 9.0}}) {
        const Point y(mid + 0.5 * w * t, 0.0);
        s += 0.5 * w * wt * f(y, profile.gradient(y));
      }
    }
    return s;
  }
  auto mesh = halfball_mesh(2, normal, 0.02);
  double s = 0.0;
  for (std::size_t c = 0; c < mesh->num_cells(); ++c) {
    const auto q = cell_quadrature(*mesh, c, 3);
    for (std::size_t k = 0; k < q.points.size(); ++k) s += q.weights[k] * f(q.points[k], profile.gradient(q.points[k]));
  }
  return s;
}

LimitEnergyReport limit_energy_check(const Integrand& f, const RecessionFn& finf, const Profile& profile,
                                     const Domain& domain, const BoundaryPoint& x0, const std::vector<int>& ks,
                                     int resolution) {
  if (f.x_dependent()) throw Error("limit energy check needs an x-free integrand");
  if (domain.kind == Domain::Kind::HalfBall) throw Error("curved boundary near x0: flattening is out of scope");
  if (ks.empty()) throw Error("limit energy check needs at least one k");
  const auto bp = boundary_point(domain, x0.x0);
  if (!bp) throw Error("x0 is a corner: no flat boundary piece");
  SequenceSpec spec;
  spec.kind = SequenceKind::BoundaryRescale;
  spec.domain = domain;
  spec.profile = profile;
  spec.x0 = *bp;
  spec.resolution = resolution;
  spec.n_min = 1;
  spec.n_max = *std::max_element(ks.begin(), ks.end());
  spec.components = profile.components;
  LimitEnergyReport rep;
  for (int k : ks) {
    const BVFunction u = generate(spec, k);
    const double e = eval_F(f, finf, u).total - eval_F(f, finf, BVFunction::zero(u.mesh_ptr(), u.components())).total;
    rep.rows.push_back({k, e});
  }
  rep.halfball_integral = halfball_profile_integral(f, profile, domain.dim, bp->normal);
  const double last = rep.rows.back().energy;
  const double denom = std::abs(rep.halfball_integral);
  rep.relative_gap = denom > 1e-12 ? std::abs(last - rep.halfball_integral) / denom : std::abs(last);
  return rep;
}

NecessityCertificate necessity_witness(const Integrand& f, const RecessionFn& finf, const Domain& domain,
                                       const QslbReport& report, double eps, const std::vector<int>& ns, double tol) {
  if (report.verdict != CheckVerdict::Violated || !report.witness)
    throw Error("precondition unmet: no qslb violation with a witness at x0");
  if (!(eps > 0) || eps > -report.deficit * (1.0 + 1e-12))
    throw Error("eps must lie in (0, -deficit]");
  if (ns.empty()) throw Error("necessity witness needs at least one index");
  NecessityCertificate cert;
  cert.eps = eps;
  cert.bound = -0.5 * eps + tol;
  SequenceSpec& spec = cert.spec;
  spec.kind = SequenceKind::RescaledWitness;
  spec.domain = domain;
  spec.components = report.witness->components();
  spec.x0 = BoundaryPoint{report.x0, report.normal};
  spec.witness = report.witness;
  spec.n_min = *std::min_element(ns.begin(), ns.end());
  spec.n_max = *std::max_element(ns.begin(), ns.end());
  for (int n : ns) {
    const BVFunction u = generate(spec, n);
    for (const auto& p : u.mesh().vertices())
      if (!domain.contains(p, 1e-9))
        throw Error("rescaled support leaves the domain at n = " + std::to_string(n) + "; use larger n");
    NecessityRow row;
    row.n = n;
    row.gap = eval_F(f, finf, u).total - eval_F(f, finf, BVFunction::zero(u.mesh_ptr(), u.components())).total;
    row.w11_norm = l1_distance(u, BVFunction::zero(u.mesh_ptr(), u.components())) + total_variation(derivative(u));
    cert.rows.push_back(row);
  }
  const std::size_t half = cert.rows.size() / 2;
  double tail_max = -std::numeric_limits<double>::infinity();
  cert.liminf = std::numeric_limits<double>::infinity();
  for (std::size_t i = half; i < cert.rows.size(); ++i) {
    tail_max = std::max(tail_max, cert.rows[i].gap);
    cert.liminf = std::min(cert.liminf, cert.rows[i].gap);
  }
  cert.certified = tail_max <= cert.bound;
  if (!cert.certified)
    throw Error("witness not transferable: rescaled energies stay at " + std::to_string(tail_max) + " > " +
                std::to_string(cert.bound));
  return cert;
}

}  // namespace wlsc
