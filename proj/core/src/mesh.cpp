#include "wlsc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <utility>

namespace wlsc {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

double signed_area(const std::vector<Point>& loop) {
  double s = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) s += cross(loop[i], loop[(i + 1) % loop.size()]);
  return 0.5 * s;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

bool point_in_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
  const double d1 = cross(b - a, p - a);
  const double d2 = cross(c - b, p - b);
  const double d3 = cross(a - c, p - c);
  return d1 >= 0 && d2 >= 0 && d3 >= 0;
}

// Ear clipping of a simple counter-clockwise polygon.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Point>& loop) {
  std::vector<int> idx(loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  std::size_t guard = 0;
  while (idx.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const int ip = idx[(i + idx.size() - 1) % idx.size()];
      const int ic = idx[i];
      const int in = idx[(i + 1) % idx.size()];
      const Point& a = loop[static_cast<std::size_t>(ip)];
      const Point& b = loop[static_cast<std::size_t>(ic)];
      const Point& c = loop[static_cast<std::size_t>(in)];
      if (cross(b - a, c - b) <= 1e-14) continue;  // reflex or degenerate
      bool empty = true;
      for (int k : idx) {
        if (k == ip || k == ic || k == in) continue;
        if (point_in_triangle(loop[static_cast<std::size_t>(k)], a, b, c)) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      tris.push_back({ip, ic, in});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped || ++guard > 10 * loop.size()) throw Error("polygon triangulation failed (polygon not simple?)");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

Mesh interval_mesh(double a, double b, double h_target, const MeshOptions& options) {
  const auto n = static_cast<std::size_t>(std::ceil((b - a) / h_target - 1e-12));
  if (n > options.max_cells) throw Error("cell budget exceeded for interval mesh");
  std::vector<Point> v;
  std::vector<std::array<int, 3>> cells;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    v.emplace_back(i == n ? b : a + t * (b - a), 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) cells.push_back({static_cast<int>(i), static_cast<int>(i + 1), -1});
  return Mesh(1, std::move(v), std::move(cells));
}

// Ring mesh of {|y| < 1, y_1 < 0}; the flat facet is the segment on y_1 = 0.
Mesh half_disk_canonical(double spacing) {
  const int rings = std::max(1, static_cast<int>(std::ceil(1.0 / spacing - 1e-12)));
  std::vector<Point> v;
  std::vector<std::array<int, 3>> cells;
  v.emplace_back(0.0, 0.0);
  std::vector<int> prev{0};
  std::vector<double> prev_theta{0.0};
  const double pi = std::numbers::pi;
  for (int k = 1; k <= rings; ++k) {
    const double r = static_cast<double>(k) / rings;
    const int segs = std::max(2, static_cast<int>(std::ceil(pi * r / spacing - 1e-12)));
    std::vector<int> ring;
    std::vector<double> theta;
    for (int j = 0; j <= segs; ++j) {
      const double s = static_cast<double>(j) / segs;  // normalized angle in [0,1]
      const double ang = pi / 2 + s * pi;
      Point p(r * std::cos(ang), r * std::sin(ang));
      if (j == 0) p = Point(0.0, r);
      if (j == segs) p = Point(0.0, -r);
      if (2 * j == segs) p = Point(-r, 0.0);
      ring.push_back(static_cast<int>(v.size()));
      theta.push_back(s);
      v.push_back(p);
    }
    if (k == 1) {
      for (int j = 0; j < segs; ++j) cells.push_back({0, ring[static_cast<std::size_t>(j)], ring[static_cast<std::size_t>(j + 1)]});
    } else {
      std::size_t i = 0, j = 0;
      while (i + 1 < prev.size() || j + 1 < ring.size()) {
        const bool advance_outer =
            i + 1 >= prev.size() || (j + 1 < ring.size() && theta[j + 1] <= prev_theta[i + 1]);
        if (advance_outer) {
          cells.push_back({prev[i], ring[j], ring[j + 1]});
          ++j;
        } else {
          cells.push_back({prev[i], ring[j], prev[i + 1]});
          ++i;
        }
      }
    }
    prev = std::move(ring);
    prev_theta = std::move(theta);
  }
  return Mesh(2, std::move(v), std::move(cells));
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain

Domain Domain::interval(double a, double b) {
  Domain d;
  d.kind = Kind::Interval;
  d.dim = 1;
  d.a = a;
  d.b = b;
  d.validate();
  return d;
}

Domain Domain::polygon(std::vector<Point> vertices) {
  Domain d;
  d.kind = Kind::Polygon;
  d.dim = 2;
  d.vertices = std::move(vertices);
  d.validate();
  return d;
}

Domain Domain::unit_square() {
  return polygon({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)});
}

Domain Domain::half_ball(int dim, const Point& normal) {
  Domain d;
  d.kind = Kind::HalfBall;
  d.dim = dim;
  d.normal = normal;
  d.validate();
  return d;
}

void Domain::validate() const {
  switch (kind) {
    case Kind::Interval:
      if (!(a < b)) throw Error("interval requires a < b");
      break;
    case Kind::Polygon: {
      if (vertices.size() < 3) throw Error("polygon needs at least 3 vertices");
      if (signed_area(vertices) <= 0) throw Error("polygon vertex loop must be positively oriented");
      const std::size_t n = vertices.size();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (j == i + 1 || (i == 0 && j == n - 1)) continue;
          if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]))
            throw Error("polygon vertex loop is self-intersecting");
        }
        if ((vertices[i] - vertices[(i + 1) % n]).norm() == 0) throw Error("polygon has repeated vertices");
      }
      break;
    }
    case Kind::HalfBall:
      if (dim != 1 && dim != 2) throw Error("half-ball dimension must be 1 or 2");
      if (std::abs(normal.norm() - 1.0) > 1e-12) throw Error("half-ball normal must have unit length");
      if (dim == 1 && std::abs(normal.y()) > 0) throw Error("1D half-ball normal must be +-e1");
      break;
  }
}

double Domain::measure() const {
  switch (kind) {
    case Kind::Interval: return b - a;
    case Kind::Polygon: return signed_area(vertices);
    case Kind::HalfBall: return dim == 1 ? 1.0 : std::numbers::pi / 2;
  }
  return 0.0;
}

double Domain::diameter() const {
  switch (kind) {
    case Kind::Interval: return b - a;
    case Kind::Polygon: {
      double d = 0;
      for (const auto& p : vertices)
        for (const auto& q : vertices) d = std::max(d, (p - q).norm());
      return d;
    }
    case Kind::HalfBall: return 2.0;
  }
  return 0.0;
}

bool Domain::contains(const Point& p, double tol) const {
  switch (kind) {
    case Kind::Interval: return p.x() >= a - tol && p.x() <= b + tol;
    case Kind::Polygon: {
      const std::size_t n = vertices.size();
      for (std::size_t i = 0; i < n; ++i)
        if (point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) <= tol) return true;
      bool inside = false;
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& pi = vertices[i];
        const Point& pj = vertices[j];
        if ((pi.y() > p.y()) != (pj.y() > p.y()) &&
            p.x() < (pj.x() - pi.x()) * (p.y() - pi.y()) / (pj.y() - pi.y()) + pi.x())
          inside = !inside;
      }
      return inside;
    }
    case Kind::HalfBall: return p.norm() <= 1 + tol && p.dot(normal) <= tol;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Mesh

Mesh::Mesh(int dim, std::vector<Point> vertices, std::vector<std::array<int, 3>> cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (dim_ != 1 && dim_ != 2) throw Error("mesh dimension must be 1 or 2");
  measure_.resize(cells_.size());
  basis_grad_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto& cv = cells_[c];
    if (dim_ == 1) {
      cv[2] = -1;
      double x0 = vertex(cv[0]).x(), x1 = vertex(cv[1]).x();
      if (x1 < x0) {
        std::swap(cv[0], cv[1]);
        std::swap(x0, x1);
      }
      const double len = x1 - x0;
      if (!(len > 0)) throw Error("degenerate 1D cell");
      measure_[c] = len;
      basis_grad_[c] = {Point(-1.0 / len, 0.0), Point(1.0 / len, 0.0), Point::Zero()};
    } else {
      double area2 = cross(vertex(cv[1]) - vertex(cv[0]), vertex(cv[2]) - vertex(cv[0]));
      if (area2 < 0) {
        std::swap(cv[1], cv[2]);
        area2 = -area2;
      }
      if (!(area2 > 1e-300)) throw Error("degenerate triangle");
      measure_[c] = 0.5 * area2;
      for (int i = 0; i < 3; ++i) {
        const Point& p1 = vertex(cv[static_cast<std::size_t>((i + 1) % 3)]);
        const Point& p2 = vertex(cv[static_cast<std::size_t>((i + 2) % 3)]);
        basis_grad_[c][static_cast<std::size_t>(i)] = Point(p1.y() - p2.y(), p2.x() - p1.x()) / area2;
      }
    }
    h_ = std::max(h_, cell_diameter(c));
  }

  if (dim_ == 1) {
    std::map<int, std::pair<int, std::size_t>> count;  // vertex -> (uses, cell)
    std::map<int, bool> is_left;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      for (int i = 0; i < 2; ++i) {
        auto& e = count[cells_[c][static_cast<std::size_t>(i)]];
        ++e.first;
        e.second = c;
        is_left[cells_[c][static_cast<std::size_t>(i)]] = (i == 0);
      }
    }
    for (const auto& [vtx, e] : count) {
      if (e.first != 1) continue;
      BoundaryFacet f;
      f.vertices = {vtx, -1};
      f.normal = Point(is_left[vtx] ? -1.0 : 1.0, 0.0);
      f.cell = static_cast<int>(e.second);
      f.size = 1.0;
      f.midpoint = vertex(vtx);
      boundary_.push_back(f);
    }
    sorted_1d_ = true;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i)
      if (!(vertices_[i].x() < vertices_[i + 1].x())) sorted_1d_ = false;
    for (std::size_t c = 0; c < cells_.size() && sorted_1d_; ++c)
      if (cells_[c][0] != static_cast<int>(c) || cells_[c][1] != static_cast<int>(c + 1)) sorted_1d_ = false;
  } else {
    std::map<std::pair<int, int>, std::pair<int, std::size_t>> edges;
    std::map<std::pair<int, int>, std::pair<int, int>> oriented;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      for (int i = 0; i < 3; ++i) {
        const int p = cells_[c][static_cast<std::size_t>(i)];
        const int q = cells_[c][static_cast<std::size_t>((i + 1) % 3)];
        const auto key = std::minmax(p, q);
        auto& e = edges[key];
        ++e.first;
        e.second = c;
        oriented[key] = {p, q};
      }
    }
    for (const auto& [key, e] : edges) {
      if (e.first > 2) throw Error("non-manifold edge in mesh");
      if (e.first != 1) continue;
      const auto [p, q] = oriented[key];
      const Point d = vertex(q) - vertex(p);
      BoundaryFacet f;
      f.vertices = {p, q};
      f.size = d.norm();
      f.normal = Point(d.y(), -d.x()) / f.size;
      f.cell = static_cast<int>(e.second);
      f.midpoint = 0.5 * (vertex(p) + vertex(q));
      boundary_.push_back(f);
    }
  }
}

Point Mesh::centroid(std::size_t c) const {
  Point s = Point::Zero();
  for (int v : cell(c)) s += vertex(v);
  return s / cell_size();
}

double Mesh::cell_diameter(std::size_t c) const {
  double d = 0.0;
  const auto cv = cell(c);
  for (std::size_t i = 0; i < cv.size(); ++i)
    for (std::size_t j = i + 1; j < cv.size(); ++j) d = std::max(d, (vertex(cv[i]) - vertex(cv[j])).norm());
  return d;
}

double Mesh::total_measure() const {
  double s = 0.0;
  for (double m : measure_) s += m;
  return s;
}

std::array<double, 3> Mesh::barycentric(std::size_t c, const Point& p) const {
  const auto cv = cell(c);
  if (dim_ == 1) {
    const double x0 = vertex(cv[0]).x(), x1 = vertex(cv[1]).x();
    const double t = (p.x() - x0) / (x1 - x0);
    return {1.0 - t, t, 0.0};
  }
  const Point& a = vertex(cv[0]);
  std::array<double, 3> lam{};
  for (int i = 0; i < 3; ++i)
    lam[static_cast<std::size_t>(i)] = (i == 0 ? 1.0 : 0.0) + basis_gradient(c, i).dot(p - a);
  return lam;
}

std::optional<std::size_t> Mesh::locate(const Point& p, double tol) const {
  if (dim_ == 1 && sorted_1d_ && !vertices_.empty()) {
    const double x = p.x();
    if (x < vertices_.front().x() - tol || x > vertices_.back().x() + tol) return std::nullopt;
    auto it = std::upper_bound(vertices_.begin(), vertices_.end(), x,
                               [](double v, const Point& q) { return v < q.x(); });
    std::size_t i = static_cast<std::size_t>(std::distance(vertices_.begin(), it));
    if (i == 0) return 0;
    return std::min(i - 1, cells_.size() - 1);
  }
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto lam = barycentric(c, p);
    bool inside = true;
    for (int i = 0; i < cell_size(); ++i) inside = inside && lam[static_cast<std::size_t>(i)] >= -tol;
    if (inside) return c;
  }
  return std::nullopt;
}

std::vector<bool> Mesh::boundary_vertex_mask() const {
  std::vector<bool> mask(vertices_.size(), false);
  for (const auto& f : boundary_) {
    mask[static_cast<std::size_t>(f.vertices[0])] = true;
    if (f.vertices[1] >= 0) mask[static_cast<std::size_t>(f.vertices[1])] = true;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Construction

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point> v = mesh.vertices();
  std::vector<std::array<int, 3>> cells;
  if (mesh.dim() == 1) {
    // Rebuild in sorted order so that 1D locate stays logarithmic.
    std::vector<std::pair<double, Point>> pts;
    for (const auto& p : v) pts.emplace_back(p.x(), p);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const auto cv = mesh.cell(c);
      const Point m = 0.5 * (mesh.vertex(cv[0]) + mesh.vertex(cv[1]));
      pts.emplace_back(m.x(), m);
    }
    std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    std::vector<Point> sorted;
    for (const auto& [x, p] : pts) sorted.push_back(p);
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
      cells.push_back({static_cast<int>(i), static_cast<int>(i + 1), -1});
    return Mesh(1, std::move(sorted), std::move(cells));
  }
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int p, int q) {
    const auto key = std::minmax(p, q);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(v.size());
    v.push_back(0.5 * (mesh.vertex(p) + mesh.vertex(q)));
    mid.emplace(key, id);
    return id;
  };
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cv = mesh.cell(c);
    const int a = cv[0], b = cv[1], d = cv[2];
    const int ab = midpoint(a, b), bd = midpoint(b, d), da = midpoint(d, a);
    cells.push_back({a, ab, da});
    cells.push_back({b, bd, ab});
    cells.push_back({d, da, bd});
    cells.push_back({ab, bd, da});
  }
  return Mesh(2, std::move(v), std::move(cells));
}

Mesh rotate(const Mesh& mesh, const Point& to) {
  if (mesh.dim() == 1) {
    // Only reflections are possible on the line.
    if (to.x() > 0) return mesh;
    std::vector<Point> v;
    for (auto it = mesh.vertices().rbegin(); it != mesh.vertices().rend(); ++it) v.emplace_back(-it->x(), 0.0);
    std::vector<std::array<int, 3>> cells;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) cells.push_back({static_cast<int>(i), static_cast<int>(i + 1), -1});
    return Mesh(1, std::move(v), std::move(cells));
  }
  const Point u = to.normalized();
  Eigen::Matrix2d r;
  r << u.x(), -u.y(), u.y(), u.x();
  std::vector<Point> v;
  v.reserve(mesh.num_vertices());
  for (const auto& p : mesh.vertices()) v.push_back(r * p);
  return Mesh(2, std::move(v), mesh.cells());
}

Mesh build_mesh(const Domain& domain, double h_target, const MeshOptions& options) {
  if (!(h_target > 0)) throw Error("h_target must be positive");
  domain.validate();
  switch (domain.kind) {
    case Domain::Kind::Interval: return interval_mesh(domain.a, domain.b, h_target, options);
    case Domain::Kind::Polygon: {
      std::vector<std::array<int, 3>> tris = ear_clip(domain.vertices);
      Mesh mesh(2, domain.vertices, std::move(tris));
      while (mesh.h() > h_target) {
        if (4 * mesh.num_cells() > options.max_cells) throw Error("cell budget exceeded for polygon mesh");
        mesh = refine_uniform(mesh);
      }
      return mesh;
    }
    case Domain::Kind::HalfBall: {
      if (domain.dim == 1) {
        return domain.normal.x() > 0 ? interval_mesh(-1.0, 0.0, h_target, options)
                                     : interval_mesh(0.0, 1.0, h_target, options);
      }
      const double estimate = 2.0 * std::numbers::pi / (h_target * h_target);
      if (estimate > static_cast<double>(options.max_cells)) throw Error("cell budget exceeded for half-ball mesh");
      double spacing = 0.5 * h_target;
      Mesh canonical = half_disk_canonical(spacing);
      while (canonical.h() > h_target) {
        spacing *= 0.9;
        canonical = half_disk_canonical(spacing);
      }
      return rotate(canonical, domain.normal);
    }
  }
  throw Error("unknown domain kind");
}

std::optional<BoundaryPoint> boundary_point(const Domain& domain, const Point& x0, double tol) {
  switch (domain.kind) {
    case Domain::Kind::Interval:
      if (std::abs(x0.x() - domain.a) <= tol) return BoundaryPoint{Point(domain.a, 0), Point(-1, 0)};
      if (std::abs(x0.x() - domain.b) <= tol) return BoundaryPoint{Point(domain.b, 0), Point(1, 0)};
      break;
    case Domain::Kind::Polygon: {
      const auto& vs = domain.vertices;
      for (const auto& p : vs)
        if ((p - x0).norm() <= tol) return std::nullopt;  // corner
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const Point& a = vs[i];
        const Point& b = vs[(i + 1) % vs.size()];
        if (point_segment_distance(x0, a, b) <= tol) {
          const Point d = (b - a).normalized();
          return BoundaryPoint{x0, Point(d.y(), -d.x())};
        }
      }
      break;
    }
    case Domain::Kind::HalfBall: {
      if (domain.dim == 1) {
        const double end = domain.normal.x() > 0 ? -1.0 : 1.0;
        if (std::abs(x0.x()) <= tol) return BoundaryPoint{Point::Zero(), domain.normal};
        if (std::abs(x0.x() - end) <= tol) return BoundaryPoint{Point(end, 0), Point(end, 0)};
        break;
      }
      const double r = x0.norm();
      const double s = x0.dot(domain.normal);
      if (std::abs(s) <= tol && r < 1 - tol) return BoundaryPoint{x0, domain.normal};
      if (std::abs(r - 1) <= tol && s < -tol) return BoundaryPoint{x0, x0 / r};
      if (std::abs(r - 1) <= tol && std::abs(s) <= tol) return std::nullopt;
      break;
    }
  }
  throw Error("point is not on the domain boundary");
}

std::size_t Patch::num_clamped() const {
  return static_cast<std::size_t>(std::count(clamped.begin(), clamped.end(), true));
}

Patch local_patch(const Mesh& mesh, const Point& center, double delta, const PatchOptions& options) {
  if (!(delta > 0)) throw Error("patch radius must be positive");
  Mesh fine = mesh;
  for (int i = 0; i < options.refinement_level; ++i) fine = refine_uniform(fine);

  std::set<std::pair<int, int>> domain_facets;
  for (const auto& f : fine.boundary()) domain_facets.insert(std::minmax(f.vertices[0], f.vertices[1]));

  std::vector<bool> keep(fine.num_cells(), false);
  std::vector<bool> used(fine.num_vertices(), false);
  bool any = false;
  for (std::size_t c = 0; c < fine.num_cells(); ++c) {
    if ((fine.centroid(c) - center).norm() < delta) {
      keep[c] = true;
      any = true;
      for (int v : fine.cell(c)) used[static_cast<std::size_t>(v)] = true;
    }
  }
  if (!any) throw Error("patch is empty: B_delta(x0) does not meet any cell");

  std::vector<int> remap(fine.num_vertices(), -1);
  std::vector<int> back;
  std::vector<Point> verts;
  for (std::size_t v = 0; v < fine.num_vertices(); ++v) {
    if (!used[v]) continue;
    remap[v] = static_cast<int>(verts.size());
    back.push_back(static_cast<int>(v));
    verts.push_back(fine.vertex(static_cast<int>(v)));
  }
  std::vector<std::array<int, 3>> cells;
  for (std::size_t c = 0; c < fine.num_cells(); ++c) {
    if (!keep[c]) continue;
    const auto cv = fine.cell(c);
    std::array<int, 3> nc{-1, -1, -1};
    for (std::size_t i = 0; i < cv.size(); ++i) nc[i] = remap[static_cast<std::size_t>(cv[i])];
    cells.push_back(nc);
  }

  Patch patch;
  patch.mesh = Mesh(fine.dim(), std::move(verts), std::move(cells));
  patch.refinement_level = options.refinement_level;
  patch.center = center;
  patch.delta = delta;
  patch.clamped.assign(patch.mesh.num_vertices(), false);
  for (const auto& f : patch.mesh.boundary()) {
    const int p = back[static_cast<std::size_t>(f.vertices[0])];
    const int q = f.vertices[1] >= 0 ? back[static_cast<std::size_t>(f.vertices[1])] : -1;
    const bool on_domain = domain_facets.count(std::minmax(p, q)) > 0;
    patch.facet_role.push_back(on_domain ? FacetRole::Free : FacetRole::Clamped);
  }
  for (std::size_t i = 0; i < patch.mesh.boundary().size(); ++i) {
    if (patch.facet_role[i] != FacetRole::Clamped) continue;
    const auto& f = patch.mesh.boundary()[i];
    patch.clamped[static_cast<std::size_t>(f.vertices[0])] = true;
    if (f.vertices[1] >= 0) patch.clamped[static_cast<std::size_t>(f.vertices[1])] = true;
  }
  return patch;
}

}  // namespace wlsc
