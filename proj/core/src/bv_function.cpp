#include "wlsc/bv_function.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <utility>

namespace wlsc {

namespace {

constexpr double kJumpTol = 1e-14;

std::pair<double, double> x_range(const Mesh& mesh) {
  double lo = mesh.vertex(0).x(), hi = lo;
  for (const auto& p : mesh.vertices()) {
    lo = std::min(lo, p.x());
    hi = std::max(hi, p.x());
  }
  return {lo, hi};
}

bool meshes_match(const Mesh& a, const Mesh& b) {
  if (&a == &b) return true;
  if (a.dim() != b.dim() || a.num_vertices() != b.num_vertices() || a.num_cells() != b.num_cells()) return false;
  for (std::size_t i = 0; i < a.num_vertices(); ++i)
    if (a.vertex(static_cast<int>(i)) != b.vertex(static_cast<int>(i))) return false;
  return a.cells() == b.cells();
}

// Integral of |d| over [0, len] for d affine from d0 to d1.
double abs_affine_integral(const Vector& d0, const Vector& d1, double len) {
  if (d0.size() == 1) {
    const double a = d0(0), b = d1(0);
    if (a * b >= 0) return 0.5 * (std::abs(a) + std::abs(b)) * len;
    return 0.5 * (a * a + b * b) / (std::abs(a) + std::abs(b)) * len;
  }
  static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                 0.4786286704993665, 0.2369268850561891};
  constexpr int pieces = 8;
  double s = 0.0;
  for (int p = 0; p < pieces; ++p) {
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double t = (p + 0.5 * (nodes[q] + 1.0)) / pieces;
      s += weights[q] * 0.5 / pieces * ((1 - t) * d0 + t * d1).norm();
    }
  }
  return s * len;
}

}  // namespace

// ---------------------------------------------------------------------------
// BVFunction

BVFunction::BVFunction(MeshPtr mesh, int components, std::vector<CellValues> cell_values, std::vector<Atom> atoms)
    : mesh_(std::move(mesh)), components_(components), values_(std::move(cell_values)), atoms_(std::move(atoms)) {
  if (!mesh_) throw Error("BV function needs a mesh");
  if (components_ < 1 || components_ > 2) throw Error("component count must be 1 or 2");
  if (values_.size() != mesh_->num_cells()) throw Error("cell value count does not match mesh");
  for (auto& cv : values_) {
    for (int i = 0; i < 3; ++i) {
      auto& v = cv[static_cast<std::size_t>(i)];
      if (i >= mesh_->cell_size()) {
        v = Vector::Zero(components_);
      } else if (v.size() != components_) {
        throw Error("cell value has wrong component count");
      }
    }
  }
  for (const auto& a : atoms_)
    if (a.jump.size() != components_) throw Error("atom jump has wrong component count");
  normalize();
}

void BVFunction::normalize() {
  if (atoms_.empty()) return;
  if (mesh_->dim() != 1) throw Error("explicit atoms are only supported in 1D");
  const auto [lo, hi] = x_range(*mesh_);
  const double tol = kJumpTol * (hi - lo);
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& l, const Atom& r) { return l.location < r.location; });
  std::vector<Atom> kept;
  for (const auto& a : atoms_) {
    if (a.jump.norm() == 0.0) continue;
    if (a.location <= lo + tol) {
      // A step at the left end shifts the whole function.
      spdlog::warn("atom at boundary point {} pruned (absorbed into the affine part)", a.location);
      for (auto& cv : values_)
        for (int i = 0; i < 2; ++i) cv[static_cast<std::size_t>(i)] += a.jump;
      continue;
    }
    if (a.location >= hi - tol) {
      spdlog::warn("atom at boundary point {} pruned", a.location);
      continue;
    }
    if (!kept.empty() && kept.back().location == a.location) {
      kept.back().jump += a.jump;
    } else {
      kept.push_back(a);
    }
  }
  atoms_.clear();
  for (auto& a : kept)
    if (a.jump.norm() > 0.0) atoms_.push_back(std::move(a));
}

BVFunction BVFunction::zero(MeshPtr mesh, int components) {
  std::vector<CellValues> cv(mesh->num_cells());
  for (auto& c : cv) c = {Vector::Zero(components), Vector::Zero(components), Vector::Zero(components)};
  return BVFunction(std::move(mesh), components, std::move(cv));
}

BVFunction BVFunction::from_vertex_values(MeshPtr mesh, const std::vector<Vector>& values) {
  if (values.size() != mesh->num_vertices()) throw Error("vertex value count does not match mesh");
  const int m = static_cast<int>(values.front().size());
  std::vector<CellValues> cv(mesh->num_cells());
  for (std::size_t c = 0; c < mesh->num_cells(); ++c) {
    const auto verts = mesh->cell(c);
    for (std::size_t i = 0; i < 3; ++i)
      cv[c][i] = i < verts.size() ? values[static_cast<std::size_t>(verts[i])] : Vector::Zero(m);
  }
  return BVFunction(std::move(mesh), m, std::move(cv));
}

BVFunction BVFunction::interpolate(MeshPtr mesh, int components, const std::function<Vector(const Point&)>& fn) {
  std::vector<Vector> values;
  values.reserve(mesh->num_vertices());
  for (const auto& p : mesh->vertices()) {
    Vector v = fn(p);
    if (v.size() != components) throw Error("interpolated function has wrong component count");
    values.push_back(std::move(v));
  }
  return from_vertex_values(std::move(mesh), values);
}

Matrix BVFunction::cell_gradient(std::size_t c) const {
  const int n = mesh_->dim();
  Matrix g = Matrix::Zero(components_, n);
  for (int i = 0; i < mesh_->cell_size(); ++i) {
    const Point& gi = mesh_->basis_gradient(c, i);
    g += values_[c][static_cast<std::size_t>(i)] * gi.head(n).transpose();
  }
  return g;
}

Vector BVFunction::step_sum(double x) const {
  Vector s = Vector::Zero(components_);
  for (const auto& a : atoms_) {
    if (a.location >= x) break;
    s += a.jump;
  }
  return s;
}

Vector BVFunction::value_in_cell(std::size_t c, const Point& p, double left_of) const {
  const auto lam = mesh_->barycentric(c, p);
  Vector v = Vector::Zero(components_);
  for (int i = 0; i < mesh_->cell_size(); ++i) v += lam[static_cast<std::size_t>(i)] * values_[c][static_cast<std::size_t>(i)];
  if (!atoms_.empty()) v += step_sum(left_of);
  return v;
}

Vector BVFunction::value(const Point& p) const {
  const auto c = mesh_->locate(p);
  if (!c) throw Error("point outside the mesh");
  // Right limit: include steps located at p itself.
  return value_in_cell(*c, p, std::nextafter(p.x(), std::numeric_limits<double>::infinity()));
}

bool BVFunction::same_mesh(const BVFunction& other) const { return meshes_match(*mesh_, *other.mesh_); }

BVFunction BVFunction::operator+(const BVFunction& other) const {
  if (!same_mesh(other)) throw Error("BV functions live on different meshes");
  if (components_ != other.components_) throw Error("component count mismatch");
  std::vector<CellValues> cv = values_;
  for (std::size_t c = 0; c < cv.size(); ++c)
    for (std::size_t i = 0; i < 3; ++i) cv[c][i] += other.values_[c][i];
  std::vector<Atom> atoms = atoms_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  return BVFunction(mesh_, components_, std::move(cv), std::move(atoms));
}

BVFunction BVFunction::scaled(double alpha) const {
  std::vector<CellValues> cv = values_;
  for (auto& c : cv)
    for (auto& v : c) v *= alpha;
  std::vector<Atom> atoms = atoms_;
  for (auto& a : atoms) a.jump *= alpha;
  return BVFunction(mesh_, components_, std::move(cv), std::move(atoms));
}

BVFunction BVFunction::operator-(const BVFunction& other) const { return *this + other.scaled(-1.0); }

BVFunction BVFunction::plus_constant(const Vector& k) const {
  std::vector<CellValues> cv = values_;
  for (auto& c : cv)
    for (int i = 0; i < mesh_->cell_size(); ++i) c[static_cast<std::size_t>(i)] += k;
  return BVFunction(mesh_, components_, std::move(cv), atoms_);
}

// ---------------------------------------------------------------------------
// Measures

SingularCharge SingularCharge::from_value(const Point& location, const Matrix& value, int facet) {
  SingularCharge s;
  s.location = location;
  s.facet = facet;
  s.mass = norm(value);
  s.polar = s.mass > 0 ? Matrix(value / s.mass) : Matrix(Matrix::Zero(value.rows(), value.cols()));
  return s;
}

MatrixMeasure::MatrixMeasure(MeshPtr mesh, int rows, int cols) : mesh_(std::move(mesh)), rows_(rows), cols_(cols) {
  density.assign(mesh_->num_cells(), Matrix::Zero(rows, cols));
}

void MatrixMeasure::add_charge(const Point& location, const Matrix& value, int facet) {
  singular.push_back(SingularCharge::from_value(location, value, facet));
}

void MatrixMeasure::canonicalize() {
  auto key = [](const SingularCharge& s) { return std::make_tuple(s.location.x(), s.location.y(), s.facet); };
  std::sort(singular.begin(), singular.end(), [&](const auto& l, const auto& r) { return key(l) < key(r); });
  std::vector<SingularCharge> merged;
  for (const auto& s : singular) {
    if (!merged.empty() && key(merged.back()) == key(s)) {
      merged.back() = SingularCharge::from_value(s.location, merged.back().value() + s.value(), s.facet);
    } else {
      merged.push_back(s);
    }
  }
  singular.clear();
  for (auto& s : merged)
    if (s.mass > kJumpTol) singular.push_back(std::move(s));
}

MatrixMeasure MatrixMeasure::operator+(const MatrixMeasure& other) const {
  if (!meshes_match(*mesh_, *other.mesh_)) throw Error("measures live on different meshes");
  MatrixMeasure r = *this;
  for (std::size_t c = 0; c < density.size(); ++c) r.density[c] += other.density[c];
  r.singular.insert(r.singular.end(), other.singular.begin(), other.singular.end());
  r.canonicalize();
  return r;
}

MatrixMeasure MatrixMeasure::scaled(double alpha) const {
  MatrixMeasure r = *this;
  for (auto& d : r.density) d *= alpha;
  for (auto& s : r.singular) s = SingularCharge::from_value(s.location, s.value() * alpha, s.facet);
  r.canonicalize();
  return r;
}

MatrixMeasure MatrixMeasure::operator-(const MatrixMeasure& other) const { return *this + other.scaled(-1.0); }

double MatrixMeasure::absolutely_continuous_mass() const {
  double s = 0.0;
  for (std::size_t c = 0; c < density.size(); ++c) s += norm(density[c]) * mesh_->cell_measure(c);
  return s;
}

double MatrixMeasure::singular_mass() const {
  double s = 0.0;
  for (const auto& q : singular) s += q.mass;
  return s;
}

Region Region::neighborhood(const CompactSet& k, double delta) {
  Region r;
  r.cell_fraction = [k, delta](const Mesh& mesh, std::size_t c) { return k.neighborhood_fraction(mesh, c, delta); };
  r.contains = [k, delta](const Point& p) { return k.in_neighborhood(p, delta); };
  return r;
}

MatrixMeasure derivative(const BVFunction& u) {
  const Mesh& mesh = u.mesh();
  const int m = u.components();
  const int n = mesh.dim();
  MatrixMeasure mu(u.mesh_ptr(), m, n);
  double scale = 1.0;
  for (const auto& cv : u.cell_values())
    for (const auto& v : cv) scale = std::max(scale, v.norm());
  const double tol = kJumpTol * scale;

  for (std::size_t c = 0; c < mesh.num_cells(); ++c) mu.density[c] = u.cell_gradient(c);

  if (n == 1) {
    for (const auto& a : u.atoms()) mu.add_charge(Point(a.location, 0.0), Matrix(a.jump));
    // Discontinuities of the cellwise data at shared vertices.
    std::map<int, std::pair<int, int>> sides;  // vertex -> (cell on the left, cell on the right)
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const auto cv = mesh.cell(c);
      sides.try_emplace(cv[1], -1, -1).first->second.first = static_cast<int>(c);
      sides.try_emplace(cv[0], -1, -1).first->second.second = static_cast<int>(c);
    }
    for (const auto& [vtx, lr] : sides) {
      if (lr.first < 0 || lr.second < 0) continue;
      const Vector jump = u.cell_value(static_cast<std::size_t>(lr.second), 0) -
                          u.cell_value(static_cast<std::size_t>(lr.first), 1);
      if (jump.norm() > tol) mu.add_charge(mesh.vertex(vtx), Matrix(jump));
    }
  } else {
    struct Side {
      int cell = -1;
      int lp = -1, lq = -1;  // local indices of the edge end points in this cell
    };
    std::map<std::pair<int, int>, std::pair<Side, Side>> edges;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const auto cv = mesh.cell(c);
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const int p = cv[static_cast<std::size_t>(i)], q = cv[static_cast<std::size_t>(j)];
        auto& e = edges[std::minmax(p, q)];
        Side s{static_cast<int>(c), p < q ? i : j, p < q ? j : i};
        if (e.first.cell < 0) e.first = s; else e.second = s;
      }
    }
    int facet = 0;
    for (const auto& [key, sides] : edges) {
      const auto& [a, b] = sides;
      if (b.cell < 0) continue;
      const int this_facet = facet++;
      const Point& p = mesh.vertex(key.first);
      const Point& q = mesh.vertex(key.second);
      const double len = (q - p).norm();
      // Normal pointing from cell a into cell b.
      Point nrm(q.y() - p.y(), p.x() - q.x());
      nrm /= len;
      if ((mesh.centroid(static_cast<std::size_t>(b.cell)) - mesh.centroid(static_cast<std::size_t>(a.cell))).dot(nrm) < 0)
        nrm = -nrm;
      const Vector jp = u.cell_value(static_cast<std::size_t>(b.cell), b.lp) - u.cell_value(static_cast<std::size_t>(a.cell), a.lp);
      const Vector jq = u.cell_value(static_cast<std::size_t>(b.cell), b.lq) - u.cell_value(static_cast<std::size_t>(a.cell), a.lq);
      if (jp.norm() <= tol && jq.norm() <= tol) continue;
      const Vector nv = nrm.head(2);
      if ((jp - jq).norm() <= tol) {
        mu.add_charge(0.5 * (p + q), outer(0.5 * (jp + jq), nv) * len, this_facet);
      } else {
        // Two-point Gauss rule along the facet for affine jumps.
        const double g = 0.5 / std::sqrt(3.0);
        for (double t : {0.5 - g, 0.5 + g}) {
          const Vector j = (1 - t) * jp + t * jq;
          mu.add_charge((1 - t) * p + t * q, outer(j, nv) * (0.5 * len), this_facet);
        }
      }
    }
  }
  mu.canonicalize();
  return mu;
}

double total_variation(const MatrixMeasure& mu, const std::optional<Region>& region) {
  const Mesh& mesh = mu.mesh();
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double dn = norm(mu.density[c]);
    if (dn == 0.0) continue;
    const double frac = region ? region->cell_fraction(mesh, c) : 1.0;
    s += dn * mesh.cell_measure(c) * frac;
  }
  for (const auto& q : mu.singular)
    if (!region || region->contains(q.location)) s += q.mass;
  return s;
}

ChargeReport does_not_charge(const std::vector<MatrixMeasure>& seq, const CompactSet& k,
                             const std::vector<double>& deltas, double threshold) {
  if (seq.empty()) throw Error("does_not_charge needs a non-empty sequence");
  if (deltas.empty()) throw Error("does_not_charge needs a delta grid");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0)) throw Error("delta grid must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw Error("delta grid must be decreasing");
  }
  ChargeReport r;
  r.deltas = deltas;
  r.threshold = threshold;
  for (double d : deltas) {
    const Region region = Region::neighborhood(k, d);
    double sup = 0.0;
    for (const auto& mu : seq) sup = std::max(sup, total_variation(mu, region));
    r.sup_mass.push_back(sup);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < r.sup_mass.size(); ++i) monotone = monotone && r.sup_mass[i] <= r.sup_mass[i - 1] + 1e-12;
  r.tight = monotone && r.sup_mass.back() < threshold;
  return r;
}

BVFunction cutoff_multiply(const BVFunction& u, const std::vector<double>& phi) {
  const Mesh& mesh = u.mesh();
  if (phi.size() != mesh.num_vertices()) throw Error("cutoff must have one value per vertex");
  for (double p : phi)
    if (p < -1e-12 || p > 1 + 1e-12) throw Error("cutoff values must lie in [0, 1]");

  auto phi_at = [&](double x) {
    const auto c = mesh.locate(Point(x, 0.0));
    if (!c) throw Error("atom outside the mesh");
    const auto lam = mesh.barycentric(*c, Point(x, 0.0));
    const auto cv = mesh.cell(*c);
    return lam[0] * phi[static_cast<std::size_t>(cv[0])] + lam[1] * phi[static_cast<std::size_t>(cv[1])];
  };

  std::vector<BVFunction::CellValues> cv = u.cell_values();
  std::vector<double> phi_z;
  for (const auto& a : u.atoms()) phi_z.push_back(phi_at(a.location));
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto verts = mesh.cell(c);
    for (int i = 0; i < mesh.cell_size(); ++i) {
      const auto vi = static_cast<std::size_t>(verts[static_cast<std::size_t>(i)]);
      auto& val = cv[c][static_cast<std::size_t>(i)];
      val *= phi[vi];
      if (mesh.dim() != 1) continue;
      const double x = mesh.vertex(verts[static_cast<std::size_t>(i)]).x();
      for (std::size_t k = 0; k < u.atoms().size(); ++k) {
        const double z = u.atoms()[k].location;
        const bool right_of_step = (i == 0) ? z <= x : z < x;
        if (right_of_step) val += u.atoms()[k].jump * (phi[vi] - phi_z[k]);
      }
    }
  }
  std::vector<Atom> atoms = u.atoms();
  for (std::size_t k = 0; k < atoms.size(); ++k) atoms[k].jump *= phi_z[k];
  return BVFunction(u.mesh_ptr(), u.components(), std::move(cv), std::move(atoms));
}

double l1_distance(const BVFunction& u, const BVFunction& v) {
  if (u.components() != v.components() || u.dim() != v.dim()) throw Error("l1_distance: mismatched dimensions");
  if (u.dim() == 1) {
    const auto [lo, hi] = x_range(u.mesh());
    const auto [lo2, hi2] = x_range(v.mesh());
    if (std::abs(lo - lo2) > 1e-12 || std::abs(hi - hi2) > 1e-12) throw Error("l1_distance: different intervals");
    std::vector<double> xs;
    for (const auto& p : u.mesh().vertices()) xs.push_back(p.x());
    for (const auto& p : v.mesh().vertices()) xs.push_back(p.x());
    for (const auto& a : u.atoms()) xs.push_back(a.location);
    for (const auto& a : v.atoms()) xs.push_back(a.location);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double l = xs[i], r = xs[i + 1];
      if (r - l <= 0) continue;
      const double mid = 0.5 * (l + r);
      const auto cu = u.mesh().locate(Point(mid, 0));
      const auto cw = v.mesh().locate(Point(mid, 0));
      const Vector d0 = u.value_in_cell(*cu, Point(l, 0), mid) - v.value_in_cell(*cw, Point(l, 0), mid);
      const Vector d1 = u.value_in_cell(*cu, Point(r, 0), mid) - v.value_in_cell(*cw, Point(r, 0), mid);
      s += abs_affine_integral(d0, d1, r - l);
    }
    return s;
  }
  if (!u.same_mesh(v)) throw Error("l1_distance: 2D functions must share the mesh");
  const Mesh& mesh = u.mesh();
  constexpr int n = 8;
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    std::array<Vector, 3> d;
    for (std::size_t i = 0; i < 3; ++i) d[i] = u.cell_values()[c][i] - v.cell_values()[c][i];
    double acc = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; i + j < n; ++j) {
        for (int up = 0; up < (i + j + 1 < n ? 2 : 1); ++up) {
          const double a = (i + (up ? 2.0 : 1.0) / 3.0) / n;
          const double b = (j + (up ? 2.0 : 1.0) / 3.0) / n;
          acc += ((1 - a - b) * d[0] + a * d[1] + b * d[2]).norm();
          ++count;
        }
      }
    }
    s += acc / count * mesh.cell_measure(c);
  }
  return s;
}

WeakStarReport weakstar_diagnostics(const std::vector<BVFunction>& seq, const BVFunction& limit, double l1_threshold) {
  if (seq.empty()) throw Error("weakstar_diagnostics needs a non-empty sequence");
  WeakStarReport r;
  for (const auto& u : seq) {
    if (u.components() != limit.components() || u.dim() != limit.dim())
      throw Error("weakstar_diagnostics: mismatched dimensions");
    r.l1.push_back(l1_distance(u, limit));
    r.tv.push_back(total_variation(derivative(u)));
    r.sup_tv = std::max(r.sup_tv, r.tv.back());
  }
  const std::size_t half = seq.size() / 2;
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) (i < half ? head : tail) = std::max(i < half ? head : tail, r.tv[i]);
  r.tv_bounded = std::isfinite(r.sup_tv) && (half == 0 || tail <= 1.5 * head + 1e-12);
  r.l1_converging = r.l1.back() < l1_threshold && r.l1.back() <= r.l1.front() + 1e-15;
  r.plausible = r.l1_converging && r.tv_bounded;
  return r;
}

}  // namespace wlsc
