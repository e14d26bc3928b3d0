#pragma once

#include "wlsc/compact_set.hpp"
#include "wlsc/mesh.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace wlsc {

using MeshPtr = std::shared_ptr<const Mesh>;

/// Step discontinuity of a 1D function: u jumps by `jump` when crossing
/// `location` from left to right.
struct Atom {
  double location = 0.0;
  Vector jump;
};

/// Discrete BV function: cellwise affine data (possibly discontinuous across
/// facets) plus, in 1D, explicit steps at arbitrary interior locations:
///
///   u(x) = a(x) + sum_k jump_k * H(x - z_k)
///
/// where a is the cellwise affine part and H the Heaviside function.
class BVFunction {
 public:
  using CellValues = std::array<Vector, 3>;

  BVFunction() = default;
  BVFunction(MeshPtr mesh, int components, std::vector<CellValues> cell_values, std::vector<Atom> atoms = {});

  static BVFunction zero(MeshPtr mesh, int components);
  /// Continuous piecewise-affine function from vertex values.
  static BVFunction from_vertex_values(MeshPtr mesh, const std::vector<Vector>& values);
  /// Nodal interpolation of a continuous function.
  static BVFunction interpolate(MeshPtr mesh, int components, const std::function<Vector(const Point&)>& fn);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int components() const { return components_; }
  int dim() const { return mesh_->dim(); }
  const std::vector<CellValues>& cell_values() const { return values_; }
  const Vector& cell_value(std::size_t c, int local) const { return values_[c][static_cast<std::size_t>(local)]; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  /// Constant gradient of the affine part on cell c (M x N).
  Matrix cell_gradient(std::size_t c) const;
  /// Sum of atom jumps strictly left of x (1D).
  Vector step_sum(double x) const;
  /// Point value; right limits at discontinuities.
  Vector value(const Point& p) const;
  /// Value of the affine-plus-steps representation inside cell c at p,
  /// taking steps strictly left of `left_of` into account.
  Vector value_in_cell(std::size_t c, const Point& p, double left_of) const;

  BVFunction operator+(const BVFunction& other) const;
  BVFunction operator-(const BVFunction& other) const;
  BVFunction scaled(double alpha) const;
  BVFunction plus_constant(const Vector& c) const;

  bool same_mesh(const BVFunction& other) const;

 private:
  void normalize();

  MeshPtr mesh_;
  int components_ = 1;
  std::vector<CellValues> values_;
  std::vector<Atom> atoms_;
};

/// Singular charge of a matrix measure in polar form: value = polar * mass,
/// with |polar| = 1.
struct SingularCharge {
  Point location = Point::Zero();
  Matrix polar;
  double mass = 0.0;
  int facet = -1;  // interior facet index in 2D, -1 otherwise

  static SingularCharge from_value(const Point& location, const Matrix& value, int facet = -1);
  Matrix value() const { return polar * mass; }
};

/// Matrix-valued Radon measure: cellwise constant density (absolutely
/// continuous part) plus finitely many singular charges.
class MatrixMeasure {
 public:
  MatrixMeasure() = default;
  MatrixMeasure(MeshPtr mesh, int rows, int cols);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  std::vector<Matrix> density;
  std::vector<SingularCharge> singular;

  /// Adds a charge, merging with an existing one at the same location.
  void add_charge(const Point& location, const Matrix& value, int facet = -1);
  /// Drops zero charges and re-sorts by location for a canonical order.
  void canonicalize();

  MatrixMeasure operator+(const MatrixMeasure& other) const;
  MatrixMeasure operator-(const MatrixMeasure& other) const;
  MatrixMeasure scaled(double alpha) const;

  double absolutely_continuous_mass() const;
  double singular_mass() const;

 private:
  MeshPtr mesh_;
  int rows_ = 1, cols_ = 1;
};

/// Cell/charge subset for restricted total variations.
struct Region {
  std::function<double(const Mesh&, std::size_t)> cell_fraction;
  std::function<bool(const Point&)> contains;

  /// Open delta-neighborhood of a compact set.
  static Region neighborhood(const CompactSet& k, double delta);
};

/// Du = grad u L^N + D^s u.
MatrixMeasure derivative(const BVFunction& u);

double total_variation(const MatrixMeasure& mu, const std::optional<Region>& region = std::nullopt);

struct ChargeReport {
  std::vector<double> deltas;
  std::vector<double> sup_mass;  // sup_n |Du_n|((K)_delta cap Omega)
  bool tight = false;
  double threshold = 0.0;
};

/// Tabulates delta -> sup_n |mu_n|((K)_delta) and decides tightness away from K.
ChargeReport does_not_charge(const std::vector<MatrixMeasure>& seq, const CompactSet& k,
                             const std::vector<double>& deltas, double threshold = 1e-3);

/// phi * u for a scalar piecewise-affine cutoff phi given by vertex values in [0,1].
BVFunction cutoff_multiply(const BVFunction& u, const std::vector<double>& phi);

/// ||u - v||_{L^1}.  1D functions may live on different meshes of the same
/// interval; 2D functions must share the mesh.
double l1_distance(const BVFunction& u, const BVFunction& v);

struct WeakStarReport {
  std::vector<double> l1;          // ||u_n - u||_{L^1}
  std::vector<double> tv;          // |Du_n|(Omega)
  double sup_tv = 0.0;
  bool l1_converging = false;
  bool tv_bounded = false;
  bool plausible = false;          // necessary conditions only
};

WeakStarReport weakstar_diagnostics(const std::vector<BVFunction>& seq, const BVFunction& limit,
                                    double l1_threshold = 1e-2);

}  // namespace wlsc
