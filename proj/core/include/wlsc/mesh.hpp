#pragma once

#include "wlsc/types.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace wlsc {

/// Bounded domain: interval, simple polygon, or the canonical unit half-ball
/// D_nu = {y in B_1(0) : y . nu < 0}.
struct Domain {
  enum class Kind { Interval, Polygon, HalfBall };

  Kind kind = Kind::Interval;
  int dim = 1;
  double a = 0.0, b = 1.0;        // interval end points
  std::vector<Point> vertices;    // polygon loop, counter-clockwise
  Point normal = Point(1.0, 0.0); // half-ball outward normal of the flat facet

  static Domain interval(double a, double b);
  static Domain polygon(std::vector<Point> vertices);
  static Domain unit_square();
  static Domain half_ball(int dim, const Point& normal);

  /// Throws wlsc::Error if an invariant is violated.
  void validate() const;

  double measure() const;
  double diameter() const;
  bool contains(const Point& p, double tol = 1e-12) const;  // closure test
};

struct BoundaryFacet {
  std::array<int, 2> vertices{-1, -1};  // 1D facets use vertices[0] only
  Point normal = Point::Zero();         // outward unit normal
  int cell = -1;
  double size = 0.0;                    // facet length (1 in 1D)
  Point midpoint = Point::Zero();
};

/// Conforming simplicial mesh in 1D or 2D.  Immutable after construction.
class Mesh {
 public:
  Mesh() = default;
  /// 1D cells use the first two indices of each triple; the third is -1.
  Mesh(int dim, std::vector<Point> vertices, std::vector<std::array<int, 3>> cells);

  int dim() const { return dim_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  int cell_size() const { return dim_ + 1; }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  std::span<const int> cell(std::size_t c) const {
    return {cells_[c].data(), static_cast<std::size_t>(cell_size())};
  }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::vector<BoundaryFacet>& boundary() const { return boundary_; }

  double cell_measure(std::size_t c) const { return measure_[c]; }
  Point centroid(std::size_t c) const;
  double cell_diameter(std::size_t c) const;
  /// Gradient of the P1 hat function of local vertex i on cell c.
  const Point& basis_gradient(std::size_t c, int i) const { return basis_grad_[c][static_cast<std::size_t>(i)]; }

  double h() const { return h_; }
  double total_measure() const;

  /// Index of a cell containing p, or nullopt.  1D meshes must be sorted.
  std::optional<std::size_t> locate(const Point& p, double tol = 1e-12) const;
  /// Barycentric coordinates of p with respect to cell c.
  std::array<double, 3> barycentric(std::size_t c, const Point& p) const;

  /// True for vertices lying on some boundary facet.
  std::vector<bool> boundary_vertex_mask() const;

 private:
  int dim_ = 1;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<BoundaryFacet> boundary_;
  std::vector<double> measure_;
  std::vector<std::array<Point, 3>> basis_grad_;
  double h_ = 0.0;
  bool sorted_1d_ = false;
};

struct MeshOptions {
  std::size_t max_cells = 2'000'000;
};

/// Conforming mesh with h <= h_target.  The half-ball flat facet is resolved
/// exactly and its curved part is a polygon with chord error <= h_target^2.
Mesh build_mesh(const Domain& domain, double h_target, const MeshOptions& options = {});

/// Red refinement: every cell split into 2 (1D) or 4 (2D) children.
Mesh refine_uniform(const Mesh& mesh);

/// Rotates every vertex about the origin by the rotation mapping e1 to `to`.
Mesh rotate(const Mesh& mesh, const Point& to);

struct BoundaryPoint {
  Point x0 = Point::Zero();
  Point normal = Point(1.0, 0.0);
};

/// Outward normal at x0 on the domain boundary.  Returns nullopt at polygon
/// corners (no single normal) and throws if x0 is not on the boundary.
std::optional<BoundaryPoint> boundary_point(const Domain& domain, const Point& x0, double tol = 1e-9);

enum class FacetRole { Free, Clamped };

/// Submesh covering Omega cap B_delta(x0) together with the roles of its
/// boundary facets: clamped on the interior sphere, free on the domain boundary.
struct Patch {
  Mesh mesh;
  std::vector<FacetRole> facet_role;  // parallel to mesh.boundary()
  std::vector<bool> clamped;          // per patch vertex
  int refinement_level = 0;
  Point center = Point::Zero();
  double delta = 0.0;

  std::size_t num_clamped() const;
};

struct PatchOptions {
  int refinement_level = 1;
};

/// Works for interior and boundary centers alike.  Cells are selected by
/// centroid after `refinement_level` uniform refinements.
Patch local_patch(const Mesh& mesh, const Point& center, double delta, const PatchOptions& options = {});

}  // namespace wlsc
