#pragma once

#include "wlsc/mesh.hpp"

#include <vector>

namespace wlsc {

/// Finite union of points, segments and closed polygonal regions.
class CompactSet {
 public:
  CompactSet() = default;

  static CompactSet point(const Point& p);
  static CompactSet segment(const Point& a, const Point& b);
  /// Closed region bounded by a counter-clockwise loop.
  static CompactSet region(std::vector<Point> loop);
  /// Convenience for 1D intervals [a, b].
  static CompactSet interval(double a, double b) { return segment(Point(a, 0), Point(b, 0)); }

  CompactSet& add(const CompactSet& other);
  CompactSet united(const CompactSet& other) const;

  bool empty() const { return pieces_.empty(); }
  double distance(const Point& p) const;
  /// Membership in the open delta-neighborhood (K)_delta.
  bool in_neighborhood(const Point& p, double delta) const { return distance(p) < delta; }
  /// Fraction of cell c lying in (K)_delta.  Exact in 1D, lattice-sampled in 2D.
  double neighborhood_fraction(const Mesh& mesh, std::size_t c, double delta) const;

 private:
  struct Piece {
    enum class Kind { Point, Segment, Region } kind = Kind::Point;
    Point a = Point::Zero(), b = Point::Zero();
    std::vector<Point> loop;
  };
  std::vector<Piece> pieces_;
};

}  // namespace wlsc
