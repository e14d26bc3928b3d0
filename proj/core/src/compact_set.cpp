#include "wlsc/compact_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace wlsc {

namespace {

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).norm();
}

bool inside_loop(const Point& p, const std::vector<Point>& loop) {
  bool inside = false;
  for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
    const Point& pi = loop[i];
    const Point& pj = loop[j];
    if ((pi.y() > p.y()) != (pj.y() > p.y()) &&
        p.x() < (pj.x() - pi.x()) * (p.y() - pi.y()) / (pj.y() - pi.y()) + pi.x())
      inside = !inside;
  }
  return inside;
}

constexpr int kLattice = 16;

}  // namespace

CompactSet CompactSet::point(const Point& p) {
  CompactSet k;
  k.pieces_.push_back({Piece::Kind::Point, p, p, {}});
  return k;
}

CompactSet CompactSet::segment(const Point& a, const Point& b) {
  CompactSet k;
  k.pieces_.push_back({Piece::Kind::Segment, a, b, {}});
  return k;
}

CompactSet CompactSet::region(std::vector<Point> loop) {
  if (loop.size() < 3) throw Error("compact region needs at least 3 vertices");
  CompactSet k;
  k.pieces_.push_back({Piece::Kind::Region, loop.front(), loop.front(), std::move(loop)});
  return k;
}

CompactSet& CompactSet::add(const CompactSet& other) {
  pieces_.insert(pieces_.end(), other.pieces_.begin(), other.pieces_.end());
  return *this;
}

CompactSet CompactSet::united(const CompactSet& other) const {
  CompactSet k = *this;
  k.add(other);
  return k;
}

double CompactSet::distance(const Point& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces_) {
    switch (piece.kind) {
      case Piece::Kind::Point: d = std::min(d, (p - piece.a).norm()); break;
      case Piece::Kind::Segment: d = std::min(d, segment_distance(p, piece.a, piece.b)); break;
      case Piece::Kind::Region: {
        if (inside_loop(p, piece.loop)) return 0.0;
        for (std::size_t i = 0; i < piece.loop.size(); ++i)
          d = std::min(d, segment_distance(p, piece.loop[i], piece.loop[(i + 1) % piece.loop.size()]));
        break;
      }
    }
  }
  return d;
}

double CompactSet::neighborhood_fraction(const Mesh& mesh, std::size_t c, double delta) const {
  if (pieces_.empty()) return 0.0;
  const auto cv = mesh.cell(c);
  if (mesh.dim() == 1) {
    const double x0 = mesh.vertex(cv[0]).x();
    const double x1 = mesh.vertex(cv[1]).x();
    std::vector<std::pair<double, double>> iv;
    for (const auto& piece : pieces_) {
      double lo = piece.a.x(), hi = piece.a.x();
      if (piece.kind == Piece::Kind::Segment) {
        lo = std::min(piece.a.x(), piece.b.x());
        hi = std::max(piece.a.x(), piece.b.x());
      } else if (piece.kind == Piece::Kind::Region) {
        for (const auto& q : piece.loop) {
          lo = std::min(lo, q.x());
          hi = std::max(hi, q.x());
        }
      }
      iv.emplace_back(std::max(lo - delta, x0), std::min(hi + delta, x1));
    }
    std::sort(iv.begin(), iv.end());
    double covered = 0.0, reach = x0;
    for (const auto& [lo, hi] : iv) {
      const double start = std::max(lo, reach);
      if (hi > start) {
        covered += hi - start;
        reach = hi;
      }
    }
    return covered / (x1 - x0);
  }
  // Barycentric lattice midpoints of the kLattice^2 congruent sub-triangles.
  const Point& a = mesh.vertex(cv[0]);
  const Point& b = mesh.vertex(cv[1]);
  const Point& d = mesh.vertex(cv[2]);
  int hits = 0, total = 0;
  const double n = kLattice;
  for (int i = 0; i < kLattice; ++i) {
    for (int j = 0; i + j < kLattice; ++j) {
      // upward sub-triangle centroid
      const double u = (i + 1.0 / 3.0) / n, v = (j + 1.0 / 3.0) / n;
      ++total;
      if (in_neighborhood(a + u * (b - a) + v * (d - a), delta)) ++hits;
      if (i + j + 1 < kLattice) {
        const double u2 = (i + 2.0 / 3.0) / n, v2 = (j + 2.0 / 3.0) / n;
        ++total;
        if (in_neighborhood(a + u2 * (b - a) + v2 * (d - a), delta)) ++hits;
      }
    }
  }
  return static_cast<double>(hits) / total;
}

}  // namespace wlsc
