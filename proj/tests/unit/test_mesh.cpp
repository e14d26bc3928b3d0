#include "properties.hpp"

#include "wlsc/compact_set.hpp"
#include "wlsc/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace wlsc;
using namespace wlsc::testing;

namespace {

double shoelace(const std::vector<Point>& loop) {
  double a = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point& p = loop[i];
    const Point& q = loop[(i + 1) % loop.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

}  // namespace

TEST(Domain, ValidatesInvariants) {
  EXPECT_THROW(Domain::interval(1.0, 0.0).validate(), Error);
  EXPECT_THROW(Domain::polygon({Point(0, 0), Point(1, 0)}).validate(), Error);
  // Clockwise loop is rejected.
  EXPECT_THROW(Domain::polygon({Point(0, 0), Point(0, 1), Point(1, 1), Point(1, 0)}).validate(), Error);
  EXPECT_NO_THROW(Domain::unit_square().validate());
}

TEST(Mesh, IntervalIsSortedAndResolvesTarget) {
  const Mesh m = build_mesh(Domain::interval(-1.0, 2.0), 0.1);
  EXPECT_LE(m.h(), 0.1 + 1e-12);
  EXPECT_NEAR(m.total_measure(), 3.0, 1e-12);
  for (std::size_t v = 1; v < m.num_vertices(); ++v) EXPECT_LT(m.vertex(int(v) - 1).x(), m.vertex(int(v)).x());
  const auto c = m.locate(Point(0.55, 0.0));
  ASSERT_TRUE(c.has_value());
  const auto cv = m.cell(*c);
  EXPECT_LE(m.vertex(cv[0]).x(), 0.55);
  EXPECT_GE(m.vertex(cv[1]).x(), 0.55);
  EXPECT_FALSE(m.locate(Point(2.5, 0.0)).has_value());
}

TEST(Mesh, SquareMeasureAndOutwardNormals) {
  const Mesh m = build_mesh(Domain::unit_square(), 0.1);
  EXPECT_NEAR(m.total_measure(), 1.0, 1e-12);
  EXPECT_LE(m.h(), 0.1 + 1e-12);
  double perimeter = 0.0;
  for (const auto& f : m.boundary()) {
    EXPECT_NEAR(f.normal.norm(), 1.0, 1e-12);
    // Outward: the midpoint moved along the normal leaves the square.
    EXPECT_FALSE(Domain::unit_square().contains(f.midpoint + 1e-3 * f.normal));
    perimeter += f.size;
  }
  EXPECT_NEAR(perimeter, 4.0, 1e-12);
}

TEST(Mesh, PolygonMeasureMatchesShoelace) {
  for_all(10, 1, [](Gen& g) {
    const int n = g.integer(3, 8);
    std::vector<Point> loop;
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * std::numbers::pi * i / n;
      const double r = g.uniform(0.6, 1.0);
      loop.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    const Mesh m = build_mesh(Domain::polygon(loop), 0.2);
    EXPECT_NEAR(m.total_measure(), shoelace(loop), 1e-10);
    for (std::size_t c = 0; c < m.num_cells(); ++c) EXPECT_GT(m.cell_measure(c), 0.0);
  });
}

TEST(Mesh, HalfBallFlatFacetIsExact) {
  for (const Point& nu : {Point(1, 0), Point(0, -1), Point(std::sqrt(0.5), std::sqrt(0.5))}) {
    const Mesh m = build_mesh(Domain::half_ball(2, nu), 0.05);
    EXPECT_NEAR(m.total_measure(), std::numbers::pi / 2, 0.05 * 0.05 * 4);
    for (const auto& v : m.vertices()) {
      EXPECT_LE(v.dot(nu), 1e-12);
      EXPECT_LE(v.norm(), 1.0 + 1e-12);
    }
    double flat = 0.0;
    for (const auto& f : m.boundary())
      if ((f.normal - nu).norm() < 1e-9) flat += f.size;
    EXPECT_NEAR(flat, 2.0, 1e-9);
  }
  const Mesh m1 = build_mesh(Domain::half_ball(1, Point(-1, 0)), 0.1);
  EXPECT_NEAR(m1.total_measure(), 1.0, 1e-12);
  EXPECT_GE(m1.vertices().front().x(), -1e-12);
}

TEST(Mesh, RefinementPreservesMeasureAndHalvesSize) {
  const Mesh m = build_mesh(Domain::unit_square(), 0.25);
  const Mesh r = refine_uniform(m);
  EXPECT_EQ(r.num_cells(), 4 * m.num_cells());
  EXPECT_NEAR(r.total_measure(), m.total_measure(), 1e-12);
  EXPECT_NEAR(r.h(), 0.5 * m.h(), 1e-12);
  const Mesh i = refine_uniform(build_mesh(Domain::interval(0, 1), 0.25));
  EXPECT_EQ(i.num_cells(), 8u);
}

TEST(Mesh, RotationIsAnIsometry) {
  const Mesh m = build_mesh(Domain::half_ball(2, Point(1, 0)), 0.1);
  const Point to(0.0, 1.0);
  const Mesh r = rotate(m, to);
  EXPECT_NEAR(r.total_measure(), m.total_measure(), 1e-12);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    EXPECT_NEAR(r.vertex(int(v)).norm(), m.vertex(int(v)).norm(), 1e-12);
    EXPECT_NEAR(r.vertex(int(v)).dot(to), m.vertex(int(v)).x(), 1e-12);
  }
}

TEST(BoundaryPoint, NormalsCornersAndInterior) {
  const Domain sq = Domain::unit_square();
  const auto bp = boundary_point(sq, Point(1.0, 0.3));
  ASSERT_TRUE(bp.has_value());
  EXPECT_NEAR((bp->normal - Point(1, 0)).norm(), 0.0, 1e-12);
  EXPECT_FALSE(boundary_point(sq, Point(0.0, 0.0)).has_value());
  EXPECT_THROW(boundary_point(sq, Point(0.5, 0.5)), Error);
  const auto left = boundary_point(Domain::interval(0, 1), Point(0, 0));
  ASSERT_TRUE(left.has_value());
  EXPECT_NEAR(left->normal.x(), -1.0, 1e-12);
}

TEST(CompactSet, DistancesAndNeighborhoods) {
  const CompactSet p = CompactSet::point(Point(0.5, 0.5));
  EXPECT_NEAR(p.distance(Point(0.5, 1.5)), 1.0, 1e-12);
  const CompactSet s = CompactSet::segment(Point(0, 0), Point(1, 0));
  EXPECT_NEAR(s.distance(Point(0.5, 0.3)), 0.3, 1e-12);
  EXPECT_NEAR(s.distance(Point(2.0, 0.0)), 1.0, 1e-12);
  const CompactSet r = CompactSet::region({Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)});
  EXPECT_EQ(r.distance(Point(0.5, 0.5)), 0.0);
  EXPECT_NEAR(r.distance(Point(1.5, 0.5)), 0.5, 1e-12);
  const CompactSet u = p.united(CompactSet::point(Point(0, 0)));
  EXPECT_NEAR(u.distance(Point(0, 0.1)), 0.1, 1e-12);
  EXPECT_TRUE(s.in_neighborhood(Point(0.5, 0.05), 0.1));
  EXPECT_FALSE(s.in_neighborhood(Point(0.5, 0.1), 0.1));
}

TEST(CompactSet, NeighborhoodFractionIsExactIn1D) {
  const Mesh m = build_mesh(Domain::interval(0, 1), 0.25);
  const CompactSet k = CompactSet::point(Point(0, 0));
  // (K)_{0.3} covers [0, 0.3): all of cell [0, 0.25] and a fifth of [0.25, 0.5].
  EXPECT_NEAR(k.neighborhood_fraction(m, 0, 0.3), 1.0, 1e-12);
  EXPECT_NEAR(k.neighborhood_fraction(m, 1, 0.3), 0.2, 1e-12);
  EXPECT_NEAR(k.neighborhood_fraction(m, 2, 0.3), 0.0, 1e-12);
}

TEST(Patch, InteriorPatchIsClampedOnTheSphereOnly) {
  const Mesh m = build_mesh(Domain::unit_square(), 0.05);
  const Patch p = local_patch(m, Point(0.5, 0.5), 0.25);
  EXPECT_GT(p.num_clamped(), 0u);
  for (const auto& f : p.mesh.boundary()) EXPECT_GE((f.midpoint - Point(0.5, 0.5)).norm(), 0.2);
  for (std::size_t i = 0; i < p.facet_role.size(); ++i) EXPECT_EQ(p.facet_role[i], FacetRole::Clamped);
}

TEST(Patch, BoundaryPatchHasFreeFacetsOnTheDomainBoundary) {
  const Mesh m = build_mesh(Domain::unit_square(), 0.05);
  const Patch p = local_patch(m, Point(1.0, 0.5), 0.25);
  int free = 0;
  for (std::size_t i = 0; i < p.facet_role.size(); ++i) {
    if (p.facet_role[i] != FacetRole::Free) continue;
    ++free;
    EXPECT_NEAR(p.mesh.boundary()[i].midpoint.x(), 1.0, 1e-12);
  }
  EXPECT_GT(free, 0);
  EXPECT_GT(p.num_clamped(), 0u);
}
