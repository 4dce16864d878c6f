#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "svdg/voronoi.hpp"

using namespace svdg;

TEST_CASE("voronoi dual of the icosahedron") {
  const DelaunayGrid g = build_icosahedron();
  const VoronoiDual d = build_voronoi_dual(g);

  SECTION("twelve congruent pentagonal cells") {
    for (int i = 0; i < 12; ++i) {
      CHECK(d.ring_size(i) == 5);
      CHECK(d.cell_area[i] == Catch::Approx(4.0 * M_PI / 12.0).epsilon(1e-13));
    }
  }
  SECTION("uniformity constants are finite and identical across cells") {
    const UniformityReport u = check_uniformity(d);
    CHECK_FALSE(u.degenerate);
    CHECK(std::isfinite(u.c0));
    CHECK(std::isfinite(u.c1));
    for (int i = 0; i < 12; ++i) {
      CHECK(d.cell_area[i] == Catch::Approx(d.cell_area[0]).epsilon(1e-12));
      CHECK(d.cell_radius[i] == Catch::Approx(d.cell_radius[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("voronoi dual across levels") {
  DelaunayGrid g = build_icosahedron();
  double prev_h = 0.0, prev_c1 = 0.0;
  for (int level = 0; level <= 4; ++level) {
    if (level > 0) g = refine(g);
    const VoronoiDual d = build_voronoi_dual(g);

    double total = 0.0;
    for (double a : d.cell_area) total += a;
    INFO("level " << level);
    CHECK(total == Catch::Approx(4.0 * M_PI).epsilon(1e-12));

    const UniformityReport u = check_uniformity(d);
    CHECK_FALSE(u.degenerate);
    CHECK(u.min_dual_length > 0.0);
    if (level > 0) {
      CHECK(d.h < 0.575 * prev_h);  // h halves within 15% per level
      CHECK(d.h > 0.425 * prev_h);
      CHECK(u.c1 < 2.0 * prev_c1);
      CHECK(u.c1 > 0.5 * prev_c1);
    }
    prev_h = d.h;
    prev_c1 = u.c1;

    // dual edge endpoints are equidistant from both generators, and the
    // plane of the dual edge bisects the primal edge at its midpoint
    for (int e = 0; e < g.edge_count(); ++e) {
      const Edge& ed = g.edges[e];
      const UnitVec3& q0 = d.circumcenters[ed.t0];
      const UnitVec3& q1 = d.circumcenters[ed.t1];
      const UnitVec3& xi = g.vertices[ed.v0];
      const UnitVec3& xj = g.vertices[ed.v1];
      CHECK(std::abs(geodesic_distance(xi, q0) - geodesic_distance(xj, q0)) < 1e-10);
      CHECK(std::abs(geodesic_distance(xi, q1) - geodesic_distance(xj, q1)) < 1e-10);
      const UnitVec3 mid = arc_midpoint(q0, q1);
      CHECK(std::abs(geodesic_distance(xi, mid) - geodesic_distance(xj, mid)) < 1e-10);
      const UnitVec3 xij = arc_midpoint(xi, xj);
      const Vec3 plane_normal = UnitVec3::normalize(cross(q0, q1)).vec();
      CHECK(std::abs(dot(plane_normal, xij.vec())) < 1e-10);
    }
  }
}

TEST_CASE("cell rings are consistent") {
  DelaunayGrid g = refine(refine(build_icosahedron()));
  const VoronoiDual d = build_voronoi_dual(g);
  for (int i = 0; i < g.vertex_count(); ++i) {
    const int b = d.ring_begin(i), e = d.ring_end(i);
    for (int k = b; k < e; ++k) {
      // positively oriented fan from the generator
      const UnitVec3& q0 = d.circumcenters[d.cell_tris[k]];
      const UnitVec3& q1 = d.circumcenters[d.cell_tris[k + 1 == e ? b : k + 1]];
      CHECK(triple(g.vertices[i], q0, q1) > 0.0);
      // the ring neighbor matches the recorded primal edge
      const Edge& ed = g.edges[d.cell_edges[k]];
      const int other = (ed.v0 == i) ? ed.v1 : ed.v0;
      CHECK((ed.v0 == i || ed.v1 == i));
      CHECK(other == d.cell_neighbors[k]);
    }
    CHECK(d.cell_radius[i] > 0.0);
    CHECK(d.cell_radius[i] <= d.h);
  }
}

TEST_CASE("dual construction is deterministic") {
  const DelaunayGrid g = refine(build_icosahedron());
  const VoronoiDual a = build_voronoi_dual(g);
  const VoronoiDual b = build_voronoi_dual(g);
  CHECK(a.cell_tris == b.cell_tris);
  CHECK(a.cell_neighbors == b.cell_neighbors);
  CHECK(a.cell_area == b.cell_area);
  CHECK(a.dual_length == b.dual_length);
  CHECK(a.h == b.h);
}

TEST_CASE("dual of a non-delaunay grid is rejected") {
  DelaunayGrid bad = refine(refine(build_icosahedron()));
  const auto& t = bad.triangles[11];
  const UnitVec3 q = circumcenter(bad.vertices[t[0]], bad.vertices[t[1]], bad.vertices[t[2]]);
  int victim = -1;
  for (int v = 0; v < bad.vertex_count() && victim < 0; ++v)
    if (v != t[0] && v != t[1] && v != t[2] &&
        geodesic_distance(q, bad.vertices[v]) < 2.5 * geodesic_distance(q, bad.vertices[t[0]]))
      victim = v;
  REQUIRE(victim >= 0);
  bad.vertices[victim] = UnitVec3::normalize(q + 0.05 * (bad.vertices[victim] - q.vec()));
  CHECK_THROWS_AS(build_voronoi_dual(bad), NumericalError);
  CHECK_THROWS_WITH(build_voronoi_dual(bad),
                    Catch::Matchers::ContainsSubstring("Delaunay criterion violated"));
}

TEST_CASE("uniformity flags degenerate duals") {
  const DelaunayGrid g = build_icosahedron();
  VoronoiDual d = build_voronoi_dual(g);
  d.dual_length[3] = 0.0;
  const UniformityReport u = check_uniformity(d);
  CHECK(u.degenerate);
  CHECK(std::isinf(u.c0));
  CHECK(u.min_dual_length == 0.0);
}
