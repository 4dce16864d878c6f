#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "svdg/scvt.hpp"

using namespace svdg;

namespace {

DelaunayGrid grid_at(int level) {
  DelaunayGrid g = build_icosahedron();
  for (int l = 0; l < level; ++l) g = refine(g);
  return g;
}

std::vector<UnitVec3> ring_of(const VoronoiDual& d, int i) {
  std::vector<UnitVec3> ring;
  for (int k = d.ring_begin(i); k < d.ring_end(i); ++k)
    ring.push_back(d.circumcenters[d.cell_tris[k]]);
  return ring;
}

// small deterministic tangent perturbation that keeps the grid Delaunay
DelaunayGrid perturb(DelaunayGrid g, double amplitude, unsigned seed) {
  auto gen = oracle::rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (UnitVec3& v : g.vertices) {
    Vec3 t{u(gen), u(gen), u(gen)};
    t = t - dot(t, v.vec()) * v.vec();
    v = UnitVec3::normalize(v + amplitude * t);
  }
  return g;
}

Vec3 rotate(const Vec3& axis_angle, const Vec3& p) {
  const double angle = norm(axis_angle);
  const Vec3 k = axis_angle / angle;
  return std::cos(angle) * p + std::sin(angle) * cross(k, p) +
         (1.0 - std::cos(angle)) * dot(k, p) * k;
}

}  // namespace

TEST_CASE("constrained centroid") {
  const DelaunayGrid g = build_icosahedron();
  const VoronoiDual d = build_voronoi_dual(g);

  SECTION("pentagonal cells are already centroidal") {
    for (int i = 0; i < 12; ++i) {
      const UnitVec3 c = constrained_centroid(ring_of(d, i), g.vertices[i]);
      CHECK(geodesic_distance(c, g.vertices[i]) < 1e-13);
    }
  }

  SECTION("a cell symmetric about the north pole centers on the pole") {
    std::vector<UnitVec3> ring;
    for (int k = 0; k < 6; ++k)
      ring.push_back(to_unit({1.1, 2.0 * M_PI * k / 6.0}));
    const UnitVec3 c = constrained_centroid(ring, UnitVec3::trusted({0, 0, 1}));
    CHECK(geodesic_distance(c, UnitVec3::trusted({0, 0, 1})) < 1e-14);
  }

  SECTION("minimizes the quantization energy over random candidates") {
    const DelaunayGrid g2 = grid_at(2);
    const VoronoiDual d2 = build_voronoi_dual(g2);
    const int cell = 17;
    const UnitVec3 c = constrained_centroid(ring_of(d2, cell), g2.vertices[cell]);
    auto energy_at = [&](const UnitVec3& p) {
      return integrate_cell(
          g2, d2, cell, [&](const UnitVec3& y) { return norm_squared(y - p); }, 3);
    };
    const double at_centroid = energy_at(c);
    auto gen = oracle::rng(21);
    for (int k = 0; k < 1000; ++k)
      CHECK(at_centroid <= energy_at(oracle::random_unit(gen)) + 1e-15);
  }

  SECTION("degenerate cells have no centroid") {
    // both fan planes pass through the origin, so the quadrature measure of
    // this origin-symmetric sliver vanishes along with its first moment
    std::vector<UnitVec3> ring{UnitVec3::trusted({0, 0, 1}), UnitVec3::trusted({0, 0, -1})};
    CHECK_THROWS_WITH(constrained_centroid(ring, UnitVec3::trusted({1, 0, 0}), 1),
                      Catch::Matchers::ContainsSubstring("centroid undefined"));
  }
}

TEST_CASE("lloyd iteration") {
  SECTION("icosahedron converges immediately with zero movement") {
    auto [g, report] = lloyd_optimize(build_icosahedron(), 1e-10, 100);
    CHECK(report.iterations == 1);
    CHECK(report.final_max_move < 1e-13);
    const DelaunayGrid ref = build_icosahedron();
    for (int i = 0; i < 12; ++i) CHECK(geodesic_distance(g.vertices[i], ref.vertices[i]) < 1e-13);
  }

  SECTION("max_iter = 0 returns the input unchanged") {
    const DelaunayGrid in = grid_at(1);
    auto [g, report] = lloyd_optimize(in, 1e-10, 0);
    CHECK(report.iterations == 0);
    CHECK(report.energy_trace.empty());
    for (int i = 0; i < in.vertex_count(); ++i)
      CHECK(norm(g.vertices[i] - in.vertices[i]) == 0.0);
  }

  SECTION("nonpositive tolerance is rejected") {
    CHECK_THROWS_AS(lloyd_optimize(build_icosahedron(), 0.0, 10), std::invalid_argument);
  }

  SECTION("converges on a level-2 grid with monotone energy") {
    auto [g, report] = lloyd_optimize(grid_at(2), 1e-10, 5000);
    CHECK(report.final_max_move < 1e-10);
    CHECK(report.iterations < 5000);
    REQUIRE(report.energy_trace.size() == static_cast<std::size_t>(report.iterations) + 1);
    for (std::size_t k = 0; k + 1 < report.energy_trace.size(); ++k)
      CHECK(report.energy_trace[k + 1] <= report.energy_trace[k] + 1e-12);

    // a centroidal grid is a fixed point of one more step
    auto [g2, again] = lloyd_optimize(g, 1e-15, 1);
    CHECK(again.final_max_move < 1e-9);

    auto [g3, tight] = lloyd_optimize(std::move(g2), 1e-13, 5000);
    auto [g4, fixed] = lloyd_optimize(std::move(g3), 1e-15, 1);
    CHECK(fixed.final_max_move < 1e-12);
  }

  SECTION("one step commutes with rotations") {
    const Vec3 axis_angle = 0.7 * UnitVec3::normalize({1, 2, 3}).vec();
    const DelaunayGrid base = perturb(grid_at(1), 0.01, 31);

    auto [stepped, r1] = lloyd_optimize(base, 1e-15, 1);
    DelaunayGrid rotated = base;
    for (UnitVec3& v : rotated.vertices) v = UnitVec3::normalize(rotate(axis_angle, v.vec()));
    auto [rotated_stepped, r2] = lloyd_optimize(rotated, 1e-15, 1);

    for (int i = 0; i < base.vertex_count(); ++i) {
      const Vec3 expect = rotate(axis_angle, stepped.vertices[i].vec());
      CHECK(norm(rotated_stepped.vertices[i] - expect) < 1e-12);
    }
  }
}

TEST_CASE("quantization energy") {
  SECTION("invariant under rotations of the grid") {
    const DelaunayGrid g = grid_at(1);
    const double e0 = scvt_energy(g, build_voronoi_dual(g));
    DelaunayGrid rotated = g;
    const Vec3 axis_angle = 1.3 * UnitVec3::normalize({-2, 1, 5}).vec();
    for (UnitVec3& v : rotated.vertices) v = UnitVec3::normalize(rotate(axis_angle, v.vec()));
    const double e1 = scvt_energy(rotated, build_voronoi_dual(rotated));
    CHECK(e1 == Catch::Approx(e0).epsilon(1e-12));
  }

  SECTION("one lloyd step decreases the energy of a perturbed grid") {
    const DelaunayGrid g = perturb(grid_at(2), 0.02, 32);
    const double before = scvt_energy(g, build_voronoi_dual(g));
    auto [stepped, report] = lloyd_optimize(g, 1e-15, 1);
    const double after = scvt_energy(stepped, build_voronoi_dual(stepped));
    CHECK(after < before);
  }

  SECTION("refinement decreases the energy") {
    DelaunayGrid g = build_icosahedron();
    double prev = scvt_energy(g, build_voronoi_dual(g));
    for (int level = 1; level <= 3; ++level) {
      g = refine(g);
      const double e = scvt_energy(g, build_voronoi_dual(g));
      CHECK(e < prev);
      prev = e;
    }
  }
}
