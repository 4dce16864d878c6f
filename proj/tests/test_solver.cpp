#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "svdg/problems.hpp"
#include "svdg/solver.hpp"

using namespace svdg;

namespace {
DelaunayGrid grid_at(int level) {
  DelaunayGrid g = build_icosahedron();
  for (int l = 0; l < level; ++l) g = refine(g);
  return g;
}

SparseSystem heikes_system(int level) {
  const DelaunayGrid g = grid_at(level);
  const VoronoiDual d = build_voronoi_dual(g);
  return assemble(g, d, heikes_problem().f);
}
}  // namespace

TEST_CASE("deflate") {
  const std::vector<double> areas{1.0, 2.0, 3.0, 4.0};

  SECTION("constants deflate to zero") {
    const std::vector<double> z = deflate({5.0, 5.0, 5.0, 5.0}, areas);
    for (double v : z) CHECK(std::abs(v) < 1e-14);
  }
  SECTION("idempotent") {
    const std::vector<double> v{1.0, -2.0, 0.5, 7.0};
    const std::vector<double> once = deflate(v, areas);
    const std::vector<double> twice = deflate(once, areas);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(twice[i] - once[i]) < 1e-15);
    double wmean = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) wmean += areas[i] * once[i];
    CHECK(std::abs(wmean) < 1e-14);
  }
}

TEST_CASE("conjugate gradient solve") {
  SECTION("zero right hand side returns zero in zero iterations") {
    const DelaunayGrid g = grid_at(1);
    const VoronoiDual d = build_voronoi_dual(g);
    const SparseSystem sys = assemble(g, d, [](const UnitVec3&) { return 0.0; });
    auto [u, report] = solve(sys);
    CHECK(report.iterations == 0);
    for (double v : u.values) CHECK(v == 0.0);
  }

  SECTION("matches the dense minimum-norm oracle on small systems") {
    for (int level : {0, 1}) {
      const SparseSystem sys = heikes_system(level);
      auto [u, report] = solve(sys);
      const std::vector<double> dense = deflate(oracle::dense_minimum_norm(sys), sys.cell_area);
      double max_diff = 0.0;
      for (int i = 0; i < sys.size(); ++i)
        max_diff = std::max(max_diff, std::abs(u[i] - dense[i]));
      INFO("level " << level << " max deviation " << max_diff);
      CHECK(max_diff < 1e-9);
      CHECK(std::abs(report.mean_of_solution) <= 1e-12);
    }
  }

  SECTION("invariant under a constant shift of the data") {
    const SparseSystem sys = heikes_system(1);
    auto [u, report] = solve(sys);

    SparseSystem shifted = sys;
    for (double& b : shifted.rhs) b += 3.75;
    const std::vector<double> unit_weights(sys.size(), 1.0);
    shifted.rhs = deflate(std::move(shifted.rhs), unit_weights);
    auto [u2, report2] = solve(shifted);
    for (int i = 0; i < sys.size(); ++i) CHECK(u2[i] == Catch::Approx(u[i]).margin(1e-10));
  }

  SECTION("error decreases monotonically in the energy norm") {
    for (int level : {0, 1}) {
      const SparseSystem sys = heikes_system(level);
      const std::vector<double> exact = deflate(oracle::dense_minimum_norm(sys), sys.cell_area);
      std::vector<double> energies;
      auto observer = [&](int, std::span<const double> x) {
        std::vector<double> e(x.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = x[i] - exact[i];
        const std::vector<double> ae = sys.multiply(e);
        double en = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) en += e[i] * ae[i];
        energies.push_back(en);
      };
      solve(sys, {}, observer);
      for (std::size_t k = 0; k + 1 < energies.size(); ++k)
        CHECK(energies[k + 1] <= energies[k] * (1.0 + 1e-12) + 1e-18);
    }
  }

  SECTION("incompatible sources are rejected") {
    SparseSystem sys = heikes_system(1);
    sys.rhs = sys.cell_area;  // grossly incompatible
    CHECK_THROWS_WITH(solve(sys), Catch::Matchers::ContainsSubstring("incompatible source"));
  }

  SECTION("non-convergence carries the residual history") {
    const SparseSystem sys = heikes_system(2);
    SolveOptions opts;
    opts.max_iter = 3;
    try {
      solve(sys, opts);
      FAIL("expected SolveError");
    } catch (const SolveError& e) {
      CHECK(e.residual_history.size() == 3);
      CHECK(e.residual_history.back() > opts.rel_tol);
    }
  }

  SECTION("option validation") {
    const SparseSystem sys = heikes_system(0);
    SolveOptions opts;
    opts.rel_tol = 0.0;
    CHECK_THROWS_AS(solve(sys, opts), std::invalid_argument);
    opts.rel_tol = 2.0;
    CHECK_THROWS_AS(solve(sys, opts), std::invalid_argument);
  }

  SECTION("diagonal preconditioning reaches the same answer") {
    const SparseSystem sys = heikes_system(2);
    auto [u, r1] = solve(sys);
    SolveOptions opts;
    opts.diag_precond = true;
    auto [v, r2] = solve(sys, opts);
    for (int i = 0; i < sys.size(); ++i) CHECK(v[i] == Catch::Approx(u[i]).margin(1e-9));
  }
}
