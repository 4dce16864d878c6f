// svdg: spherical Voronoi-Delaunay grids and a finite volume Poisson solver.
//
// Subcommands:
//   grid   build a grid and write it as an SVDGRID file
//   solve  solve the Poisson test problem on one level, print one report row
//   study  multi-level convergence study, written as CSV
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 I/O failure. Diagnostics go to standard error only.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "svdg/grid_io.hpp"
#include "svdg/study.hpp"

namespace {

struct LevelRange {
  int lo = 0, hi = 6;
};

LevelRange parse_levels(const std::string& text) {
  const auto sep = text.find("..");
  if (sep == std::string::npos)
    throw CLI::ValidationError("--levels", "expected A..B, got '" + text + "'");
  LevelRange r;
  try {
    r.lo = std::stoi(text.substr(0, sep));
    r.hi = std::stoi(text.substr(sep + 2));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--levels", "expected integers in A..B, got '" + text + "'");
  }
  return r;
}

int run_grid(int level, const std::string& kind, const std::string& out, double scvt_tol,
             int scvt_max_iter) {
  svdg::StudyConfig probe;  // reuse the range checks
  probe.level_min = 0;
  probe.level_max = level;
  probe.scvt_tol = scvt_tol;
  svdg::validate(probe);

  const svdg::GridKind gk = svdg::grid_kind_from_string(kind);
  const svdg::DelaunayGrid g =
      svdg::build_grid(gk, level, scvt_tol, scvt_max_iter, nullptr, &std::cerr);
  const svdg::VoronoiDual d = svdg::build_voronoi_dual(g);
  const svdg::UniformityReport u = svdg::check_uniformity(d);
  svdg::write_grid_file(out, g);
  std::cout << "kind=" << kind << " level=" << level << " N=" << g.vertex_count()
            << " F=" << g.triangle_count() << " h=" << svdg::format_number(d.h)
            << " C0=" << svdg::format_number(u.c0) << " C1=" << svdg::format_number(u.c1) << '\n';
  return 0;
}

int run_solve(const svdg::StudyConfig& cfg, int level, const std::string& dump_path) {
  svdg::StudyConfig one = cfg;
  one.level_min = one.level_max = level;
  svdg::validate(one);

  const svdg::TestProblem problem = svdg::problem_by_name(one.problem);
  const svdg::DelaunayGrid g =
      svdg::build_grid(one.kind, level, one.scvt_tol, one.scvt_max_iter, nullptr, &std::cerr);
  const svdg::VoronoiDual d = svdg::build_voronoi_dual(g);
  auto [row, report] = svdg::solve_level(g, d, problem, one.quad_depth, one.cg_tol);
  std::cerr << "cg iterations " << report.iterations << ", relative residual "
            << report.final_relative_residual << '\n';
  svdg::write_study_csv(std::cout, {row});

  if (!dump_path.empty()) {
    // Optional nodal field dump: one value per vertex after the solve.
    const svdg::SparseSystem sys = svdg::assemble(g, d, problem.f, one.quad_depth);
    svdg::SolveOptions opts;
    opts.rel_tol = one.cg_tol;
    auto [u, _] = svdg::solve(sys, opts);
    std::ofstream os(dump_path);
    if (!os) throw svdg::IoError("cannot open '" + dump_path + "' for writing");
    os << "SVDFIELD 1 " << u.size() << '\n';
    char line[40];
    for (double v : u.values) {
      std::snprintf(line, sizeof line, "%.17g\n", v);
      os << line;
    }
    if (!os.flush()) throw svdg::IoError("failed while writing '" + dump_path + "'");
  }
  return 0;
}

int run_study_cmd(const svdg::StudyConfig& cfg) {
  svdg::validate(cfg);
  const std::vector<svdg::StudyRow> rows = svdg::run_study(cfg, &std::cerr);
  if (cfg.out.empty()) {
    svdg::write_study_csv(std::cout, rows);
  } else {
    std::ofstream os(cfg.out);
    if (!os) throw svdg::IoError("cannot open '" + cfg.out + "' for writing");
    svdg::write_study_csv(os, rows);
    if (!os.flush()) throw svdg::IoError("failed while writing '" + cfg.out + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spherical Voronoi-Delaunay finite volume toolkit"};
  app.require_subcommand(1);

  int level = 0;
  std::string levels_text;
  std::string kind = "nopt";
  std::string problem = "heikes";
  std::string out;
  double scvt_tol = 1e-8;
  int scvt_max_iter = 500;
  int quad_depth = 2;
  double cg_tol = 1e-10;

  CLI::App* grid = app.add_subcommand("grid", "build a grid and write an SVDGRID file");
  grid->add_option("--level", level, "refinement level")->required();
  grid->add_option("--kind", kind, "grid kind")->check(CLI::IsMember({"nopt", "scvt"}));
  grid->add_option("--out", out, "output path")->required();
  grid->add_option("--scvt-tol", scvt_tol, "Lloyd stopping tolerance (radians)");
  grid->add_option("--scvt-max-iter", scvt_max_iter, "Lloyd iteration budget");

  CLI::App* solve = app.add_subcommand("solve", "solve the test problem on one level");
  solve->add_option("--level", level, "refinement level")->required();
  solve->add_option("--kind", kind, "grid kind")->check(CLI::IsMember({"nopt", "scvt"}));
  solve->add_option("--problem", problem, "test problem")
      ->check(CLI::IsMember({"heikes", "constant"}));
  solve->add_option("--scvt-tol", scvt_tol, "Lloyd stopping tolerance (radians)");
  solve->add_option("--scvt-max-iter", scvt_max_iter, "Lloyd iteration budget");
  solve->add_option("--quad-depth", quad_depth, "quadrature subdivision depth");
  solve->add_option("--cg-tol", cg_tol, "CG relative residual tolerance");
  solve->add_option("--out", out, "optional nodal field dump path");

  CLI::App* study = app.add_subcommand("study", "multi-level convergence study (CSV)");
  study->add_option("--levels", levels_text, "level range A..B")->required();
  study->add_option("--kind", kind, "grid kind")->check(CLI::IsMember({"nopt", "scvt"}));
  study->add_option("--problem", problem, "test problem")
      ->check(CLI::IsMember({"heikes", "constant"}));
  study->add_option("--scvt-tol", scvt_tol, "Lloyd stopping tolerance (radians)");
  study->add_option("--scvt-max-iter", scvt_max_iter, "Lloyd iteration budget");
  study->add_option("--quad-depth", quad_depth, "quadrature subdivision depth");
  study->add_option("--cg-tol", cg_tol, "CG relative residual tolerance");
  study->add_option("--out", out, "CSV output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly, everything else is a config error
  }

  try {
    svdg::StudyConfig cfg;
    cfg.kind = svdg::grid_kind_from_string(kind);
    cfg.problem = problem;
    cfg.scvt_tol = scvt_tol;
    cfg.scvt_max_iter = scvt_max_iter;
    cfg.quad_depth = quad_depth;
    cfg.cg_tol = cg_tol;
    cfg.out = out;

    if (grid->parsed()) return run_grid(level, kind, out, scvt_tol, scvt_max_iter);
    if (solve->parsed()) return run_solve(cfg, level, out);
    const LevelRange r = parse_levels(levels_text);
    cfg.level_min = r.lo;
    cfg.level_max = r.hi;
    return run_study_cmd(cfg);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const svdg::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const svdg::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
