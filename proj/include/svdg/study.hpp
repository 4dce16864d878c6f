#pragma once

// Convergence-study driver shared by the CLI and the acceptance suite:
// builds the grid hierarchy (refining level by level, with Lloyd
// optimization per level for SCVT), solves the Poisson problem on each
// level, and reports errors plus empirical rates as CSV.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "svdg/norms.hpp"
#include "svdg/problems.hpp"
#include "svdg/scvt.hpp"
#include "svdg/solver.hpp"

namespace svdg {

enum class GridKind { nopt, scvt };

inline const char* to_string(GridKind k) { return k == GridKind::nopt ? "nopt" : "scvt"; }

inline GridKind grid_kind_from_string(const std::string& s) {
  if (s == "nopt") return GridKind::nopt;
  if (s == "scvt") return GridKind::scvt;
  throw std::invalid_argument("unknown grid kind '" + s + "' (expected nopt or scvt)");
}

struct StudyConfig {
  GridKind kind = GridKind::nopt;
  int level_min = 0;
  int level_max = 6;
  std::string problem = "heikes";
  double scvt_tol = 1e-8;
  int scvt_max_iter = 500;
  int quad_depth = 2;
  double cg_tol = 1e-10;
  std::string out;  // CSV path; empty = standard output
};

inline void validate(const StudyConfig& cfg) {
  if (cfg.level_min < 0 || cfg.level_min > cfg.level_max || cfg.level_max > 8)
    throw std::invalid_argument("levels must satisfy 0 <= min <= max <= 8");
  if (cfg.quad_depth < 0 || cfg.quad_depth > 8)
    throw std::invalid_argument("quad depth must lie in [0, 8]");
  if (!(cfg.scvt_tol > 0.0)) throw std::invalid_argument("scvt tolerance must be positive");
  if (!(cfg.cg_tol > 0.0 && cfg.cg_tol < 1.0))
    throw std::invalid_argument("cg tolerance must lie in (0, 1)");
}

/// 10 significant digits, '.' decimal separator, locale independent.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct StudyRow {
  int level = 0;
  int n = 0;
  double h = 0.0;
  ErrorReport err;
  std::optional<double> cr_l2, cr_h1, cr_max, cr_w1inf;
};

/// Builds the grid hierarchy up to `level`. SCVT grids are produced
/// hierarchically: each refinement of the previous optimized grid is
/// re-optimized by Lloyd's algorithm (the icosahedron itself is already
/// centroidal). Collects per-level Lloyd reports when asked.
inline DelaunayGrid build_grid(GridKind kind, int level, double scvt_tol = 1e-8,
                               int scvt_max_iter = 500,
                               std::vector<LloydReport>* lloyd_reports = nullptr,
                               std::ostream* diag = nullptr) {
  DelaunayGrid g = build_icosahedron();
  for (int l = 0; l <= level; ++l) {
    if (l > 0) g = refine(g);
    if (kind == GridKind::scvt) {
      auto [optimized, report] = lloyd_optimize(std::move(g), scvt_tol, scvt_max_iter);
      g = std::move(optimized);
      if (diag)
        (*diag) << "lloyd level " << l << ": " << report.iterations << " iterations, max move "
                << report.final_max_move << '\n';
      if (report.final_max_move >= scvt_tol)
        throw NumericalError("Lloyd iteration did not reach tol " + format_number(scvt_tol) +
                             " within " + std::to_string(scvt_max_iter) +
                             " iterations at level " + std::to_string(l) + " (max move " +
                             format_number(report.final_max_move) +
                             "); raise --scvt-max-iter or loosen --scvt-tol");
      if (lloyd_reports) lloyd_reports->push_back(std::move(report));
    }
  }
  return g;
}

/// Continuous mean of the lifted nodal field, by the same quadrature used
/// for the norms.
inline double lift_mean(const DelaunayGrid& g, const NodalField& u, QuadratureRule rule = {}) {
  double integral = 0.0, measure = 0.0;
  for (const auto& tri : g.triangles) {
    const double u0 = u[tri[0]], u1 = u[tri[1]], u2 = u[tri[2]];
    for_each_quad_node(g.vertices[tri[0]], g.vertices[tri[1]], g.vertices[tri[2]], rule.depth,
                       [&](const Vec3&, double w, double b0, double b1, double b2) {
                         integral += w * (b0 * u0 + b1 * u1 + b2 * u2);
                         measure += w;
                       });
  }
  return integral / measure;
}

/// Assemble, solve and measure one level. The solver fixes the gauge by the
/// discrete (area-weighted) mean; errors are measured after shifting the
/// lift into the continuous zero-mean space the exact solution lives in.
inline std::pair<StudyRow, SolveReport> solve_level(const DelaunayGrid& g, const VoronoiDual& d,
                                                    const TestProblem& problem, int quad_depth,
                                                    double cg_tol) {
  const SparseSystem sys = assemble(g, d, problem.f, quad_depth);
  SolveOptions opts;
  opts.rel_tol = cg_tol;
  auto [u, solve_report] = solve(sys, opts);

  const QuadratureRule rule{quad_depth};
  const double shift = lift_mean(g, u, rule);
  for (double& v : u.values) v -= shift;

  StudyRow row;
  row.level = g.level;
  row.n = g.vertex_count();
  row.h = d.h;
  row.err = measure_errors(g, problem.u, problem.grad_u, u, rule);
  return {row, solve_report};
}

/// Runs the whole study, reusing each level's grid for the next via
/// refinement. Diagnostics (when a stream is given) describe progress only.
inline std::vector<StudyRow> run_study(const StudyConfig& cfg, std::ostream* diag = nullptr) {
  validate(cfg);
  const TestProblem problem = problem_by_name(cfg.problem);

  std::vector<StudyRow> rows;
  DelaunayGrid g = build_icosahedron();
  for (int level = 0; level <= cfg.level_max; ++level) {
    if (level > 0) g = refine(g);
    if (cfg.kind == GridKind::scvt) {
      auto [optimized, report] = lloyd_optimize(std::move(g), cfg.scvt_tol, cfg.scvt_max_iter);
      g = std::move(optimized);
      if (report.final_max_move >= cfg.scvt_tol)
        throw NumericalError("Lloyd iteration did not converge at level " +
                             std::to_string(level) + "; raise --scvt-max-iter");
      if (diag)
        (*diag) << "lloyd level " << level << ": " << report.iterations << " iterations\n";
    }
    if (level < cfg.level_min) continue;

    const VoronoiDual d = build_voronoi_dual(g);
    auto [row, solve_report] = solve_level(g, d, problem, cfg.quad_depth, cfg.cg_tol);
    if (!rows.empty()) {
      const StudyRow& prev = rows.back();
      row.cr_l2 = convergence_rate(prev.err.err_L2, row.err.err_L2);
      row.cr_h1 = convergence_rate(prev.err.err_H1, row.err.err_H1);
      row.cr_max = convergence_rate(prev.err.err_max, row.err.err_max);
      row.cr_w1inf = convergence_rate(prev.err.err_W1inf, row.err.err_W1inf);
    }
    if (diag)
      (*diag) << "level " << level << ": N=" << row.n << " solved in " << solve_report.iterations
              << " cg iterations, relres " << solve_report.final_relative_residual << '\n';
    rows.push_back(row);
  }
  return rows;
}

inline const char* study_csv_header() {
  return "level,N,h,err_L2,CR_L2,err_H1,CR_H1,err_max,CR_max,err_W1inf,CR_W1inf";
}

inline void write_study_csv(std::ostream& os, const std::vector<StudyRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  os << study_csv_header() << '\n';
  for (const StudyRow& r : rows) {
    os << r.level << ',' << r.n << ',' << format_number(r.h) << ',' << format_number(r.err.err_L2)
       << ',' << opt(r.cr_l2) << ',' << format_number(r.err.err_H1) << ',' << opt(r.cr_h1) << ','
       << format_number(r.err.err_max) << ',' << opt(r.cr_max) << ','
       << format_number(r.err.err_W1inf) << ',' << opt(r.cr_w1inf) << '\n';
  }
}

}  // namespace svdg
