#pragma once

// Deflated conjugate gradients for the singular SPSD flux system. The
// one-dimensional kernel (constants) is handled by projection: the right
// hand side must be compatible, iterates are periodically re-centered, and
// the returned solution has zero area-weighted mean. All reductions run in
// fixed order, so results are bit-reproducible.

#include <cmath>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "svdg/fv.hpp"

namespace svdg {

struct SolveOptions {
  double rel_tol = 1e-10;
  int max_iter = 0;         // 0 means 10 * ceil(sqrt(N))
  int redeflate_every = 50; // guard: re-center the iterate every k iterations
  bool diag_precond = false;
};

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0.0;
  double mean_of_solution = 0.0;  // area-weighted, ~0 by construction
};

class SolveError : public NumericalError {
 public:
  SolveError(const std::string& what, std::vector<double> history)
      : NumericalError(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;  // relative residual per iteration
};

/// Removes the area-weighted mean: v - (sum a_i v_i / sum a_i) * 1.
/// Idempotent.
inline std::vector<double> deflate(std::vector<double> v, std::span<const double> areas) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    num += areas[i] * v[i];
    den += areas[i];
  }
  const double mean = num / den;
  for (double& x : v) x -= mean;
  return v;
}

namespace detail {
inline double dot_seq(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}
}  // namespace detail

/// Solves A u = b for the deflated solution. Requires the compatible (mean
/// free) right hand side produced by assemble(); a non-negligible constant
/// component is an error. Non-convergence throws SolveError carrying the
/// residual history.
inline std::pair<NodalField, SolveReport> solve(
    const SparseSystem& sys, const SolveOptions& opts = {},
    const std::function<void(int, std::span<const double>)>& observer = {}) {
  if (!(opts.rel_tol > 0.0 && opts.rel_tol < 1.0))
    throw std::invalid_argument("solve: rel_tol must lie in (0, 1)");
  const int n = sys.size();
  const int max_iter =
      opts.max_iter > 0 ? opts.max_iter : 10 * static_cast<int>(std::ceil(std::sqrt(n)));

  double b_sum = 0.0, b_l1 = 0.0, b_l2sq = 0.0;
  for (double bi : sys.rhs) {
    b_sum += bi;
    b_l1 += std::abs(bi);
    b_l2sq += bi * bi;
  }
  if (b_l2sq == 0.0) return {NodalField{std::vector<double>(n, 0.0)}, SolveReport{}};
  if (std::abs(b_sum) > 1e-8 * b_l1)
    throw NumericalError("incompatible source: right hand side has a constant component");
  const double b_norm = std::sqrt(b_l2sq);

  std::vector<double> x(n, 0.0), r = sys.rhs, z(n), p(n), q(n);
  std::vector<double> inv_diag;
  if (opts.diag_precond) {
    inv_diag.resize(n);
    for (int i = 0; i < n; ++i) inv_diag[i] = 1.0 / sys.vals[sys.row_offsets[i]];
  }
  auto apply_precond = [&](const std::vector<double>& in, std::vector<double>& out) {
    if (opts.diag_precond)
      for (int i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
    else
      out = in;
  };

  apply_precond(r, z);
  p = z;
  double rz = detail::dot_seq(r, z);

  SolveReport report;
  std::vector<double> history;
  double rel_res = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    sys.multiply(p, q);
    const double pq = detail::dot_seq(p, q);
    if (!(pq > 0.0))
      throw SolveError("conjugate gradients broke down (non-positive curvature)", history);
    const double alpha = rz / pq;
    for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * q[i];

    // Adding a constant to x leaves the residual unchanged (A 1 = 0), so the
    // periodic re-centering only suppresses kernel drift.
    if (opts.redeflate_every > 0 && it % opts.redeflate_every == 0)
      x = deflate(std::move(x), sys.cell_area);

    report.iterations = it;
    rel_res = std::sqrt(detail::dot_seq(r, r)) / b_norm;
    history.push_back(rel_res);
    if (observer) observer(it, x);
    if (rel_res <= opts.rel_tol) break;

    apply_precond(r, z);
    const double rz_next = detail::dot_seq(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (rel_res > opts.rel_tol)
    throw SolveError("conjugate gradients did not converge in " + std::to_string(max_iter) +
                         " iterations (relative residual " + std::to_string(rel_res) + ")",
                     history);

  x = deflate(std::move(x), sys.cell_area);
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += sys.cell_area[i] * x[i];
  report.final_relative_residual = rel_res;
  report.mean_of_solution = mean / sys.total_area;
  return {NodalField{std::move(x)}, report};
}

}  // namespace svdg
