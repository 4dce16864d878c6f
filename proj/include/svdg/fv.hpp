#pragma once

// Finite volume discretization of the Laplace-Beltrami Poisson problem on
// the Voronoi dual: per cell i, sum_j c_ij (u_i - u_j) = int_{V_i} f ds with
// edge coefficient c_ij = dual_edge_length / chord_length. The area-scaled
// system is symmetric positive semidefinite with the constants as kernel.

#include <cstddef>
#include <exception>
#include <span>
#include <string>
#include <vector>

#include "svdg/quadrature.hpp"

namespace svdg {

/// One value per grid vertex.
struct NodalField {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
};

struct SparseSystem {
  // CSR with the diagonal stored first in every row; off-diagonal entries
  // follow the ccw neighbor order of the cell ring. The two copies of each
  // edge coefficient are the same double, so symmetry is exact.
  std::vector<int> row_offsets;
  std::vector<int> cols;
  std::vector<double> vals;

  std::vector<double> rhs;        // b_i = int_{V_i} f ds, deflated
  std::vector<double> cell_area;  // m_a(V_i)
  double total_area = 0.0;

  int size() const { return static_cast<int>(rhs.size()); }

  void multiply(std::span<const double> x, std::span<double> y) const {
    const int n = size();
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) acc += vals[k] * x[cols[k]];
      y[i] = acc;
    }
  }

  std::vector<double> multiply(std::span<const double> x) const {
    std::vector<double> y(size());
    multiply(x, y);
    return y;
  }
};

/// Edge coefficients c_ij = m_l(dual edge) / |x_i - x_j|. A zero-length dual
/// edge makes the scheme degenerate and is an error.
inline std::vector<double> edge_coefficients(const VoronoiDual& d) {
  std::vector<double> c(d.dual_length.size());
  for (std::size_t e = 0; e < c.size(); ++e) {
    if (!(d.dual_length[e] > 0.0))
      throw NumericalError("degenerate grid: dual edge " + std::to_string(e) +
                           " has zero length");
    c[e] = d.dual_length[e] / d.chord_length[e];
  }
  return c;
}

/// Discrete flux from cell i to neighbor j: c_ij (u_i - u_j). Exactly
/// antisymmetric in (i, j). Throws when j is not a neighbor of i.
inline double discrete_flux(const VoronoiDual& d, const NodalField& u, int i, int j) {
  const int e = d.edge_between(i, j);
  if (e < 0)
    throw std::invalid_argument("discrete_flux: vertex " + std::to_string(j) +
                                " is not a neighbor of " + std::to_string(i));
  return (d.dual_length[e] / d.chord_length[e]) * (u[i] - u[j]);
}

/// Mean value of f over the spherical polygon with the given generator and
/// ccw corner ring, by fan quadrature; exact for constants by construction.
template <class F>
inline double source_average(const UnitVec3& generator, std::span<const UnitVec3> ring, F&& f,
                             int depth = 2) {
  double integral = 0.0, measure = 0.0;
  const int n = static_cast<int>(ring.size());
  for (int k = 0; k < n; ++k) {
    for_each_quad_node(generator, ring[k], ring[(k + 1) % n], depth,
                       [&](const Vec3& p, double w, double, double, double) {
                         integral += w * f(UnitVec3::normalize(p));
                         measure += w;
                       });
  }
  return integral / measure;
}

/// Mean value of f over the Voronoi cell of generator i.
template <class F>
inline double source_average(const DelaunayGrid& g, const VoronoiDual& d, int i, F&& f,
                             int depth = 2) {
  std::vector<UnitVec3> ring;
  ring.reserve(d.ring_size(i));
  for (int k = d.ring_begin(i); k < d.ring_end(i); ++k)
    ring.push_back(d.circumcenters[d.cell_tris[k]]);
  return source_average(g.vertices[i], ring, f, depth);
}

/// Assembles the area-scaled system A u = b. Row i encodes
/// sum_j c_ij (u_i - u_j) = int_{V_i} f ds; the source integral is then
/// deflated by a constant shift of f so that sum_i b_i = 0 exactly holds up
/// to roundoff rather than quadrature drift.
template <class F>
inline SparseSystem assemble(const DelaunayGrid& g, const VoronoiDual& d, F&& f,
                             int quad_depth = 2) {
  const int n = g.vertex_count();
  const std::vector<double> c = edge_coefficients(d);

  SparseSystem sys;
  sys.cell_area = d.cell_area;
  sys.row_offsets.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) sys.row_offsets[i + 1] = sys.row_offsets[i] + 1 + d.ring_size(i);
  sys.cols.resize(sys.row_offsets[n]);
  sys.vals.resize(sys.row_offsets[n]);

  for (int i = 0; i < n; ++i) {
    int at = sys.row_offsets[i];
    const int diag_at = at++;
    double diag = 0.0;
    for (int k = d.ring_begin(i); k < d.ring_end(i); ++k, ++at) {
      const double cij = c[d.cell_edges[k]];
      sys.cols[at] = d.cell_neighbors[k];
      sys.vals[at] = -cij;
      diag += cij;
    }
    sys.cols[diag_at] = i;
    sys.vals[diag_at] = diag;
  }

  // Independent per-cell integrals; the deflation sums run in index order,
  // so the assembled system is schedule-independent.
  sys.rhs.resize(n);
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      sys.rhs[i] = integrate_cell(g, d, i, f, quad_depth);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  double total_rhs = 0.0;
  sys.total_area = 0.0;
  for (int i = 0; i < n; ++i) {
    total_rhs += sys.rhs[i];
    sys.total_area += d.cell_area[i];
  }
  const double shift = total_rhs / sys.total_area;
  for (int i = 0; i < n; ++i) sys.rhs[i] -= shift * d.cell_area[i];
  return sys;
}

/// Per-cell residual (A u - b) / m_a(V_i), the scheme's own scaling.
inline std::vector<double> apply_operator(const SparseSystem& sys, const NodalField& u) {
  if (u.size() != sys.size())
    throw std::invalid_argument("apply_operator: field size " + std::to_string(u.size()) +
                                " does not match system size " + std::to_string(sys.size()));
  std::vector<double> r = sys.multiply(u.values);
  for (int i = 0; i < sys.size(); ++i) r[i] = (r[i] - sys.rhs[i]) / sys.cell_area[i];
  return r;
}

}  // namespace svdg
