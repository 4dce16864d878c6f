#pragma once

// Lloyd iteration producing spherical centroidal Voronoi tessellations with
// constant density. Connectivity stays fixed during the iteration and the
// Delaunay criterion is re-verified at convergence.

#include <exception>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "svdg/quadrature.hpp"

namespace svdg {

struct CellMoments {
  double area = 0.0;  // integral of 1 over the cell
  Vec3 first{};       // integral of y over the cell
};

/// Quadrature moments of a cell whose ccw corner ring is ring_at(0..n-1).
template <class RingAt>
inline CellMoments cell_moments_at(const UnitVec3& generator, int n, RingAt&& ring_at,
                                   int depth) {
  CellMoments m;
  for (int k = 0; k < n; ++k) {
    for_each_quad_node(generator, ring_at(k), ring_at((k + 1) % n), depth,
                       [&](const Vec3& p, double w, double, double, double) {
                         m.area += w;
                         m.first += (w / norm(p)) * p;
                       });
  }
  return m;
}

/// Quadrature moments of a cell given its generator and ccw corner ring.
inline CellMoments cell_moments(const UnitVec3& generator, std::span<const UnitVec3> ring,
                                int depth) {
  return cell_moments_at(generator, static_cast<int>(ring.size()),
                         [&](int k) -> const UnitVec3& { return ring[k]; }, depth);
}

/// On the unit sphere, int |y - x|^2 ds(y) = 2*area - 2*x.m with m the first
/// moment, so both the energy and its sphere-constrained minimizer come from
/// the same two integrals.
inline double cell_energy(const UnitVec3& generator, const CellMoments& m) {
  return 2.0 * m.area - 2.0 * dot(generator, m.first);
}

/// The sphere-constrained mass centroid m/|m| of a cell, the minimizer of
/// F(x) = int_cell |y - x|^2 ds(y) over the sphere. Throws when the moment
/// vanishes (cell symmetric through the origin).
inline UnitVec3 constrained_centroid(std::span<const UnitVec3> ring, const UnitVec3& generator,
                                     int depth = 1) {
  const CellMoments m = cell_moments(generator, ring, depth);
  if (!(m.area > 0.0))
    throw NumericalError("constrained centroid undefined: cell has no area");
  if (!(norm(m.first) > 1e-8 * m.area))
    throw NumericalError("constrained centroid undefined: first moment vanishes");
  return UnitVec3::normalize(m.first);
}

/// Total quantization energy sum_i int_{V_i} |y - x_i|^2 ds(y).
inline double scvt_energy(const DelaunayGrid& g, const VoronoiDual& d, int depth = 1) {
  double energy = 0.0;
  for (int i = 0; i < g.vertex_count(); ++i) {
    const int b = d.ring_begin(i), n = d.ring_size(i);
    const CellMoments m = cell_moments_at(
        g.vertices[i], n,
        [&](int k) -> const UnitVec3& { return d.circumcenters[d.cell_tris[b + k]]; }, depth);
    energy += cell_energy(g.vertices[i], m);
  }
  return energy;
}

struct LloydReport {
  int iterations = 0;
  double final_max_move = std::numeric_limits<double>::infinity();  // radians
  std::vector<double> energy_trace;  // energy before each step, plus the final state
};

/// Lloyd's algorithm: move every generator to its constrained centroid and
/// repeat until the largest move drops below tol or max_iter is reached.
/// The icosahedral connectivity is kept fixed; a Delaunay violation at the
/// end is an error (use a coarser level or fewer/smaller steps).
inline std::pair<DelaunayGrid, LloydReport> lloyd_optimize(DelaunayGrid g, double tol,
                                                           int max_iter, int quad_depth = 1) {
  if (!(tol > 0.0)) throw std::invalid_argument("lloyd_optimize: tol must be positive");
  LloydReport report;
  if (max_iter <= 0) return {std::move(g), report};

  VoronoiDual dual = build_voronoi_dual(g);  // validates the Delaunay criterion up front
  const int n = g.vertex_count();
  const int ntri = g.triangle_count();

  std::vector<UnitVec3> cc(ntri, UnitVec3{});
  std::vector<UnitVec3> next(n, UnitVec3{});
  std::vector<double> cell_e(n), cell_move(n, 0.0);

  // Per-cell work is independent; only the slot owned by each cell/triangle
  // is written, and the reductions below run in fixed order, so the result
  // is identical for any schedule.
  auto sweep = [&](bool move) {
    std::exception_ptr failure = nullptr;
#pragma omp parallel
    {
#pragma omp for schedule(static)
      for (int t = 0; t < ntri; ++t) {
        try {
          const auto& tri = g.triangles[t];
          cc[t] = circumcenter(g.vertices[tri[0]], g.vertices[tri[1]], g.vertices[tri[2]]);
        } catch (...) {
#pragma omp critical
          if (!failure) failure = std::current_exception();
        }
      }
#pragma omp for schedule(static)
      for (int i = 0; i < n; ++i) {
        try {
          const int b = dual.ring_begin(i), rn = dual.ring_size(i);
          const CellMoments m = cell_moments_at(
              g.vertices[i], rn,
              [&](int k) -> const UnitVec3& { return cc[dual.cell_tris[b + k]]; }, quad_depth);
          cell_e[i] = cell_energy(g.vertices[i], m);
          if (move) {
            if (!(norm(m.first) > 1e-8 * m.area))
              throw NumericalError("constrained centroid undefined for cell " +
                                   std::to_string(i));
            next[i] = UnitVec3::normalize(m.first);
            cell_move[i] = geodesic_distance(g.vertices[i], next[i]);
          }
        } catch (...) {
#pragma omp critical
          if (!failure) failure = std::current_exception();
        }
      }
    }
    if (failure) std::rethrow_exception(failure);
    double energy = 0.0, max_move = 0.0;
    for (int i = 0; i < n; ++i) {
      energy += cell_e[i];
      max_move = std::max(max_move, cell_move[i]);
    }
    return std::pair<double, double>{energy, max_move};
  };

  for (int it = 1; it <= max_iter; ++it) {
    const auto [energy, max_move] = sweep(true);
    report.energy_trace.push_back(energy);
    g.vertices = next;
    report.iterations = it;
    report.final_max_move = max_move;
    if (max_move < tol) break;
  }
  report.energy_trace.push_back(sweep(false).first);  // energy of the final state

  try {
    build_voronoi_dual(g);
  } catch (const NumericalError& err) {
    throw NumericalError(std::string(err.what()) +
                         " after Lloyd optimization; retry with a different level or a larger "
                         "tolerance");
  }
  return {std::move(g), report};
}

}  // namespace svdg
