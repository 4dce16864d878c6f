#pragma once

// Interpolation operators and evaluation of the lifted piecewise-linear
// space: nodal values on the primal grid define an affine function on each
// chord triangle, composed with the inverse radial projection.

#include <array>
#include <limits>
#include <vector>

#include "svdg/fv.hpp"

namespace svdg {

/// Nodal interpolant: values[i] = u(x_i).
template <class F>
inline NodalField interp_nodal(const DelaunayGrid& g, F&& u) {
  NodalField out;
  out.values.reserve(g.vertices.size());
  for (const UnitVec3& x : g.vertices) out.values.push_back(u(x));
  return out;
}

/// Piecewise-constant interpolant on the dual: cell i carries u(x_i). For a
/// nodal field this is the transfer onto cell constants (the same numbers).
template <class F>
inline std::vector<double> interp_piecewise_const(const DelaunayGrid& g, F&& u) {
  std::vector<double> out;
  out.reserve(g.vertices.size());
  for (const UnitVec3& x : g.vertices) out.push_back(u(x));
  return out;
}

inline std::vector<double> transfer_to_cells(const NodalField& u) { return u.values; }

/// Point location and evaluation for the lifted space. Location walks the
/// triangle adjacency from a caller-provided hint; membership is decided by
/// barycentric coordinates of the planar preimage with tolerance 1e-12.
class LiftEvaluator {
 public:
  explicit LiftEvaluator(const DelaunayGrid& g)
      : grid_(&g), neighbors_(triangle_neighbors(g)) {
    plane_normal_.reserve(g.triangles.size());
    plane_dist_.reserve(g.triangles.size());
    for (const auto& tri : g.triangles) {
      const Vec3& a = g.vertices[tri[0]].vec();
      const Vec3 n = cross(g.vertices[tri[1]] - a, g.vertices[tri[2]] - a);
      const Vec3 unit_n = n / norm(n);
      plane_normal_.push_back(unit_n);
      plane_dist_.push_back(dot(unit_n, a));  // positive for outward ccw triangles
    }
  }

  /// Barycentric coordinates of the planar preimage of x in triangle t.
  std::array<double, 3> barycentric(int t, const UnitVec3& x) const {
    const auto& tri = grid_->triangles[t];
    const Vec3& a = grid_->vertices[tri[0]].vec();
    const double along = dot(plane_normal_[t], x.vec());
    const Vec3 p = (plane_dist_[t] / along) * x.vec();  // preimage on the chord plane
    const Vec3 e1 = grid_->vertices[tri[1]] - a;
    const Vec3 e2 = grid_->vertices[tri[2]] - a;
    const Vec3 rhs = p - a;
    const double g11 = dot(e1, e1), g12 = dot(e1, e2), g22 = dot(e2, e2);
    const double det = g11 * g22 - g12 * g12;
    const double s = (dot(rhs, e1) * g22 - dot(rhs, e2) * g12) / det;
    const double t2 = (dot(rhs, e2) * g11 - dot(rhs, e1) * g12) / det;
    return {1.0 - s - t2, s, t2};
  }

  /// Index of the geodesic triangle containing x.
  int locate(const UnitVec3& x, int hint = 0) const {
    const int ntri = grid_->triangle_count();
    int t = (hint >= 0 && hint < ntri) ? hint : 0;
    for (int step = 0; step < ntri; ++step) {
      if (dot(plane_normal_[t], x.vec()) > 1e-12) {
        const std::array<double, 3> b = barycentric(t, x);
        const int worst = (b[0] <= b[1] && b[0] <= b[2]) ? 0 : (b[1] <= b[2] ? 1 : 2);
        if (b[worst] >= -1e-12) return t;
        t = neighbors_[t][(worst + 1) % 3];  // cross the edge opposite the worst corner
        continue;
      }
      // x is on the far hemisphere of this triangle's plane: hop toward it.
      t = nearest_neighbor_toward(t, x);
    }
    return brute_force_locate(x);
  }

  /// Value at x of the lift of the nodal field u.
  double evaluate(const NodalField& u, const UnitVec3& x, int* hint = nullptr) const {
    const int t = locate(x, hint ? *hint : 0);
    if (hint) *hint = t;
    const std::array<double, 3> b = barycentric(t, x);
    const auto& tri = grid_->triangles[t];
    return b[0] * u[tri[0]] + b[1] * u[tri[1]] + b[2] * u[tri[2]];
  }

  /// The constant in-plane gradient of the affine interpolant on chord
  /// triangle t (the discrete tangential gradient of the lift).
  Vec3 triangle_gradient(const NodalField& u, int t) const {
    const auto& tri = grid_->triangles[t];
    const Vec3& a = grid_->vertices[tri[0]].vec();
    const Vec3 e1 = grid_->vertices[tri[1]] - a;
    const Vec3 e2 = grid_->vertices[tri[2]] - a;
    const double d1 = u[tri[1]] - u[tri[0]];
    const double d2 = u[tri[2]] - u[tri[0]];
    const double g11 = dot(e1, e1), g12 = dot(e1, e2), g22 = dot(e2, e2);
    const double det = g11 * g22 - g12 * g12;
    const double alpha = (d1 * g22 - d2 * g12) / det;
    const double beta = (d2 * g11 - d1 * g12) / det;
    return alpha * e1 + beta * e2;
  }

  const DelaunayGrid& grid() const { return *grid_; }

 private:
  int nearest_neighbor_toward(int t, const UnitVec3& x) const {
    int best = neighbors_[t][0];
    double best_d = geodesic_distance(x, grid_->vertices[grid_->triangles[best][0]]);
    for (int s = 1; s < 3; ++s) {
      const int cand = neighbors_[t][s];
      const double d = geodesic_distance(x, grid_->vertices[grid_->triangles[cand][0]]);
      if (d < best_d) {
        best_d = d;
        best = cand;
      }
    }
    return best;
  }

  int brute_force_locate(const UnitVec3& x) const {
    int best = 0;
    double best_min_bary = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < grid_->triangle_count(); ++t) {
      if (dot(plane_normal_[t], x.vec()) <= 0.0) continue;
      const std::array<double, 3> b = barycentric(t, x);
      const double mb = std::min({b[0], b[1], b[2]});
      if (mb > best_min_bary) {
        best_min_bary = mb;
        best = t;
      }
    }
    return best;
  }

  const DelaunayGrid* grid_;
  std::vector<std::array<int, 3>> neighbors_;
  std::vector<Vec3> plane_normal_;
  std::vector<double> plane_dist_;
};

}  // namespace svdg
