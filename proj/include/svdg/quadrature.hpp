#pragma once

// Quadrature on geodesic triangles via their planar chord triangle and the
// radial-projection area Jacobian J(x*) = dist(origin, plane)/|x*|^3. The
// base rule is the 3-point edge-midpoint rule (degree 2) applied on a
// uniform 4^depth subdivision of the chord triangle.

#include <span>
#include <utility>
#include <vector>

#include "svdg/voronoi.hpp"

namespace svdg {

struct QuadratureRule {
  int depth = 2;  // subdivision levels per geodesic triangle
};

/// Visits every quadrature node of the geodesic triangle spanned by a, b, c.
/// fn(p, w, b0, b1, b2): p is the node on the chord triangle (project with
/// p/|p| for the spherical point), w the spherical-measure weight, and
/// (b0,b1,b2) the barycentric coordinates of p with respect to (a, b, c).
template <class Fn>
inline void for_each_quad_node(const Vec3& a, const Vec3& b, const Vec3& c, int depth, Fn&& fn) {
  const Vec3 nrm = cross(b - a, c - a);
  const double nn = norm(nrm);
  if (!(nn > 0.0)) return;
  const double plane_dist = std::abs(dot(nrm, a)) / nn;

  if (depth == 1) {
    // One subdivision level has only nine distinct nodes: the three interior
    // ones are shared between the central and a corner subtriangle, so they
    // are visited once with the combined weight.
    const Vec3 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mca = 0.5 * (c + a);
    const double area_a = 0.5 * norm(cross(mab - a, mca - a));
    const double area_b = 0.5 * norm(cross(b - mab, mbc - mab));
    const double area_c = 0.5 * norm(cross(mbc - mca, c - mca));
    const double area_m = 0.5 * norm(cross(mbc - mab, mca - mab));
    auto node = [&](const Vec3& p, double wa, double b1, double b2) {
      const double r = norm(p);
      fn(p, (wa / 3.0) * plane_dist / (r * r * r), 1.0 - b1 - b2, b1, b2);
    };
    node(0.5 * (a + mab), area_a, 0.25, 0.0);
    node(0.5 * (mca + a), area_a, 0.0, 0.25);
    node(0.5 * (mab + b), area_b, 0.75, 0.0);
    node(0.5 * (b + mbc), area_b, 0.75, 0.25);
    node(0.5 * (mbc + c), area_c, 0.25, 0.75);
    node(0.5 * (c + mca), area_c, 0.0, 0.75);
    node(0.5 * (mab + mbc), area_m + area_b, 0.5, 0.25);
    node(0.5 * (mbc + mca), area_m + area_c, 0.25, 0.5);
    node(0.5 * (mca + mab), area_m + area_a, 0.25, 0.25);
    return;
  }

  const int k = 1 << depth;
  const double inv_k = 1.0 / k;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k - i; ++j) {
      // Lattice cell (i, j): an upward subtriangle, plus a downward one
      // except on the diagonal.
      const double s0 = i * inv_k, t0 = j * inv_k;
      const double s1 = (i + 1) * inv_k, t1 = (j + 1) * inv_k;
      const double up[3][2] = {{s0, t0}, {s1, t0}, {s0, t1}};
      const double dn[3][2] = {{s1, t0}, {s1, t1}, {s0, t1}};
      const int ncells = (i + j < k - 1) ? 2 : 1;
      for (int cell = 0; cell < ncells; ++cell) {
        const double(*bc)[2] = (cell == 0) ? up : dn;
        Vec3 corner[3];
        for (int m = 0; m < 3; ++m) {
          const double s = bc[m][0], t = bc[m][1];
          corner[m] = (1.0 - s - t) * a + s * b + t * c;
        }
        const double sub_area = 0.5 * norm(cross(corner[1] - corner[0], corner[2] - corner[0]));
        for (int m = 0; m < 3; ++m) {
          const int m1 = (m + 1) % 3;
          const Vec3 p = 0.5 * (corner[m] + corner[m1]);
          const double bs = 0.5 * (bc[m][0] + bc[m1][0]);
          const double bt = 0.5 * (bc[m][1] + bc[m1][1]);
          const double r = norm(p);
          const double w = (sub_area / 3.0) * plane_dist / (r * r * r);
          fn(p, w, 1.0 - bs - bt, bs, bt);
        }
      }
    }
  }
}

/// Integral of f over one geodesic triangle. T must support zero-init,
/// += and scaling by double (double and Vec3 both qualify).
template <class T = double, class F>
inline T integrate_triangle(const UnitVec3& a, const UnitVec3& b, const UnitVec3& c, F&& f,
                            int depth) {
  T acc{};
  for_each_quad_node(a, b, c, depth,
                     [&](const Vec3& p, double w, double, double, double) {
                       acc += w * f(UnitVec3::normalize(p));
                     });
  return acc;
}

/// Integral of f over the whole sphere, summed triangle by triangle in
/// deterministic order.
template <class F>
inline double integrate_sphere(const DelaunayGrid& g, F&& f, QuadratureRule rule = {}) {
  double acc = 0.0;
  for (const auto& tri : g.triangles)
    acc += integrate_triangle(g.vertices[tri[0]], g.vertices[tri[1]], g.vertices[tri[2]], f,
                              rule.depth);
  return acc;
}

/// Integral of f over the Voronoi cell of generator i (fan triangulation
/// from the generator, which is interior to the convex cell).
template <class T = double, class F>
inline T integrate_cell(const DelaunayGrid& g, const VoronoiDual& d, int i, F&& f, int depth) {
  const UnitVec3& x = g.vertices[i];
  const int b = d.ring_begin(i), e = d.ring_end(i);
  T acc{};
  for (int k = b; k < e; ++k) {
    const UnitVec3& q0 = d.circumcenters[d.cell_tris[k]];
    const UnitVec3& q1 = d.circumcenters[d.cell_tris[k + 1 == e ? b : k + 1]];
    acc += integrate_triangle<T>(x, q0, q1, f, depth);
  }
  return acc;
}

}  // namespace svdg
