#pragma once

// Continuous error norms against an analytic reference (L2, H1 seminorm,
// max, W^{1,inf}), the discrete mesh-dependent norms, and the empirical
// convergence rate between refinement levels.

#include <cmath>
#include <optional>

#include "svdg/interp.hpp"

namespace svdg {

struct ErrorReport {
  double err_L2 = 0.0;
  double err_H1 = 0.0;     // tangential-gradient seminorm of the error
  double err_max = 0.0;    // over quadrature nodes and vertices
  double err_W1inf = 0.0;  // over quadrature nodes and triangle centroids
};

/// Errors of the lifted nodal field uh against the exact solution and its
/// tangential gradient. The discrete gradient is the constant in-plane
/// gradient of the affine interpolant per chord triangle.
template <class UF, class GF>
inline ErrorReport measure_errors(const DelaunayGrid& g, UF&& u_exact, GF&& grad_exact,
                                  const NodalField& uh, QuadratureRule rule = {}) {
  const int ntri = g.triangle_count();
  // Per-triangle partials; the reduction below runs in index order so the
  // result does not depend on the parallel schedule.
  std::vector<double> tri_l2(ntri), tri_h1(ntri), tri_max(ntri), tri_ginf(ntri);

#pragma omp parallel for schedule(static)
  for (int t = 0; t < ntri; ++t) {
    const auto& tri = g.triangles[t];
    const UnitVec3& a = g.vertices[tri[0]];
    const UnitVec3& b = g.vertices[tri[1]];
    const UnitVec3& c = g.vertices[tri[2]];
    const double u0 = uh[tri[0]], u1 = uh[tri[1]], u2 = uh[tri[2]];

    // Constant gradient of the affine interpolant in the chord plane.
    const Vec3 e1 = b - a, e2 = c - a;
    const double g11 = dot(e1, e1), g12 = dot(e1, e2), g22 = dot(e2, e2);
    const double det = g11 * g22 - g12 * g12;
    const double d1 = u1 - u0, d2 = u2 - u0;
    const Vec3 grad_h = ((d1 * g22 - d2 * g12) / det) * e1 + ((d2 * g11 - d1 * g12) / det) * e2;

    double l2 = 0.0, h1 = 0.0, emax = 0.0, ginf = 0.0;
    for_each_quad_node(a, b, c, rule.depth,
                       [&](const Vec3& p, double w, double b0, double b1, double b2) {
                         const UnitVec3 s = UnitVec3::normalize(p);
                         const double e = u_exact(s) - (b0 * u0 + b1 * u1 + b2 * u2);
                         l2 += w * e * e;
                         const Vec3 ge = grad_exact(s) - grad_h;
                         h1 += w * norm_squared(ge);
                         emax = std::max(emax, std::abs(e));
                         ginf = std::max(ginf, norm(ge));
                       });
    const UnitVec3 centroid = UnitVec3::normalize(a + b + c);
    ginf = std::max(ginf, norm(grad_exact(centroid) - grad_h));
    tri_l2[t] = l2;
    tri_h1[t] = h1;
    tri_max[t] = emax;
    tri_ginf[t] = ginf;
  }

  ErrorReport rep;
  double l2 = 0.0, h1 = 0.0;
  for (int t = 0; t < ntri; ++t) {
    l2 += tri_l2[t];
    h1 += tri_h1[t];
    rep.err_max = std::max(rep.err_max, tri_max[t]);
    rep.err_W1inf = std::max(rep.err_W1inf, tri_ginf[t]);
  }
  for (int i = 0; i < g.vertex_count(); ++i)
    rep.err_max = std::max(rep.err_max, std::abs(u_exact(g.vertices[i]) - uh[i]));
  rep.err_L2 = std::sqrt(l2);
  rep.err_H1 = std::sqrt(h1);
  return rep;
}

/// Discrete p-norm ||u||_{0,p,h}^p = sum_i m_a(V_i) |u_i|^p, p in {1, 2}.
inline double discrete_norm0(const VoronoiDual& d, const NodalField& u, int p = 2) {
  if (p != 1 && p != 2) throw std::invalid_argument("discrete_norm0: p must be 1 or 2");
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    acc += d.cell_area[i] * (p == 1 ? a : a * a);
  }
  return p == 1 ? acc : std::sqrt(acc);
}

/// Discrete seminorm |u|_{1,p,h}^p =
/// sum_i sum_{j in neighbors} (1/2) m_l(dual edge) d(x_i,x_j)
/// |(u_i - u_j)/|x_i - x_j||^p. The double sum visits every undirected edge
/// twice with weight 1/2, so this evaluates it once per edge.
inline double discrete_seminorm(const DelaunayGrid& g, const VoronoiDual& d, const NodalField& u,
                                int p = 2) {
  if (p != 1 && p != 2) throw std::invalid_argument("discrete_seminorm: p must be 1 or 2");
  double acc = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges[e];
    const double diff = std::abs(u[ed.v0] - u[ed.v1]) / d.chord_length[e];
    const double weight = d.dual_length[e] * d.vertex_distance[e];
    acc += weight * (p == 1 ? diff : diff * diff);
  }
  return p == 1 ? acc : std::sqrt(acc);
}

/// Empirical convergence rate |ln e_next - ln e_prev| / ln 2 between two
/// consecutive refinement levels.
inline double convergence_rate(double e_prev, double e_next) {
  if (!(e_prev > 0.0) || !(e_next > 0.0))
    throw std::invalid_argument("convergence_rate: errors must be positive");
  return std::abs(std::log(e_next) - std::log(e_prev)) / std::log(2.0);
}

}  // namespace svdg
