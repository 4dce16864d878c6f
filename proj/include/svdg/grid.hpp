#pragma once

// Recursively refined icosahedral Delaunay decomposition of the sphere.
// Level l has N = 10*4^l + 2 vertices, F = 20*4^l triangles, E = 30*4^l
// edges. Construction is deterministic: rebuilding a level twice yields
// identical index arrays.

#include <algorithm>
#include <array>
#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "svdg/geom.hpp"

namespace svdg {

struct Edge {
  int v0 = -1, v1 = -1;  // v0 < v1
  int t0 = -1, t1 = -1;  // the two incident triangles, t0 < t1
};

struct DelaunayGrid {
  int level = 0;
  std::vector<UnitVec3> vertices;
  std::vector<std::array<int, 3>> triangles;       // counterclockwise from outside
  std::vector<Edge> edges;                         // sorted by (v0, v1)
  std::vector<std::array<int, 3>> triangle_edges;  // slot s = edge between corners s, s+1

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
};

inline bool is_ccw(const UnitVec3& a, const UnitVec3& b, const UnitVec3& c) {
  return triple(a, b, c) > 0.0;
}

/// Rebuilds edges and triangle_edges from the triangle list. Throws
/// NumericalError if the triangulation is not a closed 2-manifold.
inline void build_edge_topology(DelaunayGrid& g) {
  struct Slot {
    int v0, v1, tri, slot;
  };
  std::vector<Slot> slots;
  slots.reserve(3 * g.triangles.size());
  for (int t = 0; t < g.triangle_count(); ++t) {
    const auto& tri = g.triangles[t];
    for (int s = 0; s < 3; ++s) {
      int a = tri[s], b = tri[(s + 1) % 3];
      if (a > b) std::swap(a, b);
      slots.push_back({a, b, t, s});
    }
  }
  std::sort(slots.begin(), slots.end(), [](const Slot& l, const Slot& r) {
    if (l.v0 != r.v0) return l.v0 < r.v0;
    if (l.v1 != r.v1) return l.v1 < r.v1;
    return l.tri < r.tri;
  });

  g.edges.clear();
  g.triangle_edges.assign(g.triangles.size(), {-1, -1, -1});
  for (std::size_t k = 0; k + 1 < slots.size(); k += 2) {
    const Slot& a = slots[k];
    const Slot& b = slots[k + 1];
    if (a.v0 != b.v0 || a.v1 != b.v1)
      throw NumericalError("edge (" + std::to_string(a.v0) + "," + std::to_string(a.v1) +
                           ") is not shared by exactly two triangles");
    const int e = static_cast<int>(g.edges.size());
    g.edges.push_back({a.v0, a.v1, a.tri, b.tri});
    g.triangle_edges[a.tri][a.slot] = e;
    g.triangle_edges[b.tri][b.slot] = e;
  }
  if (slots.size() % 2 != 0 || g.edges.size() * 2 != slots.size())
    throw NumericalError("triangulation is not a closed surface");
}

/// The inscribed icosahedron: poles at +-e3, ten vertices on latitude rings
/// at +-atan(1/2), southern ring rotated by pi/5.
inline DelaunayGrid build_icosahedron() {
  DelaunayGrid g;
  g.level = 0;
  const double ring_lat = std::atan(0.5);
  g.vertices.push_back(UnitVec3::trusted({0.0, 0.0, 1.0}));
  g.vertices.push_back(UnitVec3::trusted({0.0, 0.0, -1.0}));
  for (int k = 0; k < 5; ++k)
    g.vertices.push_back(to_unit({ring_lat, 2.0 * M_PI * k / 5.0}));
  for (int k = 0; k < 5; ++k)
    g.vertices.push_back(to_unit({-ring_lat, 2.0 * M_PI * k / 5.0 + M_PI / 5.0}));

  for (int k = 0; k < 5; ++k) {
    const int kn = (k + 1) % 5;
    const int a = 2 + k, b = 2 + kn;    // northern ring
    const int c = 7 + k, d = 7 + kn;    // southern ring
    g.triangles.push_back({0, a, b});
    g.triangles.push_back({a, c, b});
    g.triangles.push_back({b, c, d});
    g.triangles.push_back({1, d, c});
  }
  for (auto& tri : g.triangles) {
    if (!is_ccw(g.vertices[tri[0]], g.vertices[tri[1]], g.vertices[tri[2]]))
      std::swap(tri[1], tri[2]);
  }
  build_edge_topology(g);
  return g;
}

/// One bisection refinement step: every geodesic edge gains its arc midpoint
/// and every triangle splits into four. Parent vertices keep their indices;
/// midpoints are appended in edge-index order.
inline DelaunayGrid refine(const DelaunayGrid& g) {
  DelaunayGrid out;
  out.level = g.level + 1;
  out.vertices = g.vertices;
  out.vertices.reserve(g.vertices.size() + g.edges.size());
  for (const Edge& e : g.edges)
    out.vertices.push_back(arc_midpoint(g.vertices[e.v0], g.vertices[e.v1]));

  const int base = g.vertex_count();
  out.triangles.reserve(4 * g.triangles.size());
  for (int t = 0; t < g.triangle_count(); ++t) {
    const auto& tri = g.triangles[t];
    const int m01 = base + g.triangle_edges[t][0];
    const int m12 = base + g.triangle_edges[t][1];
    const int m20 = base + g.triangle_edges[t][2];
    out.triangles.push_back({tri[0], m01, m20});
    out.triangles.push_back({tri[1], m12, m01});
    out.triangles.push_back({tri[2], m20, m12});
    out.triangles.push_back({m01, m12, m20});
  }
  build_edge_topology(out);
  return out;
}

/// Per-triangle neighbor across each edge slot.
inline std::vector<std::array<int, 3>> triangle_neighbors(const DelaunayGrid& g) {
  std::vector<std::array<int, 3>> nbr(g.triangles.size());
  for (int t = 0; t < g.triangle_count(); ++t)
    for (int s = 0; s < 3; ++s) {
      const Edge& e = g.edges[g.triangle_edges[t][s]];
      nbr[t][s] = (e.t0 == t) ? e.t1 : e.t0;
    }
  return nbr;
}

struct DelaunayCheck {
  bool pass = true;
  double worst_margin = 0.0;  // min over triangles of d(q, nearest outside vertex) - r
  int worst_triangle = -1;
  int worst_vertex = -1;
};

/// Empty-circumcircle diagnostic: for every triangle, no nearby vertex may
/// lie inside its circumcircle (margin >= -1e-10). The candidate set is the
/// 3-hop graph neighborhood, which contains the nearest outside vertex on
/// any quasi-uniform grid.
inline DelaunayCheck check_delaunay(const DelaunayGrid& g) {
  const int n = g.vertex_count();
  std::vector<int> adj_off(n + 1, 0), adj(2 * g.edges.size());
  for (const Edge& e : g.edges) {
    ++adj_off[e.v0 + 1];
    ++adj_off[e.v1 + 1];
  }
  for (int i = 0; i < n; ++i) adj_off[i + 1] += adj_off[i];
  {
    std::vector<int> fill = adj_off;
    for (const Edge& e : g.edges) {
      adj[fill[e.v0]++] = e.v1;
      adj[fill[e.v1]++] = e.v0;
    }
  }

  const int ntri = g.triangle_count();
  std::vector<double> margin(ntri);
  std::vector<int> offender(ntri);
  std::exception_ptr failure = nullptr;

#pragma omp parallel
  {
    std::vector<int> cand;
    std::vector<char> seen(n, 0);

    auto margin_of = [&](int t) {
      const auto& tri = g.triangles[t];
      const UnitVec3 q =
          circumcenter(g.vertices[tri[0]], g.vertices[tri[1]], g.vertices[tri[2]]);
      double r = 0.0;
      for (int s = 0; s < 3; ++s) r = std::max(r, geodesic_distance(q, g.vertices[tri[s]]));

      cand.clear();
      for (int s = 0; s < 3; ++s) {
        cand.push_back(tri[s]);
        seen[tri[s]] = 1;
      }
      std::size_t frontier_begin = 0;
      for (int hop = 0; hop < 3; ++hop) {
        const std::size_t frontier_end = cand.size();
        for (std::size_t k = frontier_begin; k < frontier_end; ++k)
          for (int a = adj_off[cand[k]]; a < adj_off[cand[k] + 1]; ++a)
            if (!seen[adj[a]]) {
              seen[adj[a]] = 1;
              cand.push_back(adj[a]);
            }
        frontier_begin = frontier_end;
      }

      margin[t] = M_PI;
      offender[t] = -1;
      for (std::size_t k = 3; k < cand.size(); ++k) {  // skip the three members
        const int v = cand[k];
        const double m = geodesic_distance(q, g.vertices[v]) - r;
        if (m < margin[t]) {
          margin[t] = m;
          offender[t] = v;
        }
      }
      for (int v : cand) seen[v] = 0;
    };

#pragma omp for schedule(static)
    for (int t = 0; t < ntri; ++t) {
      try {
        margin_of(t);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  DelaunayCheck res;
  res.worst_margin = M_PI;
  for (int t = 0; t < ntri; ++t)
    if (margin[t] < res.worst_margin) {
      res.worst_margin = margin[t];
      res.worst_triangle = t;
      res.worst_vertex = offender[t];
    }
  res.pass = res.worst_margin >= -1e-10;
  return res;
}

}  // namespace svdg
