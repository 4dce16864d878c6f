#pragma once

// Voronoi dual of an icosahedral Delaunay grid. Cell polygons are rings of
// triangle circumcenters ordered counterclockwise around their generator;
// every dual edge is the geodesic arc between the circumcenters of the two
// triangles sharing the primal edge.

#include <algorithm>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "svdg/grid.hpp"

namespace svdg {

struct VoronoiDual {
  int num_vertices = 0;
  int num_triangles = 0;

  std::vector<UnitVec3> circumcenters;  // one per triangle, the dual vertices

  // Cell rings in CSR layout. For generator i the polygon corners are the
  // circumcenters of cell_tris[cell_offsets[i] .. cell_offsets[i+1]) in ccw
  // order; cell_neighbors[k] is the neighbor across the dual edge between
  // ring positions k and k+1, and cell_edges[k] the primal edge index.
  std::vector<int> cell_offsets;
  std::vector<int> cell_tris;
  std::vector<int> cell_neighbors;
  std::vector<int> cell_edges;

  std::vector<double> cell_area;    // m_a(V_i), steradians
  std::vector<double> cell_radius;  // h_i = max distance generator -> ring corner

  // Per primal edge (i, j):
  std::vector<double> dual_length;      // m_l of the arc between the two circumcenters
  std::vector<double> vertex_distance;  // geodesic d(x_i, x_j)
  std::vector<double> chord_length;     // Euclidean |x_i - x_j|

  double h = 0.0;  // max over cells of cell_radius

  int ring_begin(int i) const { return cell_offsets[i]; }
  int ring_end(int i) const { return cell_offsets[i + 1]; }
  int ring_size(int i) const { return cell_offsets[i + 1] - cell_offsets[i]; }

  /// Primal edge index of (i, j), or -1 when j is not a neighbor of i.
  int edge_between(int i, int j) const {
    for (int k = ring_begin(i); k < ring_end(i); ++k)
      if (cell_neighbors[k] == j) return cell_edges[k];
    return -1;
  }
};

namespace detail {

/// Builds the dual without validating the Delaunay criterion.
inline VoronoiDual build_dual_unchecked(const DelaunayGrid& g) {
  VoronoiDual d;
  d.num_vertices = g.vertex_count();
  d.num_triangles = g.triangle_count();

  d.circumcenters.reserve(g.triangles.size());
  for (const auto& tri : g.triangles)
    d.circumcenters.push_back(
        circumcenter(g.vertices[tri[0]], g.vertices[tri[1]], g.vertices[tri[2]]));

  // Anchor each vertex at its smallest incident triangle, then walk the fan.
  std::vector<int> first_tri(g.vertex_count(), -1);
  for (int t = g.triangle_count() - 1; t >= 0; --t)
    for (int v : g.triangles[t]) first_tri[v] = t;

  const int n = g.vertex_count();
  d.cell_offsets.assign(n + 1, 0);
  d.cell_tris.reserve(3 * g.triangles.size());
  d.cell_neighbors.reserve(3 * g.triangles.size());
  d.cell_edges.reserve(3 * g.triangles.size());
  d.cell_area.assign(n, 0.0);
  d.cell_radius.assign(n, 0.0);

  for (int i = 0; i < n; ++i) {
    const int start = first_tri[i];
    int t = start;
    do {
      const auto& tri = g.triangles[t];
      const int pi = (tri[0] == i) ? 0 : (tri[1] == i ? 1 : 2);
      const int slot = (pi + 2) % 3;  // edge (i, corner after the ccw sweep)
      d.cell_tris.push_back(t);
      d.cell_neighbors.push_back(tri[slot]);
      d.cell_edges.push_back(g.triangle_edges[t][slot]);
      const Edge& e = g.edges[g.triangle_edges[t][slot]];
      t = (e.t0 == t) ? e.t1 : e.t0;
    } while (t != start);
    d.cell_offsets[i + 1] = static_cast<int>(d.cell_tris.size());
  }

  for (int i = 0; i < n; ++i) {
    const UnitVec3& x = g.vertices[i];
    const int b = d.cell_offsets[i], e = d.cell_offsets[i + 1];
    double area = 0.0, radius = 0.0;
    for (int k = b; k < e; ++k) {
      const UnitVec3& q0 = d.circumcenters[d.cell_tris[k]];
      const UnitVec3& q1 = d.circumcenters[d.cell_tris[k + 1 == e ? b : k + 1]];
      area += spherical_triangle_area(x, q0, q1);
      radius = std::max(radius, geodesic_distance(x, q0));
    }
    d.cell_area[i] = area;
    d.cell_radius[i] = radius;
    d.h = std::max(d.h, radius);
  }

  d.dual_length.resize(g.edges.size());
  d.vertex_distance.resize(g.edges.size());
  d.chord_length.resize(g.edges.size());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges[e];
    d.dual_length[e] = geodesic_distance(d.circumcenters[ed.t0], d.circumcenters[ed.t1]);
    d.vertex_distance[e] = geodesic_distance(g.vertices[ed.v0], g.vertices[ed.v1]);
    d.chord_length[e] = norm(g.vertices[ed.v0] - g.vertices[ed.v1]);
  }
  return d;
}

}  // namespace detail

/// Builds the Voronoi dual after verifying the Delaunay criterion; a
/// violation is an error naming the offending triangle/vertex pair.
inline VoronoiDual build_voronoi_dual(const DelaunayGrid& g) {
  const DelaunayCheck chk = check_delaunay(g);
  if (!chk.pass)
    throw NumericalError("Delaunay criterion violated: vertex " +
                         std::to_string(chk.worst_vertex) + " lies inside the circumcircle of triangle " +
                         std::to_string(chk.worst_triangle) + " (margin " +
                         std::to_string(chk.worst_margin) + ")");
  return detail::build_dual_unchecked(g);
}

struct UniformityReport {
  double c0 = 0.0;  // max(m_l/h, h/m_l) over dual edges
  double c1 = 0.0;  // max(m_a/h^2, h^2/m_a) over cells
  double min_dual_length = 0.0;
  double min_cell_area = 0.0;
  bool degenerate = false;  // some dual edge or cell collapsed; ratio = inf
};

/// Almost-uniformity constants: dual edge lengths must scale like h and cell
/// areas like h^2 with level-independent constants.
inline UniformityReport check_uniformity(const VoronoiDual& d) {
  UniformityReport r;
  r.min_dual_length = std::numeric_limits<double>::infinity();
  r.min_cell_area = std::numeric_limits<double>::infinity();
  const double h = d.h;
  for (double ml : d.dual_length) {
    r.min_dual_length = std::min(r.min_dual_length, ml);
    if (ml <= 0.0) {
      r.c0 = std::numeric_limits<double>::infinity();
      r.degenerate = true;
      continue;
    }
    r.c0 = std::max({r.c0, ml / h, h / ml});
  }
  const double h2 = h * h;
  for (double ma : d.cell_area) {
    r.min_cell_area = std::min(r.min_cell_area, ma);
    if (ma <= 0.0) {
      r.c1 = std::numeric_limits<double>::infinity();
      r.degenerate = true;
      continue;
    }
    r.c1 = std::max({r.c1, ma / h2, h2 / ma});
  }
  return r;
}

}  // namespace svdg
