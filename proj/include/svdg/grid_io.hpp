#pragma once

// SVDGRID text format (line oriented, UTF-8):
//   SVDGRID 1 <level> <N> <F>
//   N lines: v <x1> <x2> <x3>     (17 significant digits)
//   F lines: t <i> <j> <k>        (0-based, counterclockwise)
// Edges are rebuilt on load; the Voronoi dual is never serialized.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "svdg/grid.hpp"

namespace svdg {

inline void write_grid(std::ostream& os, const DelaunayGrid& g) {
  os << "SVDGRID 1 " << g.level << ' ' << g.vertex_count() << ' ' << g.triangle_count() << '\n';
  char line[96];
  for (const UnitVec3& v : g.vertices) {
    std::snprintf(line, sizeof line, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    os << line;
  }
  for (const auto& t : g.triangles) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

inline void write_grid_file(const std::string& path, const DelaunayGrid& g) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_grid(os, g);
  os.flush();
  if (!os) throw IoError("failed while writing '" + path + "'");
}

inline DelaunayGrid read_grid(std::istream& is) {
  std::string magic;
  int version = 0, level = 0, n = 0, f = 0;
  if (!(is >> magic >> version >> level >> n >> f) || magic != "SVDGRID" || version != 1)
    throw IoError("not an SVDGRID version 1 file");
  if (level < 0 || n <= 0 || f <= 0) throw IoError("SVDGRID header has invalid counts");

  DelaunayGrid g;
  g.level = level;
  g.vertices.reserve(n);
  g.triangles.reserve(f);
  std::string tag;
  for (int i = 0; i < n; ++i) {
    Vec3 v;
    if (!(is >> tag >> v.x >> v.y >> v.z) || tag != "v")
      throw IoError("bad vertex line " + std::to_string(i));
    if (std::abs(norm(v) - 1.0) > 1e-12)
      throw IoError("vertex " + std::to_string(i) + " is not on the unit sphere");
    g.vertices.push_back(UnitVec3::trusted(v));
  }
  for (int t = 0; t < f; ++t) {
    std::array<int, 3> tri{};
    if (!(is >> tag >> tri[0] >> tri[1] >> tri[2]) || tag != "t")
      throw IoError("bad triangle line " + std::to_string(t));
    for (int idx : tri)
      if (idx < 0 || idx >= n) throw IoError("triangle index out of range");
    if (!is_ccw(g.vertices[tri[0]], g.vertices[tri[1]], g.vertices[tri[2]]))
      throw IoError("triangle " + std::to_string(t) + " is not counterclockwise");
    g.triangles.push_back(tri);
  }
  try {
    build_edge_topology(g);
  } catch (const NumericalError& e) {
    throw IoError(std::string("invalid grid topology: ") + e.what());
  }
  const int euler = g.vertex_count() - g.edge_count() + g.triangle_count();
  if (euler != 2) throw IoError("grid does not satisfy Euler's formula");
  return g;
}

inline DelaunayGrid read_grid_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_grid(is);
}

}  // namespace svdg
