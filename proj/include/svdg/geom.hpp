#pragma once

// Spherical geometry primitives on the unit sphere. Everything here is a pure
// function of its arguments and safe to call concurrently.

#include <cmath>
#include <algorithm>

#include "svdg/error.hpp"

namespace svdg {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return s * a; }
inline Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a.x += b.x; a.y += b.y; a.z += b.z; return a; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm_squared(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm_squared(a)); }
inline double triple(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

/// A point on the unit sphere. The wrapped vector has Euclidean norm 1
/// (within 1e-14); construct through normalize() or the geographic
/// conversion below.
class UnitVec3 {
 public:
  UnitVec3() : v_{1.0, 0.0, 0.0} {}

  /// Radial projection p/|p|. Throws NumericalError for (near-)zero input.
  static UnitVec3 normalize(const Vec3& p) {
    const double n = norm(p);
    if (!(n > 1e-300)) throw NumericalError("radial projection of zero vector");
    return UnitVec3(p / n);
  }

  /// Wraps a vector the caller guarantees to be unit-norm already.
  static UnitVec3 trusted(const Vec3& v) { return UnitVec3(v); }

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }

 private:
  explicit UnitVec3(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

/// Radial projection onto the sphere, p -> p/|p|.
inline UnitVec3 radial_project(const Vec3& p) { return UnitVec3::normalize(p); }

/// Geographic coordinates: latitude in [-pi/2, pi/2], longitude in [-pi, pi],
/// both radians.
struct GeoCoord {
  double lat = 0.0;
  double lon = 0.0;
};

inline UnitVec3 to_unit(const GeoCoord& g) {
  const double cl = std::cos(g.lat);
  return UnitVec3::trusted({cl * std::cos(g.lon), cl * std::sin(g.lon), std::sin(g.lat)});
}

inline GeoCoord to_geo(const UnitVec3& p) {
  return {std::asin(std::clamp(p.z(), -1.0, 1.0)), std::atan2(p.y(), p.x())};
}

/// Geodesic (great-circle) distance in radians, in [0, pi]. The atan2 form is
/// stable near 0 and pi where acos of the dot product loses digits.
inline double geodesic_distance(const UnitVec3& a, const UnitVec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

/// Area (spherical excess) of the geodesic triangle abc, in steradians.
/// Degenerate triangles give 0.
inline double spherical_triangle_area(const UnitVec3& a, const UnitVec3& b, const UnitVec3& c) {
  // tan(E/2) = |det(a,b,c)| / (1 + a.b + b.c + c.a)
  const double num = std::abs(triple(a, b, c));
  const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
  return 2.0 * std::atan2(num, den);
}

/// Spherical circumcenter: the point geodesically equidistant from a, b, c,
/// on the hemisphere of the vertex sum. Throws for collinear vertices, i.e.
/// when the three points lie on a common great circle (their chord plane
/// passes through the origin) and the hemisphere choice degenerates.
inline UnitVec3 circumcenter(const UnitVec3& a, const UnitVec3& b, const UnitVec3& c) {
  const Vec3 n = cross(b - a, c - a);
  const double nn = norm(n);
  if (!(nn > 1e-12 * norm(b - a) * norm(c - a)) || !(std::abs(dot(n, a)) > 1e-12 * nn))
    throw NumericalError("circumcenter: collinear vertices");
  Vec3 q = n / nn;
  if (dot(q, a + b + c) < 0.0) q = -q;
  return UnitVec3::trusted(q);
}

/// Midpoint of the minor arc between a and b. Throws for antipodal input.
inline UnitVec3 arc_midpoint(const UnitVec3& a, const UnitVec3& b) {
  const Vec3 m = a + b;
  if (!(norm(m) > 1e-10)) throw NumericalError("arc midpoint undefined for antipodal points");
  return UnitVec3::normalize(m);
}

}  // namespace svdg
