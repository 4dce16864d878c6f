#pragma once

// Analytic test problems: exact solution, exact tangential gradient and
// compatible forcing for the Poisson problem on the sphere.

#include <functional>
#include <string>

#include "svdg/geom.hpp"

namespace svdg {

struct TestProblem {
  std::string name;
  std::function<double(const UnitVec3&)> u;
  std::function<Vec3(const UnitVec3&)> grad_u;  // tangential gradient
  std::function<double(const UnitVec3&)> f;     // forcing, f = -laplacian(u)
};

/// The classic zonal-wavenumber-one test case: u = cos(lon) cos^4(lat).
/// The forcing follows from the geographic Laplace-Beltrami formula,
///   -lap u = 5 cos(lon) cos^2(lat) (4 cos^2(lat) - 3),
/// and the gradient from (1/cos lat) du/dlon e_lon + du/dlat e_lat. All
/// three fields extend smoothly to the poles, where the cos(lat) powers
/// drive them to zero.
inline TestProblem heikes_problem() {
  TestProblem p;
  p.name = "heikes";
  p.u = [](const UnitVec3& x) {
    const GeoCoord g = to_geo(x);
    const double c = std::cos(g.lat);
    return std::cos(g.lon) * c * c * c * c;
  };
  p.f = [](const UnitVec3& x) {
    const GeoCoord g = to_geo(x);
    const double c2 = std::cos(g.lat) * std::cos(g.lat);
    return 5.0 * std::cos(g.lon) * c2 * (4.0 * c2 - 3.0);
  };
  p.grad_u = [](const UnitVec3& x) {
    const GeoCoord g = to_geo(x);
    const double cl = std::cos(g.lat), sl = std::sin(g.lat);
    const double co = std::cos(g.lon), so = std::sin(g.lon);
    const Vec3 e_lon{-so, co, 0.0};
    const Vec3 e_lat{-sl * co, -sl * so, cl};
    const double c3 = cl * cl * cl;
    return (-so * c3) * e_lon + (-4.0 * co * sl * c3) * e_lat;
  };
  return p;
}

/// Zero solution, zero forcing; the solver must return (numerically) zero.
inline TestProblem constant_problem() {
  TestProblem p;
  p.name = "constant";
  p.u = [](const UnitVec3&) { return 0.0; };
  p.f = [](const UnitVec3&) { return 0.0; };
  p.grad_u = [](const UnitVec3&) { return Vec3{}; };
  return p;
}

inline TestProblem problem_by_name(const std::string& name) {
  if (name == "heikes") return heikes_problem();
  if (name == "constant") return constant_problem();
  throw std::invalid_argument("unknown problem '" + name + "' (expected heikes or constant)");
}

}  // namespace svdg
