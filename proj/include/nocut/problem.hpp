#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "nocut/geometry.hpp"

namespace nocut {

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;
// Boundary data evaluated at a point of the discrete boundary, together with
// the outward unit normal of the segment it lies on. Catalog problems ignore
// the segment normal and use n = grad(phi)/|grad(phi)| instead.
using BoundaryField = std::function<double(const Vec2&, const Vec2&)>;

/// A benchmark problem: level-set geometry plus manufactured solution data.
/// The physical domain is {phi < 0}, its boundary the zero set of phi.
struct LevelSetProblem {
  std::string name;
  ScalarField phi;
  VectorField grad_phi;
  ScalarField exact_u;        // empty if no manufactured solution
  VectorField exact_grad_u;   // gradient of exact_u, empty if none
  ScalarField f;              // source, defined on all of the active domain
  BoundaryField g_dirichlet;  // trace of u on the boundary
  BoundaryField g_neumann;    // n . grad u
  BoundaryField g_robin;      // u + kappa * n . grad u
  double kappa = 1.0;         // Robin coefficient used to manufacture g_robin
  double theta0 = 0.0;        // rotation angle (flower only)

  bool has_exact() const { return static_cast<bool>(exact_u); }
};

namespace detail {

inline double exact_sin_exp(const Vec2& p) { return std::sin(p.x) * std::exp(p.y); }
inline Vec2 exact_sin_exp_grad(const Vec2& p) {
  return {std::cos(p.x) * std::exp(p.y), std::sin(p.x) * std::exp(p.y)};
}

// Fills exact solution u = sin(x) e^y (harmonic, so f = 0) and the boundary
// data derived from it, with the normal taken from the level set.
inline void attach_manufactured_data(LevelSetProblem& pb) {
  pb.exact_u = exact_sin_exp;
  pb.exact_grad_u = exact_sin_exp_grad;
  pb.f = [](const Vec2&) { return 0.0; };
  pb.g_dirichlet = [](const Vec2& p, const Vec2&) { return exact_sin_exp(p); };
  const VectorField grad_phi = pb.grad_phi;
  pb.g_neumann = [grad_phi](const Vec2& p, const Vec2&) {
    return dot(normalized(grad_phi(p)), exact_sin_exp_grad(p));
  };
  const double kappa = pb.kappa;
  pb.g_robin = [grad_phi, kappa](const Vec2& p, const Vec2&) {
    return exact_sin_exp(p) + kappa * dot(normalized(grad_phi(p)), exact_sin_exp_grad(p));
  };
}

}  // namespace detail

/// Flower-shaped domain phi = r^4 (5 + 3 sin(7 theta + 7 pi/36)) / 2 - R^4,
/// rotated by theta0 (the polar angle is redefined as theta - theta0).
inline LevelSetProblem flower_problem(double R, double theta0, double kappa = 1.0) {
  if (!(R > 0.0)) throw std::invalid_argument("flower_problem: R must be positive");
  LevelSetProblem pb;
  pb.name = "flower";
  pb.theta0 = theta0;
  pb.kappa = kappa;
  const double R4 = R * R * R * R;
  const double phase = 7.0 * M_PI / 36.0;
  pb.phi = [R4, theta0, phase](const Vec2& p) {
    const double r2 = p.x * p.x + p.y * p.y;
    const double theta = std::atan2(p.y, p.x) - theta0;
    return r2 * r2 * (5.0 + 3.0 * std::sin(7.0 * theta + phase)) / 2.0 - R4;
  };
  pb.grad_phi = [theta0, phase](const Vec2& p) {
    const double r2 = p.x * p.x + p.y * p.y;
    if (r2 == 0.0) return Vec2{0.0, 0.0};  // phi ~ r^4, gradient vanishes at the origin
    const double arg = 7.0 * (std::atan2(p.y, p.x) - theta0) + phase;
    const double s = std::sin(arg);
    const double c = std::cos(arg);
    // d/dx, d/dy of r^4(5+3s)/2 with dtheta = (-y, x)/r^2.
    const double radial = 2.0 * r2 * (5.0 + 3.0 * s);
    const double angular = 10.5 * r2 * c;
    return Vec2{radial * p.x - angular * p.y, radial * p.y + angular * p.x};
  };
  detail::attach_manufactured_data(pb);
  return pb;
}

/// Disk of given radius centered at the origin: phi = x^2 + y^2 - radius^2.
inline LevelSetProblem disk_problem(double radius, double kappa = 1.0) {
  if (!(radius > 0.0 && radius < 0.5))
    throw std::invalid_argument("disk_problem: radius must lie in (0, 0.5)");
  LevelSetProblem pb;
  pb.name = "disk";
  pb.kappa = kappa;
  const double r2 = radius * radius;
  pb.phi = [r2](const Vec2& p) { return p.x * p.x + p.y * p.y - r2; };
  pb.grad_phi = [](const Vec2& p) { return Vec2{2.0 * p.x, 2.0 * p.y}; };
  detail::attach_manufactured_data(pb);
  return pb;
}

/// Looks a problem up by name ("flower" or "disk").
inline LevelSetProblem make_problem(const std::string& name, double R, double radius,
                                    double theta0, double kappa = 1.0) {
  if (name == "flower") return flower_problem(R, theta0, kappa);
  if (name == "disk") return disk_problem(radius, kappa);
  throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace nocut
