#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nocut/geometry.hpp"

namespace nocut {

/// Quadrature points with absolute weights (weights sum to the measure of
/// the integration domain).
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t q = 0; q < points.size(); ++q) s += weights[q] * f(points[q]);
    return s;
  }
};

/// Gauss-Legendre rule on the segment [p0, p1]; order in {1,2,3} points,
/// exact for polynomials of degree 2*order - 1.
inline QuadratureRule segment_rule(const Vec2& p0, const Vec2& p1, int order) {
  static const double g2 = 1.0 / std::sqrt(3.0);
  static const double g3 = std::sqrt(3.0 / 5.0);
  std::vector<double> ts, ws;  // nodes/weights on [-1, 1]
  switch (order) {
    case 1:
      ts = {0.0};
      ws = {2.0};
      break;
    case 2:
      ts = {-g2, g2};
      ws = {1.0, 1.0};
      break;
    case 3:
      ts = {-g3, 0.0, g3};
      ws = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    default:
      throw std::invalid_argument("segment_rule: order must be 1, 2 or 3");
  }
  const double len = norm(p1 - p0);
  const Vec2 mid = 0.5 * (p0 + p1);
  const Vec2 half = 0.5 * (p1 - p0);
  QuadratureRule rule;
  rule.points.reserve(ts.size());
  rule.weights.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    rule.points.push_back(mid + ts[i] * half);
    rule.weights.push_back(0.5 * len * ws[i]);
  }
  return rule;
}

/// Symmetric rule on a triangle, exact for the given total degree (1, 2 or 4).
inline QuadratureRule triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, int degree) {
  const double area = triangle_area(a, b, c);
  if (area == 0.0) throw std::invalid_argument("triangle_rule: zero-area triangle");

  // Barycentric (l1, l2) pairs and weights relative to the triangle area.
  std::vector<std::array<double, 2>> bary;
  std::vector<double> w;
  switch (degree) {
    case 1:
      bary = {{1.0 / 3.0, 1.0 / 3.0}};
      w = {1.0};
      break;
    case 2:
      bary = {{1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0}};
      w = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
      break;
    case 4: {
      // Six-point degree-4 rule (two symmetric orbits).
      const double a1 = 0.445948490915965;
      const double w1 = 0.223381589678011;
      const double a2 = 0.091576213509771;
      const double w2 = 0.109951743655322;
      bary = {{a1, a1}, {1.0 - 2.0 * a1, a1}, {a1, 1.0 - 2.0 * a1},
              {a2, a2}, {1.0 - 2.0 * a2, a2}, {a2, 1.0 - 2.0 * a2}};
      w = {w1, w1, w1, w2, w2, w2};
      break;
    }
    default:
      throw std::invalid_argument("triangle_rule: degree must be 1, 2 or 4");
  }

  QuadratureRule rule;
  rule.points.reserve(bary.size());
  rule.weights.reserve(bary.size());
  const double absarea = std::abs(area);
  for (std::size_t i = 0; i < bary.size(); ++i) {
    const double l1 = bary[i][0];
    const double l2 = bary[i][1];
    const double l0 = 1.0 - l1 - l2;
    rule.points.push_back(l0 * a + l1 * b + l2 * c);
    rule.weights.push_back(absarea * w[i]);
  }
  return rule;
}

/// Rule on a simple convex polygon (3-4 vertices, counter-clockwise) by fan
/// triangulation from the first vertex.
inline QuadratureRule polygon_rule(const std::vector<Vec2>& poly, int degree) {
  if (poly.size() < 3) throw std::invalid_argument("polygon_rule: need at least 3 vertices");
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& u = poly[i];
    const Vec2& v = poly[(i + 1) % poly.size()];
    const Vec2& w = poly[(i + 2) % poly.size()];
    if (cross(v - u, w - v) < -1e-14)
      throw std::invalid_argument("polygon_rule: polygon not convex counter-clockwise");
  }
  QuadratureRule rule;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    // Collapsed fan pieces (crossing point coinciding with a vertex) carry no measure.
    if (triangle_area(poly[0], poly[i], poly[i + 1]) == 0.0) continue;
    QuadratureRule tri = triangle_rule(poly[0], poly[i], poly[i + 1], degree);
    rule.points.insert(rule.points.end(), tri.points.begin(), tri.points.end());
    rule.weights.insert(rule.weights.end(), tri.weights.begin(), tri.weights.end());
  }
  return rule;
}

}  // namespace nocut
