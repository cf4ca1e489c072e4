#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nocut/active_mesh.hpp"
#include "nocut/fe_space.hpp"
#include "nocut/quadrature.hpp"

namespace nocut {

struct ErrorReport {
  double l2_rel = 0.0;           // relative L2(Omega) error
  double h1_rel = 0.0;           // relative H1(Omega) seminorm error
  double l2_meanfree_rel = 0.0;  // inf over constants of the relative L2 error
  double gamma_l2 = 0.0;         // L2 norm of the error on the surrogate boundary
  double triple_norm = 0.0;      // scheme-dependent, filled by the caller
};

namespace detail {

constexpr int kErrorDegree = 4;  // quadrature degree for error integrands

}  // namespace detail

/// Area of the polygonal approximation of the physical domain.
inline double domain_area(const ActiveMesh& mesh, const BackgroundMesh& bg) {
  double area = 0.0;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c)
    area += polygon_area(clip_cell_to_domain(static_cast<int>(c), mesh, bg));
  return area;
}

/// Error norms over the physical domain (clipped cells) and its boundary.
/// Relative errors are normalized by the corresponding norm of the exact
/// solution; absolute values are reported if that norm vanishes.
inline ErrorReport error_norms(const ScalarField& exact_u, const VectorField& exact_grad_u,
                               const std::vector<double>& u_h, const ActiveMesh& mesh,
                               const BackgroundMesh& bg, const ScalarSpaceP1& space,
                               const BoundaryDiscretization& bdry) {
  double err_l2 = 0.0, err_h1 = 0.0, norm_l2 = 0.0, norm_h1 = 0.0;
  double err_int = 0.0, area = 0.0;

  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const std::vector<Vec2> poly = clip_cell_to_domain(static_cast<int>(c), mesh, bg);
    const QuadratureRule rule = polygon_rule(poly, detail::kErrorDegree);
    const Vec2 grad_h = cell_gradient(space, u_h, static_cast<int>(c));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2& x = rule.points[q];
      const double w = rule.weights[q];
      const auto lambda = barycentric(mesh, bg, static_cast<int>(c), x);
      double uh = 0.0;
      for (int k = 0; k < 3; ++k) uh += lambda[k] * u_h[space.cell_dofs[c][k]];
      const double u = exact_u(x);
      const Vec2 gu = exact_grad_u(x);
      const Vec2 ge = gu - grad_h;
      err_l2 += w * (u - uh) * (u - uh);
      err_h1 += w * dot(ge, ge);
      norm_l2 += w * u * u;
      norm_h1 += w * dot(gu, gu);
      err_int += w * (u - uh);
      area += w;
    }
  }

  double err_gamma = 0.0;
  for (const BoundarySegment& seg : bdry.segments) {
    const QuadratureRule rule = segment_rule(seg.p0, seg.p1, 2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto lambda = barycentric(mesh, bg, seg.parent, rule.points[q]);
      double uh = 0.0;
      for (int k = 0; k < 3; ++k) uh += lambda[k] * u_h[space.cell_dofs[seg.parent][k]];
      const double d = exact_u(rule.points[q]) - uh;
      err_gamma += rule.weights[q] * d * d;
    }
  }

  const double c_opt = err_int / area;  // minimizer of ||u - u_h - c||
  const double err_l2_meanfree = std::max(0.0, err_l2 - c_opt * c_opt * area);

  ErrorReport report;
  const double den_l2 = std::sqrt(norm_l2);
  const double den_h1 = std::sqrt(norm_h1);
  report.l2_rel = (den_l2 > 0.0) ? std::sqrt(err_l2) / den_l2 : std::sqrt(err_l2);
  report.h1_rel = (den_h1 > 0.0) ? std::sqrt(err_h1) / den_h1 : std::sqrt(err_h1);
  report.l2_meanfree_rel =
      (den_l2 > 0.0) ? std::sqrt(err_l2_meanfree) / den_l2 : std::sqrt(err_l2_meanfree);
  report.gamma_l2 = std::sqrt(err_gamma);
  return report;
}

/// Energy norm of the Dirichlet scheme: sqrt(|v|^2_{1,Omega_h} + (1/h)||v||^2_{0,Gamma}).
inline double triple_norm_dirichlet(const std::vector<double>& v, const ActiveMesh& mesh,
                                    const BackgroundMesh& bg, const ScalarSpaceP1& space,
                                    const BoundaryDiscretization& bdry) {
  double h1 = 0.0;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const Vec2 g = cell_gradient(space, v, static_cast<int>(c));
    h1 += bg.area(mesh.cells[c].bg) * dot(g, g);
  }
  double gamma = 0.0;
  for (const BoundarySegment& seg : bdry.segments) {
    const QuadratureRule rule = segment_rule(seg.p0, seg.p1, 2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto lambda = barycentric(mesh, bg, seg.parent, rule.points[q]);
      double vh = 0.0;
      for (int k = 0; k < 3; ++k) vh += lambda[k] * v[space.cell_dofs[seg.parent][k]];
      gamma += rule.weights[q] * vh * vh;
    }
  }
  return std::sqrt(h1 + gamma / mesh.h);
}

/// Energy norm of the flux scheme:
/// sqrt(|v|^2_{1,Omega_h} + ||div z||^2 + ||z + grad v||^2 (both on the cut band)
///      + h ||[dv/dn]||^2 on the internal boundary of the band).
inline double triple_norm_neumann(const std::vector<double>& v, const std::vector<double>& z,
                                  const ActiveMesh& mesh, const BackgroundMesh& bg,
                                  const ScalarSpaceP1& spaceV, const VectorSpaceZ& spaceZ) {
  double h1 = 0.0, divz = 0.0, match = 0.0;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const Vec2 g = cell_gradient(spaceV, v, static_cast<int>(c));
    const double area = bg.area(mesh.cells[c].bg);
    h1 += area * dot(g, g);
    if (mesh.cells[c].kind != CellKind::Cut) continue;

    const auto& tri = bg.triangles[mesh.cells[c].bg];
    const auto& grads = spaceV.cell_grads[c];
    double div = 0.0;
    Vec2 zv[3];
    for (int k = 0; k < 3; ++k) {
      const int base = spaceZ.base_of_vertex[tri[k]];
      zv[k] = {z[2 * base], z[2 * base + 1]};
      div += dot(zv[k], grads[k]);
    }
    divz += area * div * div;

    const QuadratureRule rule =
        triangle_rule(bg.vertices[tri[0]], bg.vertices[tri[1]], bg.vertices[tri[2]], 2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto lambda = barycentric(mesh, bg, static_cast<int>(c), rule.points[q]);
      Vec2 zq = g;  // z + grad v
      for (int k = 0; k < 3; ++k) zq += lambda[k] * zv[k];
      match += rule.weights[q] * dot(zq, zq);
    }
  }

  double jumps = 0.0;
  for (int idx : mesh.facets.gamma_h_int) {
    const Facet& f = mesh.facets.facets[idx];
    const double jump = dot(cell_gradient(spaceV, v, f.cell0), f.normal) -
                        dot(cell_gradient(spaceV, v, f.cell1), f.normal);
    jumps += f.length * jump * jump;
  }
  return std::sqrt(h1 + divz + match + mesh.h * jumps);
}

/// Least-squares slope of log(error) against log(h).
inline double convergence_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("convergence_slope: need >= 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [h, e] : points) {
    if (!(h > 0.0) || !(e > 0.0))
      throw std::invalid_argument("convergence_slope: nonpositive input");
    sx += std::log(h);
    sy += std::log(e);
  }
  const double mx = sx / points.size();
  const double my = sy / points.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [h, e] : points) {
    const double dx = std::log(h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e) - my);
  }
  return sxy / sxx;
}

}  // namespace nocut
