#pragma once

#include <random>
#include <vector>

#include "nocut/active_mesh.hpp"
#include "nocut/assembly.hpp"
#include "nocut/fe_space.hpp"
#include "nocut/problem.hpp"
#include "nocut/quadrature.hpp"
#include "nocut/solver.hpp"

namespace test {

// Geometry from an existing problem, data manufactured from u = a + b x + c y
// with boundary fluxes taken against the passed-in segment normal, so the
// schemes are exact for this solution up to solver precision.
inline nocut::LevelSetProblem linear_patch_problem(nocut::LevelSetProblem geom, double a,
                                                   double b, double c, double kappa = 1.0) {
  using nocut::Vec2;
  geom.exact_u = [=](const Vec2& p) { return a + b * p.x + c * p.y; };
  geom.exact_grad_u = [=](const Vec2&) { return Vec2{b, c}; };
  geom.f = [](const Vec2&) { return 0.0; };
  geom.g_dirichlet = [=](const Vec2& p, const Vec2&) { return a + b * p.x + c * p.y; };
  geom.g_neumann = [=](const Vec2&, const Vec2& n) { return b * n.x + c * n.y; };
  geom.kappa = kappa;
  geom.g_robin = [=](const Vec2& p, const Vec2& n) {
    return a + b * p.x + c * p.y + kappa * (b * n.x + c * n.y);
  };
  return geom;
}

struct Discretization {
  nocut::BackgroundMesh bg;
  nocut::ActiveMesh mesh;
  nocut::BoundaryDiscretization bdry;
  nocut::ScalarSpaceP1 spaceV;
  nocut::VectorSpaceZ spaceZ;
};

inline Discretization discretize(const nocut::LevelSetProblem& problem, int n) {
  Discretization d;
  d.bg = nocut::build_crisscross(n);
  d.mesh = nocut::classify_and_extract(d.bg, problem);
  d.bdry = nocut::extract_boundary_segments(d.mesh, d.bg);
  d.spaceV = nocut::build_scalar_space(d.mesh, d.bg);
  d.spaceZ = nocut::build_vector_space(d.mesh, d.bg);
  return d;
}

inline std::vector<double> random_vector(int size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> v(size);
  for (double& x : v) x = unit(rng);
  return v;
}

inline double quadratic_form(const Eigen::SparseMatrix<double>& A, const std::vector<double>& v) {
  const Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
  return x.dot(A * x);
}

inline double max_abs(const Eigen::SparseMatrix<double>& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

// Both sides of the discrete integration-by-parts identity on the strip
// between the surrogate boundary and the active-mesh boundary:
//   int_{Gamma_h} (dv/dn) v - int_Gamma (dv/dn) v
//     = int_B |grad v|^2 - sum over cut-owned internal facets of
//       int_{F cap B} v [dv/dn].
inline std::pair<double, double> ibp_identity_sides(const Discretization& d,
                                                    const std::vector<double>& v) {
  using namespace nocut;
  double lhs = 0.0;
  for (int idx : d.mesh.facets.gamma_h) {
    const Facet& f = d.mesh.facets.facets[idx];
    const double dn = dot(cell_gradient(d.spaceV, v, f.cell0), f.normal);
    const QuadratureRule rule = segment_rule(d.bg.vertices[f.v0], d.bg.vertices[f.v1], 2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto lambda = barycentric(d.mesh, d.bg, f.cell0, rule.points[q]);
      double vh = 0.0;
      for (int k = 0; k < 3; ++k) vh += lambda[k] * v[d.spaceV.cell_dofs[f.cell0][k]];
      lhs += rule.weights[q] * dn * vh;
    }
  }
  for (const BoundarySegment& seg : d.bdry.segments) {
    const double dn = dot(cell_gradient(d.spaceV, v, seg.parent), seg.normal);
    const QuadratureRule rule = segment_rule(seg.p0, seg.p1, 2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto lambda = barycentric(d.mesh, d.bg, seg.parent, rule.points[q]);
      double vh = 0.0;
      for (int k = 0; k < 3; ++k) vh += lambda[k] * v[d.spaceV.cell_dofs[seg.parent][k]];
      lhs -= rule.weights[q] * dn * vh;
    }
  }

  double rhs = 0.0;
  for (std::size_t c = 0; c < d.mesh.cells.size(); ++c) {
    const std::vector<Vec2> strip = clip_cell_to_complement(static_cast<int>(c), d.mesh, d.bg);
    if (strip.size() < 3) continue;
    const Vec2 g = cell_gradient(d.spaceV, v, static_cast<int>(c));
    rhs += polygon_area(strip) * dot(g, g);
  }
  for (int idx : d.mesh.facets.f_gamma) {
    const Facet& f = d.mesh.facets.facets[idx];
    const double phi0 = d.mesh.vertex_phi[f.v0];
    const double phi1 = d.mesh.vertex_phi[f.v1];
    double t0 = 0.0, t1 = 1.0;  // parameter range of the facet part outside the domain
    if (phi0 < 0.0 && phi1 < 0.0) continue;
    if ((phi0 < 0.0) != (phi1 < 0.0)) {
      const double tc = phi0 / (phi0 - phi1);
      if (phi0 < 0.0)
        t0 = tc;
      else
        t1 = tc;
    }
    const Vec2 a = d.bg.vertices[f.v0];
    const Vec2 b = d.bg.vertices[f.v1];
    const Vec2 p0 = a + t0 * (b - a);
    const Vec2 p1 = a + t1 * (b - a);
    const double jump = dot(cell_gradient(d.spaceV, v, f.cell0), f.normal) -
                        dot(cell_gradient(d.spaceV, v, f.cell1), f.normal);
    const QuadratureRule rule = segment_rule(p0, p1, 2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto lambda = barycentric(d.mesh, d.bg, f.cell0, rule.points[q]);
      double vh = 0.0;
      for (int k = 0; k < 3; ++k) vh += lambda[k] * v[d.spaceV.cell_dofs[f.cell0][k]];
      rhs -= rule.weights[q] * vh * jump;
    }
  }
  return {lhs, rhs};
}

}  // namespace test
