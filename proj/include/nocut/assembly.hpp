#pragma once

#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nocut/active_mesh.hpp"
#include "nocut/fe_space.hpp"
#include "nocut/problem.hpp"
#include "nocut/quadrature.hpp"

namespace nocut {

enum class GradDivScaling { Constant, HSquared };
enum class CutFemVariant { LagrangeP0, NitscheSym, NitscheAsym, Neumann };

struct SchemeParams {
  double gamma = 1.0;      // Nitsche penalty
  double sigma = 0.01;     // ghost penalty
  double gamma_div = 1.0;  // grad-div coefficient (Neumann/Robin)
  double gamma_1 = 10.0;   // flux-matching coefficient (Neumann/Robin)
  double kappa = 1.0;      // Robin coefficient
  GradDivScaling graddiv_scaling = GradDivScaling::Constant;

  double effective_gamma_div(double h) const {
    return graddiv_scaling == GradDivScaling::HSquared ? gamma_div * h * h : gamma_div;
  }
};

/// Triplet-assembled sparse system; duplicates are summed on compression.
struct LinearSystem {
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs;
  int n = 0;
  int constraint_rows = 0;
  bool symmetric = false;

  explicit LinearSystem(int size = 0) : rhs(Eigen::VectorXd::Zero(size)), n(size) {}

  void add(int i, int j, double v) { triplets.emplace_back(i, j, v); }

  Eigen::SparseMatrix<double> compressed() const {
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
  }
};

/// Coordinate-format dump ("i j value" per stored entry) for external checks.
inline void write_matrix_coo(std::ostream& os, const LinearSystem& sys) {
  os.precision(17);
  const Eigen::SparseMatrix<double> m = sys.compressed();
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

namespace detail {

constexpr int kSegmentOrder = 2;   // exact for all P1 x P1 products on edges
constexpr int kVolumeDegree = 2;   // load/mass integrands with P1

// Normal-derivative jumps of the up-to-six basis functions on an internal facet.
struct FacetJumps {
  std::array<int, 6> dofs;
  std::array<double, 6> jumps;
  int count = 0;

  void accumulate(int dof, double value) {
    for (int k = 0; k < count; ++k) {
      if (dofs[k] == dof) {
        jumps[k] += value;
        return;
      }
    }
    dofs[count] = dof;
    jumps[count] = value;
    ++count;
  }
};

inline FacetJumps normal_jumps(const ScalarSpaceP1& space, const Facet& f) {
  FacetJumps j;
  for (int k = 0; k < 3; ++k)
    j.accumulate(space.cell_dofs[f.cell0][k], dot(space.cell_grads[f.cell0][k], f.normal));
  for (int k = 0; k < 3; ++k)
    j.accumulate(space.cell_dofs[f.cell1][k], -dot(space.cell_grads[f.cell1][k], f.normal));
  return j;
}

// sigma * h * sum over the given facets of [d u / d n][d v / d n].
inline void add_ghost_penalty(LinearSystem& sys, const ScalarSpaceP1& space,
                              const FacetRegistry& reg, const std::vector<int>& facet_ids,
                              double sigma_h) {
  if (sigma_h == 0.0) return;
  for (int idx : facet_ids) {
    const Facet& f = reg.facets[idx];
    const FacetJumps j = normal_jumps(space, f);
    const double scale = sigma_h * f.length;
    for (int a = 0; a < j.count; ++a)
      for (int b = 0; b < j.count; ++b)
        sys.add(j.dofs[a], j.dofs[b], scale * j.jumps[a] * j.jumps[b]);
  }
}

// Volume stiffness over the full cells of the active mesh, and the f-load.
inline void add_active_stiffness_and_load(LinearSystem& sys, const ActiveMesh& mesh,
                                          const BackgroundMesh& bg, const ScalarSpaceP1& space,
                                          const ScalarField& f) {
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const double area = bg.area(mesh.cells[c].bg);
    const auto& dofs = space.cell_dofs[c];
    const auto& grads = space.cell_grads[c];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) sys.add(dofs[i], dofs[j], area * dot(grads[i], grads[j]));
    if (f) {
      const auto& tri = bg.triangles[mesh.cells[c].bg];
      const QuadratureRule rule =
          triangle_rule(bg.vertices[tri[0]], bg.vertices[tri[1]], bg.vertices[tri[2]], kVolumeDegree);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double wf = rule.weights[q] * f(rule.points[q]);
        if (wf == 0.0) continue;
        const auto lambda = barycentric(mesh, bg, static_cast<int>(c), rule.points[q]);
        for (int i = 0; i < 3; ++i) sys.rhs[dofs[i]] += wf * lambda[i];
      }
    }
  }
}

// Exact P1 vertex masses over the active domain (sum of incident cell areas / 3).
inline std::vector<double> omega_h_masses(const ActiveMesh& mesh, const BackgroundMesh& bg,
                                          const ScalarSpaceP1& space) {
  std::vector<double> m(space.n_dofs, 0.0);
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const double third = bg.area(mesh.cells[c].bg) / 3.0;
    for (int dof : space.cell_dofs[c]) m[dof] += third;
  }
  return m;
}

}  // namespace detail

/// Nitsche-type scheme for the Dirichlet problem without cut-cell integration:
/// volume terms over the whole active mesh, boundary terms on the active-mesh
/// boundary and on the surrogate of the physical boundary, plus ghost penalty.
inline LinearSystem assemble_dirichlet(const LevelSetProblem& problem, const ActiveMesh& mesh,
                                       const BackgroundMesh& bg,
                                       const BoundaryDiscretization& bdry,
                                       const ScalarSpaceP1& space, const SchemeParams& params) {
  if (bdry.segments.empty())
    throw std::invalid_argument("assemble_dirichlet: empty boundary discretization");
  if (params.gamma < 0.0 || params.sigma < 0.0)
    throw std::invalid_argument("assemble_dirichlet: gamma and sigma must be >= 0");

  const double h = mesh.h;
  LinearSystem sys(space.n_dofs);
  sys.symmetric = false;

  detail::add_active_stiffness_and_load(sys, mesh, bg, space, problem.f);

  // - int_{Gamma_h} (du/dn) v with the one-sided gradient of the unique cell.
  for (int idx : mesh.facets.gamma_h) {
    const Facet& f = mesh.facets.facets[idx];
    const int c = f.cell0;
    const auto& dofs = space.cell_dofs[c];
    double dn[3];
    for (int j = 0; j < 3; ++j) dn[j] = dot(space.cell_grads[c][j], f.normal);
    const QuadratureRule rule =
        segment_rule(bg.vertices[f.v0], bg.vertices[f.v1], detail::kSegmentOrder);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto lambda = barycentric(mesh, bg, c, rule.points[q]);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          sys.add(dofs[i], dofs[j], -rule.weights[q] * lambda[i] * dn[j]);
    }
  }

  // Terms on the surrogate boundary: + int u dv/dn + (gamma/h) int u v,
  // rhs: int g dv/dn + (gamma/h) int g v.
  const double penalty = params.gamma / h;
  for (const BoundarySegment& seg : bdry.segments) {
    const int c = seg.parent;
    const auto& dofs = space.cell_dofs[c];
    double dn[3];
    for (int i = 0; i < 3; ++i) dn[i] = dot(space.cell_grads[c][i], seg.normal);
    const QuadratureRule rule = segment_rule(seg.p0, seg.p1, detail::kSegmentOrder);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q];
      const auto lambda = barycentric(mesh, bg, c, rule.points[q]);
      const double g = problem.g_dirichlet(rule.points[q], seg.normal);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j)
          sys.add(dofs[i], dofs[j], w * (dn[i] * lambda[j] + penalty * lambda[i] * lambda[j]));
        sys.rhs[dofs[i]] += w * g * (dn[i] + penalty * lambda[i]);
      }
    }
  }

  detail::add_ghost_penalty(sys, space, mesh.facets, mesh.facets.f_gamma, params.sigma * h);
  return sys;
}

namespace detail {

// Shared core of the Neumann/Robin schemes. Dof layout: u dofs first, then the
// two components per Z vertex (2*slot, 2*slot+1), then an optional multiplier.
inline LinearSystem assemble_flux_scheme(const LevelSetProblem& problem, const ActiveMesh& mesh,
                                         const BackgroundMesh& bg,
                                         const BoundaryDiscretization& bdry,
                                         const ScalarSpaceP1& spaceV, const VectorSpaceZ& spaceZ,
                                         const SchemeParams& params, bool robin) {
  if (spaceZ.n_dofs == 0)
    throw std::invalid_argument("flux scheme: no cut cells, auxiliary space is empty");
  if (!(params.gamma_1 > 0.0)) throw std::invalid_argument("flux scheme: gamma_1 must be > 0");
  if (params.gamma_div < 0.0) throw std::invalid_argument("flux scheme: gamma_div must be >= 0");
  if (robin && !(params.kappa > 0.0))
    throw std::invalid_argument("assemble_robin: kappa must be > 0");

  const double h = mesh.h;
  const double gdiv = params.effective_gamma_div(h);
  const double g1 = params.gamma_1;
  const int n_u = spaceV.n_dofs;
  const bool constrained = !robin;
  const int n = n_u + spaceZ.n_dofs + (constrained ? 1 : 0);

  LinearSystem sys(n);
  sys.symmetric = false;
  sys.constraint_rows = constrained ? 1 : 0;
  const auto ydof = [&](int vertex, int comp) {
    return n_u + 2 * spaceZ.base_of_vertex[vertex] + comp;
  };

  detail::add_active_stiffness_and_load(sys, mesh, bg, spaceV, problem.f);

  // Cut-cell terms: gamma_div (div y, div z) and gamma_1 (y + grad u, z + grad v).
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    if (mesh.cells[c].kind != CellKind::Cut) continue;
    const auto& tri = bg.triangles[mesh.cells[c].bg];
    const double area = bg.area(mesh.cells[c].bg);
    const auto& dofs = spaceV.cell_dofs[c];
    const auto& grads = spaceV.cell_grads[c];

    // gamma_1 grad u . grad v
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) sys.add(dofs[i], dofs[j], g1 * area * dot(grads[i], grads[j]));

    for (int k = 0; k < 3; ++k) {
      for (int c2 = 0; c2 < 2; ++c2) {
        const int yk = ydof(tri[k], c2);
        const double gk = (c2 == 0) ? grads[k].x : grads[k].y;  // div of basis k, comp c2
        // gamma_1 (y . grad v) and (grad u . z): int lambda_k = area / 3.
        for (int i = 0; i < 3; ++i) {
          const double gi = (c2 == 0) ? grads[i].x : grads[i].y;
          sys.add(dofs[i], yk, g1 * (area / 3.0) * gi);
          sys.add(yk, dofs[i], g1 * (area / 3.0) * gi);
        }
        // gamma_div (div y, div z) and gamma_1 vector mass (int lambda_k lambda_l).
        for (int l = 0; l < 3; ++l) {
          const double mass = (k == l) ? area / 6.0 : area / 12.0;
          sys.add(ydof(tri[l], c2), yk, g1 * mass);
          for (int d = 0; d < 2; ++d) {
            const double gl = (d == 0) ? grads[l].x : grads[l].y;
            sys.add(ydof(tri[l], d), yk, gdiv * area * gl * gk);
          }
        }
      }
    }

    // rhs: gamma_div int f div z
    if (problem.f) {
      const QuadratureRule rule =
          triangle_rule(bg.vertices[tri[0]], bg.vertices[tri[1]], bg.vertices[tri[2]], kVolumeDegree);
      const double f_int = rule.integrate(problem.f);
      if (f_int != 0.0)
        for (int l = 0; l < 3; ++l)
          for (int d = 0; d < 2; ++d) {
            const double gl = (d == 0) ? grads[l].x : grads[l].y;
            sys.rhs[ydof(tri[l], d)] += gdiv * f_int * gl;
          }
    }
  }

  // + int_{Gamma_h} (y . n) v on the active-mesh boundary. Boundary facets
  // always belong to cut cells (an interior cell cannot touch a dropped one).
  for (int idx : mesh.facets.gamma_h) {
    const Facet& f = mesh.facets.facets[idx];
    const int c = f.cell0;
    if (mesh.cells[c].kind != CellKind::Cut)
      throw std::logic_error("flux scheme: boundary facet on an interior cell");
    const auto& tri = bg.triangles[mesh.cells[c].bg];
    const auto& dofs = spaceV.cell_dofs[c];
    const QuadratureRule rule =
        segment_rule(bg.vertices[f.v0], bg.vertices[f.v1], detail::kSegmentOrder);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q];
      const auto lambda = barycentric(mesh, bg, c, rule.points[q]);
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
          for (int c2 = 0; c2 < 2; ++c2) {
            const double nc = (c2 == 0) ? f.normal.x : f.normal.y;
            sys.add(dofs[i], ydof(tri[k], c2), w * lambda[i] * lambda[k] * nc);
          }
    }
  }

  // - int_Gamma (y . n) v on the surrogate boundary, plus the Robin mass and
  // the boundary load.
  const double inv_kappa = robin ? 1.0 / params.kappa : 0.0;
  for (const BoundarySegment& seg : bdry.segments) {
    const int c = seg.parent;
    const auto& tri = bg.triangles[mesh.cells[c].bg];
    const auto& dofs = spaceV.cell_dofs[c];
    const QuadratureRule rule = segment_rule(seg.p0, seg.p1, detail::kSegmentOrder);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q];
      const auto lambda = barycentric(mesh, bg, c, rule.points[q]);
      const double g = robin ? problem.g_robin(rule.points[q], seg.normal)
                             : problem.g_neumann(rule.points[q], seg.normal);
      for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k)
          for (int c2 = 0; c2 < 2; ++c2) {
            const double nc = (c2 == 0) ? seg.normal.x : seg.normal.y;
            sys.add(dofs[i], ydof(tri[k], c2), -w * lambda[i] * lambda[k] * nc);
          }
        if (robin) {
          for (int j = 0; j < 3; ++j)
            sys.add(dofs[i], dofs[j], inv_kappa * w * lambda[i] * lambda[j]);
          sys.rhs[dofs[i]] += inv_kappa * w * g * lambda[i];
        } else {
          sys.rhs[dofs[i]] += w * g * lambda[i];
        }
      }
    }
  }

  // Reduced ghost penalty: facets separating cut cells from interior ones.
  detail::add_ghost_penalty(sys, spaceV, mesh.facets, mesh.facets.gamma_h_int, params.sigma * h);

  if (constrained) {
    const std::vector<double> m = detail::omega_h_masses(mesh, bg, spaceV);
    for (int i = 0; i < n_u; ++i) {
      sys.add(n - 1, i, m[i]);
      sys.add(i, n - 1, m[i]);
    }
  }
  return sys;
}

}  // namespace detail

/// Flux-reconstruction scheme for the Neumann problem: auxiliary P1 vector
/// unknown on the cut band, grad-div and flux-matching stabilization, reduced
/// ghost penalty, and a mean-zero constraint appended as a multiplier row.
inline LinearSystem assemble_neumann(const LevelSetProblem& problem, const ActiveMesh& mesh,
                                     const BackgroundMesh& bg, const BoundaryDiscretization& bdry,
                                     const ScalarSpaceP1& spaceV, const VectorSpaceZ& spaceZ,
                                     const SchemeParams& params) {
  return detail::assemble_flux_scheme(problem, mesh, bg, bdry, spaceV, spaceZ, params,
                                      /*robin=*/false);
}

/// Robin variant of the flux scheme: adds (1/kappa) boundary mass, drops the
/// mean-zero constraint.
inline LinearSystem assemble_robin(const LevelSetProblem& problem, const ActiveMesh& mesh,
                                   const BackgroundMesh& bg, const BoundaryDiscretization& bdry,
                                   const ScalarSpaceP1& spaceV, const VectorSpaceZ& spaceZ,
                                   const SchemeParams& params) {
  return detail::assemble_flux_scheme(problem, mesh, bg, bdry, spaceV, spaceZ, params,
                                      /*robin=*/true);
}

/// CutFEM baselines: volume integration over the cells clipped to the domain.
inline LinearSystem assemble_cutfem(const LevelSetProblem& problem, const ActiveMesh& mesh,
                                    const BackgroundMesh& bg, const BoundaryDiscretization& bdry,
                                    const ScalarSpaceP1& space, CutFemVariant variant,
                                    const SchemeParams& params) {
  if (bdry.segments.empty())
    throw std::invalid_argument("assemble_cutfem: empty boundary discretization");

  const double h = mesh.h;
  const int n_u = space.n_dofs;
  const bool lagrange = variant == CutFemVariant::LagrangeP0;
  const bool neumann = variant == CutFemVariant::Neumann;

  // Multiplier layout: one P0 dof per cut cell (Lagrange variant) or one
  // mean-zero constraint row (Neumann variant).
  std::vector<int> multiplier_of_cell;
  int n = n_u;
  if (lagrange) {
    multiplier_of_cell.assign(mesh.cells.size(), -1);
    for (std::size_t c = 0; c < mesh.cells.size(); ++c)
      if (mesh.cells[c].kind == CellKind::Cut) multiplier_of_cell[c] = n++;
  } else if (neumann) {
    n += 1;
  }

  LinearSystem sys(n);
  sys.symmetric = lagrange || neumann || variant == CutFemVariant::NitscheSym;
  sys.constraint_rows = neumann ? 1 : 0;

  // Volume terms over the clipped polygons.
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const std::vector<Vec2> poly = clip_cell_to_domain(static_cast<int>(c), mesh, bg);
    const double area = polygon_area(poly);
    const auto& dofs = space.cell_dofs[c];
    const auto& grads = space.cell_grads[c];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) sys.add(dofs[i], dofs[j], area * dot(grads[i], grads[j]));
    if (problem.f) {
      const QuadratureRule rule = polygon_rule(poly, detail::kVolumeDegree);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double wf = rule.weights[q] * problem.f(rule.points[q]);
        if (wf == 0.0) continue;
        const auto lambda = barycentric(mesh, bg, static_cast<int>(c), rule.points[q]);
        for (int i = 0; i < 3; ++i) sys.rhs[dofs[i]] += wf * lambda[i];
      }
    }
  }

  // Boundary terms on the surrogate of Gamma.
  const double penalty = params.gamma / h;
  for (const BoundarySegment& seg : bdry.segments) {
    const int c = seg.parent;
    const auto& dofs = space.cell_dofs[c];
    double dn[3];
    for (int i = 0; i < 3; ++i) dn[i] = dot(space.cell_grads[c][i], seg.normal);
    const QuadratureRule rule = segment_rule(seg.p0, seg.p1, detail::kSegmentOrder);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q];
      const auto lambda = barycentric(mesh, bg, c, rule.points[q]);
      switch (variant) {
        case CutFemVariant::LagrangeP0: {
          const double g = problem.g_dirichlet(rule.points[q], seg.normal);
          const int mc = multiplier_of_cell[c];
          for (int i = 0; i < 3; ++i) {
            sys.add(dofs[i], mc, w * lambda[i]);
            sys.add(mc, dofs[i], w * lambda[i]);
          }
          sys.rhs[mc] += w * g;
          break;
        }
        case CutFemVariant::NitscheSym:
        case CutFemVariant::NitscheAsym: {
          const double sign = (variant == CutFemVariant::NitscheAsym) ? 1.0 : -1.0;
          const double g = problem.g_dirichlet(rule.points[q], seg.normal);
          for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j)
              sys.add(dofs[i], dofs[j],
                      w * (-lambda[i] * dn[j] + sign * dn[i] * lambda[j] +
                           penalty * lambda[i] * lambda[j]));
            sys.rhs[dofs[i]] += w * g * (sign * dn[i] + penalty * lambda[i]);
          }
          break;
        }
        case CutFemVariant::Neumann: {
          const double g = problem.g_neumann(rule.points[q], seg.normal);
          for (int i = 0; i < 3; ++i) sys.rhs[dofs[i]] += w * g * lambda[i];
          break;
        }
      }
    }
  }

  if (lagrange) {
    // - sigma h sum over internal facets of the cut submesh of [lambda][mu].
    const double sh = params.sigma * h;
    for (int idx : mesh.facets.f_gamma_cut) {
      const Facet& f = mesh.facets.facets[idx];
      const int m0 = multiplier_of_cell[f.cell0];
      const int m1 = multiplier_of_cell[f.cell1];
      const double scale = sh * f.length;
      sys.add(m0, m0, -scale);
      sys.add(m1, m1, -scale);
      sys.add(m0, m1, scale);
      sys.add(m1, m0, scale);
    }
  } else {
    detail::add_ghost_penalty(sys, space, mesh.facets, mesh.facets.f_gamma, params.sigma * h);
  }

  if (neumann) {
    const std::vector<double> m = detail::omega_h_masses(mesh, bg, space);
    for (int i = 0; i < n_u; ++i) {
      sys.add(n - 1, i, m[i]);
      sys.add(i, n - 1, m[i]);
    }
  }
  return sys;
}

}  // namespace nocut
