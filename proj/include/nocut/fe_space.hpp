#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nocut/active_mesh.hpp"
#include "nocut/background_mesh.hpp"
#include "nocut/geometry.hpp"

namespace nocut {

/// Continuous P1 space on the active mesh. One dof per vertex touched by an
/// active cell (including vertices outside the physical domain).
struct ScalarSpaceP1 {
  std::vector<int> dof_of_vertex;  // background vertex -> dof, -1 if unused
  int n_dofs = 0;
  // Per active cell: the three dof indices and the constant shape gradients.
  std::vector<std::array<int, 3>> cell_dofs;
  std::vector<std::array<Vec2, 3>> cell_grads;
};

/// P1 vector space on the cut cells only (two components per vertex).
/// Component c of vertex slot k has dof index 2 * base[k] + c.
struct VectorSpaceZ {
  std::vector<int> base_of_vertex;  // background vertex -> slot, -1 if unused
  int n_vertices = 0;
  int n_dofs = 0;  // = 2 * n_vertices
};

namespace detail {

inline std::array<Vec2, 3> shape_gradients(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double twoA = cross(b - a, c - a);
  return {perp(c - b) / twoA, perp(a - c) / twoA, perp(b - a) / twoA};
}

}  // namespace detail

inline ScalarSpaceP1 build_scalar_space(const ActiveMesh& mesh, const BackgroundMesh& bg) {
  if (mesh.cells.empty()) throw std::invalid_argument("build_scalar_space: empty active mesh");
  ScalarSpaceP1 space;
  space.dof_of_vertex.assign(bg.vertices.size(), -1);
  space.cell_dofs.resize(mesh.cells.size());
  space.cell_grads.resize(mesh.cells.size());
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& tri = bg.triangles[mesh.cells[c].bg];
    for (int k = 0; k < 3; ++k) {
      int& dof = space.dof_of_vertex[tri[k]];
      if (dof < 0) dof = space.n_dofs++;
      space.cell_dofs[c][k] = dof;
    }
    space.cell_grads[c] =
        detail::shape_gradients(bg.vertices[tri[0]], bg.vertices[tri[1]], bg.vertices[tri[2]]);
  }
  return space;
}

inline VectorSpaceZ build_vector_space(const ActiveMesh& mesh, const BackgroundMesh& bg) {
  VectorSpaceZ space;
  space.base_of_vertex.assign(bg.vertices.size(), -1);
  for (const auto& cell : mesh.cells) {
    if (cell.kind != CellKind::Cut) continue;
    for (int v : bg.triangles[cell.bg]) {
      int& slot = space.base_of_vertex[v];
      if (slot < 0) slot = space.n_vertices++;
    }
  }
  space.n_dofs = 2 * space.n_vertices;
  return space;
}

/// Nodal interpolation: coefficient vector with field(vertex) at each dof.
template <typename Field>
std::vector<double> interpolate_nodal(const ScalarSpaceP1& space, const BackgroundMesh& bg,
                                      Field&& field) {
  std::vector<double> coeffs(space.n_dofs, 0.0);
  for (std::size_t v = 0; v < space.dof_of_vertex.size(); ++v)
    if (space.dof_of_vertex[v] >= 0) coeffs[space.dof_of_vertex[v]] = field(bg.vertices[v]);
  return coeffs;
}

struct FieldSample {
  double value = 0.0;
  Vec2 gradient;
};

/// Barycentric coordinates of p in the cell, in the vertex order of the cell.
inline std::array<double, 3> barycentric(const ActiveMesh& mesh, const BackgroundMesh& bg,
                                         int cell, const Vec2& p) {
  const auto& tri = bg.triangles[mesh.cells[cell].bg];
  const Vec2 a = bg.vertices[tri[0]];
  const Vec2 b = bg.vertices[tri[1]];
  const Vec2 c = bg.vertices[tri[2]];
  const double twoA = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / twoA;
  const double l2 = cross(b - a, p - a) / twoA;
  return {1.0 - l1 - l2, l1, l2};
}

/// Value and (per-cell constant) gradient of the coefficient vector at a point
/// of the given active cell.
inline FieldSample evaluate(const ScalarSpaceP1& space, const std::vector<double>& coeffs,
                            const ActiveMesh& mesh, const BackgroundMesh& bg, int cell,
                            const Vec2& p) {
  const auto lambda = barycentric(mesh, bg, cell, p);
  for (double l : lambda)
    if (l < -1e-12 || l > 1.0 + 1e-12)
      throw std::domain_error("evaluate: point lies outside the cell");
  FieldSample s;
  for (int k = 0; k < 3; ++k) {
    const double u = coeffs[space.cell_dofs[cell][k]];
    s.value += lambda[k] * u;
    s.gradient += u * space.cell_grads[cell][k];
  }
  return s;
}

/// Constant gradient of the coefficient vector on the given active cell.
inline Vec2 cell_gradient(const ScalarSpaceP1& space, const std::vector<double>& coeffs,
                          int cell) {
  Vec2 g;
  for (int k = 0; k < 3; ++k) g += coeffs[space.cell_dofs[cell][k]] * space.cell_grads[cell][k];
  return g;
}

}  // namespace nocut
