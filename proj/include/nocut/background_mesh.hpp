#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "nocut/geometry.hpp"

namespace nocut {

/// Uniform criss-cross triangulation of the square O = (-0.5, 0.5)^2:
/// each of the n x n cells is split into 4 triangles by its diagonals
/// around an added center vertex. All triangles are counter-clockwise.
struct BackgroundMesh {
  int n = 0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  double h = 0.0;  // mesh size: half cell diagonal = sqrt(2)/(2n)

  const Vec2& vertex(int t, int k) const { return vertices[triangles[t][k]]; }

  Vec2 centroid(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
  }

  double area(int t) const {
    return triangle_area(vertex(t, 0), vertex(t, 1), vertex(t, 2));
  }
};

inline BackgroundMesh build_crisscross(int n) {
  if (n < 2) throw std::invalid_argument("build_crisscross: n must be >= 2");
  BackgroundMesh mesh;
  mesh.n = n;
  mesh.h = std::sqrt(2.0) / (2.0 * n);
  mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1) + static_cast<std::size_t>(n) * n);

  // Lattice vertices row-major, then cell centers row-major.
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(static_cast<double>(i) / n - 0.5, static_cast<double>(j) / n - 0.5);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      mesh.vertices.emplace_back((i + 0.5) / n - 0.5, (j + 0.5) / n - 0.5);

  const auto corner = [n](int i, int j) { return j * (n + 1) + i; };
  const int center0 = (n + 1) * (n + 1);

  mesh.triangles.reserve(static_cast<std::size_t>(4) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int c00 = corner(i, j);
      const int c10 = corner(i + 1, j);
      const int c11 = corner(i + 1, j + 1);
      const int c01 = corner(i, j + 1);
      const int m = center0 + j * n + i;
      mesh.triangles.push_back({c00, c10, m});
      mesh.triangles.push_back({c10, c11, m});
      mesh.triangles.push_back({c11, c01, m});
      mesh.triangles.push_back({c01, c00, m});
    }
  }
  return mesh;
}

/// Plain-text dump: one "v x y" line per vertex, one "t i j k" per triangle.
inline void write_mesh(std::ostream& os, const BackgroundMesh& mesh) {
  os.precision(17);
  for (const Vec2& v : mesh.vertices) os << "v " << v.x << ' ' << v.y << '\n';
  for (const auto& t : mesh.triangles) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace nocut
