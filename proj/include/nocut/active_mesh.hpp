#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nocut/background_mesh.hpp"
#include "nocut/errors.hpp"
#include "nocut/geometry.hpp"
#include "nocut/problem.hpp"

namespace nocut {

enum class CellKind : std::uint8_t { Interior, Cut };

struct Facet {
  int v0 = -1, v1 = -1;     // background vertex indices
  int cell0 = -1;           // active cell index (always set)
  int cell1 = -1;           // second active cell, -1 on the mesh boundary
  Vec2 normal;              // unit normal: cell0 -> cell1, or outward on the boundary
  double length = 0.0;
};

/// Facet sets of the active mesh. Indices refer to the `facets` array:
///  - gamma_h:      facets on the boundary of the active domain, outward normals
///  - gamma_h_int:  internal facets separating Cut cells from Interior cells
///  - f_gamma:      internal facets owned by at least one Cut cell
///  - f_gamma_cut:  internal facets with both neighbors Cut
struct FacetRegistry {
  std::vector<Facet> facets;
  std::vector<int> gamma_h;
  std::vector<int> gamma_h_int;
  std::vector<int> f_gamma;
  std::vector<int> f_gamma_cut;
};

struct ActiveCell {
  int bg = -1;  // background triangle index
  CellKind kind = CellKind::Interior;
};

/// Background cells retained against the level set, with the facet registry.
/// `vertex_phi` holds the snapped level-set values at all background vertices
/// (|phi| <= tol is replaced by -tol, i.e. on-boundary vertices count as inside);
/// all downstream crossing and clipping code uses these values.
struct ActiveMesh {
  std::vector<ActiveCell> cells;
  std::vector<int> cell_of_background;  // -1 if dropped
  std::vector<double> vertex_phi;
  FacetRegistry facets;
  double h = 0.0;
  double tol = 0.0;

  int n_cut() const {
    int c = 0;
    for (const auto& cell : cells) c += (cell.kind == CellKind::Cut) ? 1 : 0;
    return c;
  }
};

struct BoundarySegment {
  Vec2 p0, p1;
  double length = 0.0;
  Vec2 normal;      // outward (toward phi > 0)
  int parent = -1;  // active cell index of the Cut parent
};

/// Polygonal surrogate of the physical boundary: one straight segment per cut cell.
struct BoundaryDiscretization {
  std::vector<BoundarySegment> segments;

  double total_length() const {
    double s = 0.0;
    for (const auto& seg : segments) s += seg.length;
    return s;
  }
};

inline ActiveMesh classify_and_extract(const BackgroundMesh& bg, const LevelSetProblem& problem,
                                       double tol = 1e-12) {
  if (tol < 0.0) throw std::invalid_argument("classify_and_extract: tol must be >= 0");

  ActiveMesh mesh;
  mesh.h = bg.h;
  mesh.tol = tol;
  mesh.vertex_phi.resize(bg.vertices.size());
  for (std::size_t i = 0; i < bg.vertices.size(); ++i) {
    const double phi = problem.phi(bg.vertices[i]);
    mesh.vertex_phi[i] = (std::abs(phi) <= tol) ? -tol : phi;
  }

  mesh.cell_of_background.assign(bg.triangles.size(), -1);
  for (std::size_t t = 0; t < bg.triangles.size(); ++t) {
    const auto& tri = bg.triangles[t];
    const double p0 = mesh.vertex_phi[tri[0]];
    const double p1 = mesh.vertex_phi[tri[1]];
    const double p2 = mesh.vertex_phi[tri[2]];
    if (p0 == -tol && p1 == -tol && p2 == -tol)
      throw DegenerateLevelSetError("level set vanishes on background cell " + std::to_string(t));
    const double mn = std::min({p0, p1, p2});
    const double mx = std::max({p0, p1, p2});
    if (!(mn < -tol)) continue;  // no genuinely-inside vertex: dropped
    mesh.cell_of_background[t] = static_cast<int>(mesh.cells.size());
    mesh.cells.push_back({static_cast<int>(t), mx > tol ? CellKind::Cut : CellKind::Interior});
  }
  if (mesh.cells.empty()) throw EmptyDomainError("no background cell intersects the domain");

  // Facet registry: collect edges of active cells keyed by sorted vertex pair.
  std::map<std::pair<int, int>, std::array<int, 2>> edge_cells;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& tri = bg.triangles[mesh.cells[c].bg];
    for (int e = 0; e < 3; ++e) {
      int a = tri[e];
      int b = tri[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_cells.try_emplace({a, b}, std::array<int, 2>{static_cast<int>(c), -1});
      if (!inserted) it->second[1] = static_cast<int>(c);
    }
  }

  FacetRegistry& reg = mesh.facets;
  reg.facets.reserve(edge_cells.size());
  for (const auto& [key, cells] : edge_cells) {
    Facet f;
    f.v0 = key.first;
    f.v1 = key.second;
    f.cell0 = std::min(cells[0], cells[1] < 0 ? cells[0] : cells[1]);
    f.cell1 = (cells[1] < 0) ? -1 : std::max(cells[0], cells[1]);
    const Vec2 a = bg.vertices[f.v0];
    const Vec2 b = bg.vertices[f.v1];
    f.length = norm(b - a);
    Vec2 n = normalized(perp(b - a));
    const Vec2 mid = 0.5 * (a + b);
    if (f.cell1 < 0) {
      // boundary of the active domain: orient away from the unique cell
      if (dot(n, mid - bg.centroid(mesh.cells[f.cell0].bg)) < 0.0) n = -1.0 * n;
    } else {
      if (dot(n, bg.centroid(mesh.cells[f.cell1].bg) - bg.centroid(mesh.cells[f.cell0].bg)) < 0.0)
        n = -1.0 * n;
    }
    f.normal = n;

    const int idx = static_cast<int>(reg.facets.size());
    if (f.cell1 < 0) {
      reg.gamma_h.push_back(idx);
    } else {
      const bool cut0 = mesh.cells[f.cell0].kind == CellKind::Cut;
      const bool cut1 = mesh.cells[f.cell1].kind == CellKind::Cut;
      if (cut0 || cut1) reg.f_gamma.push_back(idx);
      if (cut0 && cut1) reg.f_gamma_cut.push_back(idx);
      if (cut0 != cut1) reg.gamma_h_int.push_back(idx);
    }
    reg.facets.push_back(f);
  }
  return mesh;
}

namespace detail {

// Zero crossing of the linear interpolant on [a, b] with values (pa, pb).
inline Vec2 edge_crossing(const Vec2& a, const Vec2& b, double pa, double pb) {
  const double t = pa / (pa - pb);
  return a + t * (b - a);
}

// Gradient of the linear interpolant of (p0, p1, p2) on triangle (a, b, c).
inline Vec2 linear_gradient(const Vec2& a, const Vec2& b, const Vec2& c, double p0, double p1,
                            double p2) {
  const double twoA = cross(b - a, c - a);
  const Vec2 g0 = perp(c - b) / twoA;
  const Vec2 g1 = perp(a - c) / twoA;
  const Vec2 g2 = perp(b - a) / twoA;
  return p0 * g0 + p1 * g1 + p2 * g2;
}

}  // namespace detail

inline BoundaryDiscretization extract_boundary_segments(const ActiveMesh& mesh,
                                                        const BackgroundMesh& bg) {
  if (mesh.n_cut() == 0)
    throw std::invalid_argument("extract_boundary_segments: mesh has no cut cells");
  BoundaryDiscretization bdry;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    if (mesh.cells[c].kind != CellKind::Cut) continue;
    const auto& tri = bg.triangles[mesh.cells[c].bg];
    Vec2 pts[3] = {bg.vertices[tri[0]], bg.vertices[tri[1]], bg.vertices[tri[2]]};
    double phi[3] = {mesh.vertex_phi[tri[0]], mesh.vertex_phi[tri[1]], mesh.vertex_phi[tri[2]]};

    Vec2 crossing[2];
    int found = 0;
    for (int e = 0; e < 3; ++e) {
      const int a = e;
      const int b = (e + 1) % 3;
      if ((phi[a] < 0.0) == (phi[b] < 0.0)) continue;
      if (found < 2) crossing[found] = detail::edge_crossing(pts[a], pts[b], phi[a], phi[b]);
      ++found;
    }
    if (found != 2)
      throw DegenerateCutError("cut cell " + std::to_string(c) + " has " + std::to_string(found) +
                               " edge crossings");

    BoundarySegment seg;
    seg.p0 = crossing[0];
    seg.p1 = crossing[1];
    seg.length = norm(seg.p1 - seg.p0);
    seg.normal = normalized(detail::linear_gradient(pts[0], pts[1], pts[2], phi[0], phi[1], phi[2]));
    seg.parent = static_cast<int>(c);
    bdry.segments.push_back(seg);
  }
  return bdry;
}

namespace detail {

// Part of the cell where the linear interpolant of the vertex values has the
// requested sign (keep_negative: phi <= 0, else phi >= 0). Counter-clockwise.
inline std::vector<Vec2> clip_triangle(const Vec2* pts, const double* phi, bool keep_negative) {
  std::vector<Vec2> poly;
  poly.reserve(4);
  for (int e = 0; e < 3; ++e) {
    const int a = e;
    const int b = (e + 1) % 3;
    const bool in_a = keep_negative ? (phi[a] < 0.0) : (phi[a] > 0.0);
    const bool in_b = keep_negative ? (phi[b] < 0.0) : (phi[b] > 0.0);
    if (in_a) poly.push_back(pts[a]);
    if (in_a != in_b) poly.push_back(edge_crossing(pts[a], pts[b], phi[a], phi[b]));
  }
  return poly;
}

}  // namespace detail

/// Sub-polygon of an active cell lying inside the domain (linear surrogate of
/// the level set). Interior cells return the full triangle.
inline std::vector<Vec2> clip_cell_to_domain(int cell, const ActiveMesh& mesh,
                                             const BackgroundMesh& bg) {
  const auto& tri = bg.triangles[mesh.cells[cell].bg];
  Vec2 pts[3] = {bg.vertices[tri[0]], bg.vertices[tri[1]], bg.vertices[tri[2]]};
  if (mesh.cells[cell].kind == CellKind::Interior) return {pts[0], pts[1], pts[2]};

  double phi[3] = {mesh.vertex_phi[tri[0]], mesh.vertex_phi[tri[1]], mesh.vertex_phi[tri[2]]};
  std::vector<Vec2> poly = detail::clip_triangle(pts, phi, /*keep_negative=*/true);
  const double cell_area = triangle_area(pts[0], pts[1], pts[2]);
  if (poly.size() < 3 || polygon_area(poly) < 1e-14 * cell_area)
    throw DegenerateClipError("clip of cut cell " + std::to_string(cell) +
                              " is degenerate (area below 1e-14 of the cell)");
  return poly;
}

/// Complement part of a cut cell (the strip between the surrogate boundary and
/// the active-domain boundary). Empty for interior cells; may be empty or the
/// whole triangle only in degenerate snapped configurations.
inline std::vector<Vec2> clip_cell_to_complement(int cell, const ActiveMesh& mesh,
                                                 const BackgroundMesh& bg) {
  if (mesh.cells[cell].kind == CellKind::Interior) return {};
  const auto& tri = bg.triangles[mesh.cells[cell].bg];
  Vec2 pts[3] = {bg.vertices[tri[0]], bg.vertices[tri[1]], bg.vertices[tri[2]]};
  double phi[3] = {mesh.vertex_phi[tri[0]], mesh.vertex_phi[tri[1]], mesh.vertex_phi[tri[2]]};
  std::vector<Vec2> poly = detail::clip_triangle(pts, phi, /*keep_negative=*/false);
  if (poly.size() < 3) return {};
  return poly;
}

/// Plain-text dump of the boundary segments: "s x0 y0 x1 y1 nx ny" per line.
inline void write_segments(std::ostream& os, const BoundaryDiscretization& bdry) {
  os.precision(17);
  for (const auto& s : bdry.segments)
    os << "s " << s.p0.x << ' ' << s.p0.y << ' ' << s.p1.x << ' ' << s.p1.y << ' ' << s.normal.x
       << ' ' << s.normal.y << '\n';
}

}  // namespace nocut
