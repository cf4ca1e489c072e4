#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>
#include <sstream>

#include "nocut/background_mesh.hpp"

using namespace nocut;
using Catch::Approx;

TEST_CASE("criss-cross counts") {
  const BackgroundMesh m2 = build_crisscross(2);
  CHECK(m2.triangles.size() == 16);
  CHECK(m2.vertices.size() == 13);

  const BackgroundMesh m16 = build_crisscross(16);
  CHECK(m16.triangles.size() == 1024);
  CHECK(m16.vertices.size() == 17 * 17 + 16 * 16);
  CHECK(m16.h == Approx(std::sqrt(2.0) / 32.0));
}

TEST_CASE("triangles are positively oriented and tile the unit square") {
  for (int n : {2, 5, 16}) {
    const BackgroundMesh mesh = build_crisscross(n);
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const double a = mesh.area(static_cast<int>(t));
      REQUIRE(a > 0.0);
      total += a;
    }
    CHECK(total == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("edges are manifold and the boundary is the square") {
  const int n = 6;
  const BackgroundMesh mesh = build_crisscross(n);
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  int boundary = 0;
  for (const auto& [edge, count] : edge_count) {
    REQUIRE((count == 1 || count == 2));
    if (count == 1) {
      ++boundary;
      // boundary edges lie on the frame of O
      for (int v : {edge.first, edge.second}) {
        const Vec2& p = mesh.vertices[v];
        CHECK((std::abs(std::abs(p.x) - 0.5) < 1e-15 || std::abs(std::abs(p.y) - 0.5) < 1e-15));
      }
    }
  }
  CHECK(boundary == 4 * n);
}

TEST_CASE("criss-cross is exactly quasi-uniform") {
  const BackgroundMesh mesh = build_crisscross(7);
  double dmin = 1e300, dmax = 0.0;
  for (const auto& tri : mesh.triangles) {
    double diam = 0.0;
    for (int e = 0; e < 3; ++e)
      diam = std::max(diam, norm(mesh.vertices[tri[e]] - mesh.vertices[tri[(e + 1) % 3]]));
    dmin = std::min(dmin, diam);
    dmax = std::max(dmax, diam);
  }
  CHECK(dmax / dmin == Approx(1.0).margin(1e-12));
}

TEST_CASE("invalid size is rejected") {
  CHECK_THROWS_AS(build_crisscross(1), std::invalid_argument);
  CHECK_THROWS_AS(build_crisscross(0), std::invalid_argument);
}

TEST_CASE("mesh dump format") {
  const BackgroundMesh mesh = build_crisscross(2);
  std::ostringstream os;
  write_mesh(os, mesh);
  int v_lines = 0, t_lines = 0;
  std::istringstream is(os.str());
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("v ", 0) == 0) ++v_lines;
    if (line.rfind("t ", 0) == 0) ++t_lines;
  }
  CHECK(v_lines == 13);
  CHECK(t_lines == 16);
}
