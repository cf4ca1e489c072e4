#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "nocut/problem.hpp"

using namespace nocut;
using Catch::Approx;

TEST_CASE("flower level set values") {
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  const double R4 = std::pow(0.47, 4);

  CHECK(pb.phi({0.0, 0.0}) == Approx(-R4));
  CHECK(pb.phi({0.0, 0.0}) < 0.0);

  // a point constructed to lie on the zero set
  const double theta = 0.3;
  const double factor = (5.0 + 3.0 * std::sin(7.0 * theta + 7.0 * M_PI / 36.0)) / 2.0;
  const double r = std::pow(R4 / factor, 0.25);
  CHECK(pb.phi({r * std::cos(theta), r * std::sin(theta)}) == Approx(0.0).margin(1e-12));
}

TEST_CASE("flower rotation redefines the polar angle") {
  const LevelSetProblem base = flower_problem(0.47, 0.0);
  const double shift = 2.0 * M_PI / 7.0;
  const LevelSetProblem rotated = flower_problem(0.47, shift);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{coord(rng), coord(rng)};
    // value at p equals the unrotated value at the point rotated back
    const Vec2 back{p.x * std::cos(shift) + p.y * std::sin(shift),
                    -p.x * std::sin(shift) + p.y * std::cos(shift)};
    CHECK(rotated.phi(p) == Approx(base.phi(back)).margin(1e-12));
    // seven-fold symmetry: shifting theta0 by 2 pi / 7 is the identity
    CHECK(rotated.phi(p) == Approx(base.phi(p)).margin(1e-12));
  }
}

TEST_CASE("disk level set") {
  const LevelSetProblem pb = disk_problem(0.25);
  CHECK(pb.phi({0.25, 0.0}) == Approx(0.0).margin(1e-15));
  CHECK(pb.phi({0.0, 0.0}) == Approx(-0.0625));
  const Vec2 g = pb.grad_phi({0.1, 0.2});
  CHECK(g.x == Approx(0.2));
  CHECK(g.y == Approx(0.4));
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  const double eps = 1e-6;
  for (const LevelSetProblem& pb : {flower_problem(0.47, 0.4), disk_problem(0.3)}) {
    int checked = 0;
    while (checked < 100) {
      const Vec2 p{coord(rng), coord(rng)};
      if (norm(p) < 0.05) continue;  // stay away from the origin
      const Vec2 g = pb.grad_phi(p);
      const Vec2 fd{(pb.phi({p.x + eps, p.y}) - pb.phi({p.x - eps, p.y})) / (2 * eps),
                    (pb.phi({p.x, p.y + eps}) - pb.phi({p.x, p.y - eps})) / (2 * eps)};
      REQUIRE(norm(g - fd) <= 1e-6 * std::max(1.0, norm(g)));
      ++checked;
    }
  }
}

TEST_CASE("flower gradient vanishes at the origin") {
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  CHECK(norm(pb.grad_phi({0.0, 0.0})) == 0.0);
}

TEST_CASE("boundary data is derived from the exact solution") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  const Vec2 dummy_normal{1.0, 0.0};
  for (const LevelSetProblem& pb : {flower_problem(0.47, 0.1, 2.5), disk_problem(0.25, 2.5)}) {
    for (int i = 0; i < 100; ++i) {
      const Vec2 p{coord(rng), coord(rng)};
      const Vec2 gphi = pb.grad_phi(p);
      if (norm(gphi) == 0.0) continue;
      const double u = pb.exact_u(p);
      const double dn = dot(normalized(gphi), pb.exact_grad_u(p));
      CHECK(pb.g_dirichlet(p, dummy_normal) == Approx(u).margin(1e-14));
      CHECK(pb.g_neumann(p, dummy_normal) == Approx(dn).margin(1e-14));
      CHECK(pb.g_robin(p, dummy_normal) == Approx(u + 2.5 * dn).margin(1e-13));
    }
  }
}

TEST_CASE("exact solution u = sin(x) e^y is harmonic") {
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  CHECK(pb.f({0.3, -0.2}) == 0.0);
  // finite-difference Laplacian of exact_u
  const Vec2 p{0.2, 0.1};
  const double eps = 1e-4;
  const double lap = (pb.exact_u({p.x + eps, p.y}) + pb.exact_u({p.x - eps, p.y}) +
                      pb.exact_u({p.x, p.y + eps}) + pb.exact_u({p.x, p.y - eps}) -
                      4.0 * pb.exact_u(p)) /
                     (eps * eps);
  CHECK(lap == Approx(0.0).margin(1e-6));
}

TEST_CASE("problem catalog rejects bad arguments") {
  CHECK_THROWS_AS(flower_problem(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(disk_problem(0.0), std::invalid_argument);
  CHECK_THROWS_AS(disk_problem(0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_problem("square", 0.47, 0.25, 0.0), std::invalid_argument);
  CHECK(make_problem("flower", 0.47, 0.25, 0.0).name == "flower");
  CHECK(make_problem("disk", 0.47, 0.25, 0.0).name == "disk");
}
