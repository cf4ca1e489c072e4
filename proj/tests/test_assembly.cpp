#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "nocut/assembly.hpp"
#include "nocut/solver.hpp"
#include "test_helpers.hpp"

using namespace nocut;
using Catch::Approx;

namespace {

std::vector<double> solve_to_vector(const LinearSystem& sys) {
  const SolveReport report = solve_direct(sys);
  REQUIRE(report.residual_norm < 1e-9);
  return {report.solution.data(), report.solution.data() + report.solution.size()};
}

double max_nodal_error(const std::vector<double>& u_h, const test::Discretization& d,
                       const ScalarField& u, double shift = 0.0) {
  double worst = 0.0;
  for (std::size_t v = 0; v < d.spaceV.dof_of_vertex.size(); ++v) {
    const int dof = d.spaceV.dof_of_vertex[v];
    if (dof < 0) continue;
    worst = std::max(worst, std::abs(u_h[dof] - (u(d.bg.vertices[v]) - shift)));
  }
  return worst;
}

}  // namespace

TEST_CASE("dirichlet patch test: linear solutions are exact") {
  const LevelSetProblem pb =
      test::linear_patch_problem(disk_problem(0.25), 1.0, 2.0, 3.0);
  const test::Discretization d = test::discretize(pb, 16);
  SchemeParams params;
  params.gamma = 1.0;
  params.sigma = 0.01;
  const LinearSystem sys = assemble_dirichlet(pb, d.mesh, d.bg, d.bdry, d.spaceV, params);
  const auto u_h = solve_to_vector(sys);
  CHECK(max_nodal_error(u_h, d, pb.exact_u) < 1e-10);
}

TEST_CASE("dirichlet form is positive on random vectors") {
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  const test::Discretization d = test::discretize(pb, 16);
  SchemeParams params;
  params.gamma = 1.0;
  params.sigma = 0.01;
  const auto A =
      assemble_dirichlet(pb, d.mesh, d.bg, d.bdry, d.spaceV, params).compressed();
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto v = test::random_vector(d.spaceV.n_dofs, rng);
    CHECK(test::quadratic_form(A, v) > 0.0);
  }
}

TEST_CASE("assembly is affine in each parameter") {
  const LevelSetProblem pb = flower_problem(0.47, 0.2);
  const test::Discretization d = test::discretize(pb, 12);

  const auto dirichlet = [&](double gamma, double sigma) {
    SchemeParams p;
    p.gamma = gamma;
    p.sigma = sigma;
    return assemble_dirichlet(pb, d.mesh, d.bg, d.bdry, d.spaceV, p).compressed();
  };

  // extrapolation in gamma and in sigma reproduces a third assembly
  const auto A00 = dirichlet(0.0, 0.01);
  const auto A10 = dirichlet(1.0, 0.01);
  const auto A20 = dirichlet(2.0, 0.01);
  CHECK(test::max_abs(A20 - (2.0 * A10 - A00).eval()) < 1e-12 * test::max_abs(A20));

  const auto S0 = dirichlet(1.0, 0.0);
  const auto S1 = dirichlet(1.0, 0.5);
  const auto S2 = dirichlet(1.0, 1.0);
  CHECK(test::max_abs(S2 - (2.0 * S1 - S0).eval()) < 1e-12 * test::max_abs(S2));

  // gamma = sigma = 0 wipes the boundary-mass and ghost contributions
  const auto bare = dirichlet(0.0, 0.0);
  const auto full = dirichlet(1.0, 0.01);
  const auto gamma_part = (dirichlet(1.0, 0.0) - bare).eval();
  const auto sigma_part = (dirichlet(0.0, 0.01) - bare).eval();
  CHECK(test::max_abs((full - bare - gamma_part - sigma_part).eval()) <
        1e-12 * test::max_abs(full));
}

TEST_CASE("ghost penalty block is positive semidefinite") {
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  const test::Discretization d = test::discretize(pb, 16);
  SchemeParams p0;
  p0.gamma = 1.0;
  p0.sigma = 0.0;
  SchemeParams p1 = p0;
  p1.sigma = 1.0;
  const auto ghost = (assemble_dirichlet(pb, d.mesh, d.bg, d.bdry, d.spaceV, p1).compressed() -
                      assemble_dirichlet(pb, d.mesh, d.bg, d.bdry, d.spaceV, p0).compressed())
                         .eval();
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    const auto v = test::random_vector(d.spaceV.n_dofs, rng);
    CHECK(test::quadratic_form(ghost, v) >= -1e-12 * test::max_abs(ghost));
  }
}

TEST_CASE("neumann patch test: linear solutions are exact up to their mean") {
  const LevelSetProblem pb =
      test::linear_patch_problem(disk_problem(0.25), 1.0, 2.0, 3.0);
  const test::Discretization d = test::discretize(pb, 16);
  SchemeParams params;
  params.gamma_div = 1.0;
  params.gamma_1 = 10.0;
  params.sigma = 0.01;
  const LinearSystem sys =
      assemble_neumann(pb, d.mesh, d.bg, d.bdry, d.spaceV, d.spaceZ, params);
  REQUIRE(sys.constraint_rows == 1);
  REQUIRE(sys.n == d.spaceV.n_dofs + d.spaceZ.n_dofs + 1);
  const auto sol = solve_to_vector(sys);

  // mean of the exact solution over the active domain (exact P1 masses)
  const auto masses = detail::omega_h_masses(d.mesh, d.bg, d.spaceV);
  const auto u_exact = interpolate_nodal(d.spaceV, d.bg, pb.exact_u);
  double mass = 0.0, integral = 0.0;
  for (int i = 0; i < d.spaceV.n_dofs; ++i) {
    mass += masses[i];
    integral += masses[i] * u_exact[i];
  }
  CHECK(max_nodal_error(sol, d, pb.exact_u, integral / mass) < 1e-9);

  // flux variable equals -grad u on every Z dof
  for (std::size_t v = 0; v < d.spaceZ.base_of_vertex.size(); ++v) {
    const int base = d.spaceZ.base_of_vertex[v];
    if (base < 0) continue;
    CHECK(std::abs(sol[d.spaceV.n_dofs + 2 * base] - (-2.0)) < 1e-9);
    CHECK(std::abs(sol[d.spaceV.n_dofs + 2 * base + 1] - (-3.0)) < 1e-9);
  }

  // the discrete mean of the solution vanishes
  double solution_integral = 0.0;
  double solution_norm = 0.0;
  for (int i = 0; i < d.spaceV.n_dofs; ++i) {
    solution_integral += masses[i] * sol[i];
    solution_norm += sol[i] * sol[i];
  }
  CHECK(std::abs(solution_integral) < 1e-10 * std::sqrt(solution_norm));
}

TEST_CASE("neumann kernel: constants with zero flux") {
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  const test::Discretization d = test::discretize(pb, 16);
  SchemeParams params;
  params.gamma_div = 1.0;
  params.gamma_1 = 10.0;
  params.sigma = 0.01;
  const LinearSystem sys =
      assemble_neumann(pb, d.mesh, d.bg, d.bdry, d.spaceV, d.spaceZ, params);
  const auto A = sys.compressed();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.n);
  for (int i = 0; i < d.spaceV.n_dofs; ++i) x[i] = 1.0;
  const Eigen::VectorXd Ax = A * x;
  // all rows except the appended constraint row annihilate (u=1, y=0)
  double worst = 0.0;
  for (int i = 0; i + 1 < sys.n; ++i) worst = std::max(worst, std::abs(Ax[i]));
  CHECK(worst < 1e-12 * test::max_abs(A));
}

TEST_CASE("neumann system on the flower solves to small residual") {
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  const test::Discretization d = test::discretize(pb, 32);
  SchemeParams params;
  params.gamma_div = 1.0;
  params.gamma_1 = 10.0;
  params.sigma = 0.01;
  const LinearSystem sys =
      assemble_neumann(pb, d.mesh, d.bg, d.bdry, d.spaceV, d.spaceZ, params);
  const SolveReport report = solve_direct(sys);
  CHECK(report.residual_norm < 1e-10);
}

TEST_CASE("robin patch test and relation to the neumann matrix") {
  const double kappa = 1.0;
  const LevelSetProblem pb =
      test::linear_patch_problem(disk_problem(0.25), 1.0, 2.0, 3.0, kappa);
  const test::Discretization d = test::discretize(pb, 16);
  SchemeParams params;
  params.gamma_div = 1.0;
  params.gamma_1 = 10.0;
  params.sigma = 0.01;
  params.kappa = kappa;

  const LinearSystem robin =
      assemble_robin(pb, d.mesh, d.bg, d.bdry, d.spaceV, d.spaceZ, params);
  REQUIRE(robin.constraint_rows == 0);
  REQUIRE(robin.n == d.spaceV.n_dofs + d.spaceZ.n_dofs);
  const auto u_h = solve_to_vector(robin);
  CHECK(max_nodal_error(u_h, d, pb.exact_u) < 1e-9);

  // Robin minus Neumann (without its constraint) is the boundary mass scaled
  // by 1/kappa; check with a large kappa as the Neumann limit
  for (double kap : {1.0, 1e8}) {
    SchemeParams pk = params;
    pk.kappa = kap;
    const auto robin_k =
        assemble_robin(pb, d.mesh, d.bg, d.bdry, d.spaceV, d.spaceZ, pk).compressed();
    const LinearSystem neumann_sys =
        assemble_neumann(pb, d.mesh, d.bg, d.bdry, d.spaceV, d.spaceZ, pk);
    // strip the constraint row/column
    LinearSystem neumann_block(robin.n);
    for (const auto& t : neumann_sys.triplets)
      if (t.row() < robin.n && t.col() < robin.n)
        neumann_block.add(t.row(), t.col(), t.value());
    // boundary mass on the scalar space
    LinearSystem bmass(robin.n);
    for (const auto& seg : d.bdry.segments) {
      const auto& dofs = d.spaceV.cell_dofs[seg.parent];
      const QuadratureRule rule = segment_rule(seg.p0, seg.p1, 2);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto lambda = barycentric(d.mesh, d.bg, seg.parent, rule.points[q]);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            bmass.add(dofs[i], dofs[j], rule.weights[q] * lambda[i] * lambda[j] / kap);
      }
    }
    const auto diff =
        (robin_k - neumann_block.compressed() - bmass.compressed()).eval();
    CHECK(test::max_abs(diff) < 1e-12 * test::max_abs(robin_k));
  }

  SchemeParams bad = params;
  bad.kappa = 0.0;
  CHECK_THROWS_AS(assemble_robin(pb, d.mesh, d.bg, d.bdry, d.spaceV, d.spaceZ, bad),
                  std::invalid_argument);
  SchemeParams bad1 = params;
  bad1.gamma_1 = 0.0;
  CHECK_THROWS_AS(assemble_neumann(pb, d.mesh, d.bg, d.bdry, d.spaceV, d.spaceZ, bad1),
                  std::invalid_argument);
}

TEST_CASE("cutfem consistency: divergence theorem on clipped cells") {
  // for a globally linear u the combination
  //   sum_T [ int_{T cap Omega} grad u . grad v - int_{Gamma cap T} (du/dn) v ]
  // vanishes for every P1 test function (exact quadrature, f = 0)
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  const test::Discretization d = test::discretize(pb, 16);
  const Vec2 grad_u{2.0, 3.0};

  std::vector<double> residual(d.spaceV.n_dofs, 0.0);
  for (std::size_t c = 0; c < d.mesh.cells.size(); ++c) {
    const std::vector<Vec2> poly = clip_cell_to_domain(static_cast<int>(c), d.mesh, d.bg);
    const double area = polygon_area(poly);
    for (int i = 0; i < 3; ++i)
      residual[d.spaceV.cell_dofs[c][i]] += area * dot(grad_u, d.spaceV.cell_grads[c][i]);
  }
  for (const auto& seg : d.bdry.segments) {
    const double dn = dot(grad_u, seg.normal);
    const QuadratureRule rule = segment_rule(seg.p0, seg.p1, 2);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto lambda = barycentric(d.mesh, d.bg, seg.parent, rule.points[q]);
      for (int i = 0; i < 3; ++i)
        residual[d.spaceV.cell_dofs[seg.parent][i]] -= rule.weights[q] * dn * lambda[i];
    }
  }
  double worst = 0.0;
  for (double r : residual) worst = std::max(worst, std::abs(r));
  CHECK(worst < 1e-12);
}

TEST_CASE("cutfem variants: multiplier count and symmetry") {
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  const test::Discretization d = test::discretize(pb, 16);
  SchemeParams lag;
  lag.sigma = 0.01;
  const LinearSystem lagrange = assemble_cutfem(pb, d.mesh, d.bg, d.bdry, d.spaceV,
                                                CutFemVariant::LagrangeP0, lag);
  CHECK(lagrange.n == d.spaceV.n_dofs + d.mesh.n_cut());

  SchemeParams sym;
  sym.gamma = 5.0;
  sym.sigma = 0.1;
  const auto A =
      assemble_cutfem(pb, d.mesh, d.bg, d.bdry, d.spaceV, CutFemVariant::NitscheSym, sym)
          .compressed();
  const auto asym = (A - Eigen::SparseMatrix<double>(A.transpose())).eval();
  CHECK(test::max_abs(asym) < 1e-12 * test::max_abs(A));

  // all four variants produce solvable systems on the flower
  for (CutFemVariant variant : {CutFemVariant::LagrangeP0, CutFemVariant::NitscheSym,
                                CutFemVariant::NitscheAsym, CutFemVariant::Neumann}) {
    SchemeParams p;
    p.gamma = (variant == CutFemVariant::NitscheSym) ? 5.0 : 1.0;
    p.sigma = (variant == CutFemVariant::NitscheSym) ? 0.1 : 0.01;
    const LinearSystem sys = assemble_cutfem(pb, d.mesh, d.bg, d.bdry, d.spaceV, variant, p);
    const SolveReport report = solve_direct(sys);
    CHECK(report.residual_norm < 1e-9);
  }
}

TEST_CASE("discrete integration by parts on the boundary strip") {
  for (int n : {16, 32}) {
    const test::Discretization d = test::discretize(flower_problem(0.47, 0.0), n);
    std::mt19937_64 rng(100 + n);
    for (int trial = 0; trial < 10; ++trial) {
      const auto v = test::random_vector(d.spaceV.n_dofs, rng);
      const auto [lhs, rhs] = test::ibp_identity_sides(d, v);
      const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
      CHECK(std::abs(lhs - rhs) / scale < 1e-11);
    }
  }
}

TEST_CASE("dirichlet assembly rejects an empty boundary") {
  const LevelSetProblem pb = flower_problem(0.47, 0.0);
  const test::Discretization d = test::discretize(pb, 16);
  BoundaryDiscretization empty;
  CHECK_THROWS_AS(assemble_dirichlet(pb, d.mesh, d.bg, empty, d.spaceV, SchemeParams{}),
                  std::invalid_argument);
}
