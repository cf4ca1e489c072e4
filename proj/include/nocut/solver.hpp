#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>
#include <random>
#include <utility>

#include "nocut/assembly.hpp"
#include "nocut/errors.hpp"

namespace nocut {

struct SolveReport {
  Eigen::VectorXd solution;
  double residual_norm = 0.0;  // ||Ax - b||_2 / ||b||_2 (absolute if b = 0)
  double factor_time = 0.0;    // seconds
  double solve_time = 0.0;     // seconds
};

/// Sparse LU with partial pivoting (the schemes produce nonsymmetric systems).
inline SolveReport solve_direct(const LinearSystem& sys) {
  using Clock = std::chrono::steady_clock;
  const Eigen::SparseMatrix<double> A = sys.compressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  const auto t0 = Clock::now();
  lu.analyzePattern(A);
  lu.factorize(A);
  const auto t1 = Clock::now();
  if (lu.info() != Eigen::Success)
    throw SingularSystemError("solve_direct: " + lu.lastErrorMessage());

  SolveReport report;
  report.solution = lu.solve(sys.rhs);
  const auto t2 = Clock::now();
  if (lu.info() != Eigen::Success)
    throw SingularSystemError("solve_direct: back substitution failed");

  const double bnorm = sys.rhs.norm();
  const double rnorm = (A * report.solution - sys.rhs).norm();
  report.residual_norm = (bnorm > 0.0) ? rnorm / bnorm : rnorm;
  report.factor_time = std::chrono::duration<double>(t1 - t0).count();
  report.solve_time = std::chrono::duration<double>(t2 - t1).count();
  return report;
}

/// Best-effort extreme eigenvalue estimates (by magnitude) of the symmetric
/// part (A + A^T)/2, via power and inverse-power iteration. Diagnostics only.
inline std::pair<double, double> estimate_extreme_ritz(const LinearSystem& sys, int iterations,
                                                       unsigned seed = 0x5eed) {
  if (iterations < 10) throw std::invalid_argument("estimate_extreme_ritz: iterations >= 10");
  const Eigen::SparseMatrix<double> A = sys.compressed();
  Eigen::SparseMatrix<double> S = 0.5 * (A + Eigen::SparseMatrix<double>(A.transpose()));
  S.makeCompressed();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd v(S.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = unit(rng);
  v.normalize();

  double lambda_max = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = S * v;
    const double n = w.norm();
    if (n == 0.0) break;
    v = w / n;
    lambda_max = v.dot(S * v);
  }

  double lambda_min = lambda_max;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(S);
  lu.factorize(S);
  if (lu.info() == Eigen::Success) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = unit(rng);
    v.normalize();
    for (int it = 0; it < iterations; ++it) {
      Eigen::VectorXd w = lu.solve(v);
      const double n = w.norm();
      if (n == 0.0) break;
      v = w / n;
      lambda_min = v.dot(S * v);
    }
  } else {
    lambda_min = 0.0;  // singular symmetric part
  }
  return {lambda_min, lambda_max};
}

}  // namespace nocut
