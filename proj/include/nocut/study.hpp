#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "nocut/assembly.hpp"
#include "nocut/postprocess.hpp"
#include "nocut/problem.hpp"
#include "nocut/solver.hpp"

namespace nocut {

enum class Scheme {
  Dirichlet,
  Neumann,
  Robin,
  CutfemLagrange,
  CutfemSym,
  CutfemAsym,
  CutfemNeumann,
};

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Dirichlet: return "dirichlet";
    case Scheme::Neumann: return "neumann";
    case Scheme::Robin: return "robin";
    case Scheme::CutfemLagrange: return "cutfem_lagrange";
    case Scheme::CutfemSym: return "cutfem_sym";
    case Scheme::CutfemAsym: return "cutfem_asym";
    case Scheme::CutfemNeumann: return "cutfem_neumann";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::Dirichlet, Scheme::Neumann, Scheme::Robin, Scheme::CutfemLagrange,
                   Scheme::CutfemSym, Scheme::CutfemAsym, Scheme::CutfemNeumann})
    if (name == scheme_name(s)) return s;
  throw std::invalid_argument("unknown scheme: " + name);
}

inline bool scheme_has_flux(Scheme s) { return s == Scheme::Neumann || s == Scheme::Robin; }
inline bool scheme_is_meanzero(Scheme s) {
  return s == Scheme::Neumann || s == Scheme::CutfemNeumann;
}

struct StudyConfig {
  Scheme scheme = Scheme::Dirichlet;
  std::string problem = "flower";
  double R = 0.47;
  double radius = 0.25;
  std::vector<int> levels = {16, 32, 64, 128};
  std::vector<double> theta0_list;  // empty: single angle 0 / default rotation grid
  std::vector<double> gamma_list;
  std::vector<double> sigma_list;
  std::vector<double> gamma_div_list;
  std::vector<double> gamma1_list;
  SchemeParams params;
  Scheme compare_with = Scheme::CutfemAsym;
  std::string out_dir = "out";
  int threads = 1;
  unsigned seed = 0;
  int angles = 36;  // rotation sweep grid size when theta0_list is empty

  void validate_levels() const {
    if (levels.empty()) throw std::invalid_argument("config: no mesh levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i] < 8) throw std::invalid_argument("config: mesh levels must be >= 8");
      if (i > 0 && levels[i] <= levels[i - 1])
        throw std::invalid_argument("config: mesh levels must be strictly increasing");
    }
  }
};

struct StudyRow {
  std::string scheme;
  std::string problem;
  int n = 0;
  double h = 0.0;
  double theta0 = 0.0;
  double gamma = 0.0, sigma = 0.0, gamma_div = 0.0, gamma1 = 0.0, kappa = 0.0;
  std::string graddiv_scaling;
  int dofs = 0;
  int cut_cells = 0;
  ErrorReport err;
  double residual = 0.0;
  double assemble_time = 0.0;
  double solve_time = 0.0;
  bool ok = false;
  std::string message;
  std::string sigma_monotone;  // param sweeps only: "true"/"false", else empty

  auto sort_key() const {
    return std::tie(scheme, n, theta0, gamma, sigma, gamma_div, gamma1, kappa);
  }
};

struct SlopeRow {
  std::string scheme;
  double theta0 = 0.0;
  std::string norm;
  double slope = 0.0;
  bool degenerate = false;  // errors at solver-residual level, slope not meaningful
};

struct RatioRow {
  std::string scheme;
  int n = 0;
  std::string norm;
  double max_err = 0.0;
  double min_err = 0.0;
  double ratio = 0.0;
};

struct StudyReport {
  std::string study;
  std::vector<StudyRow> rows;
  std::vector<SlopeRow> slopes;
  std::vector<RatioRow> ratios;

  bool any_failed() const {
    for (const auto& r : rows)
      if (!r.ok) return true;
    return false;
  }
};

// ---------------------------------------------------------------------------
// Single-case runner
// ---------------------------------------------------------------------------

struct CaseSpec {
  Scheme scheme = Scheme::Dirichlet;
  std::string problem = "flower";
  double R = 0.47;
  double radius = 0.25;
  int n = 16;
  double theta0 = 0.0;
  SchemeParams params;
};

namespace detail {

inline CutFemVariant cutfem_variant(Scheme s) {
  switch (s) {
    case Scheme::CutfemLagrange: return CutFemVariant::LagrangeP0;
    case Scheme::CutfemSym: return CutFemVariant::NitscheSym;
    case Scheme::CutfemAsym: return CutFemVariant::NitscheAsym;
    case Scheme::CutfemNeumann: return CutFemVariant::Neumann;
    default: throw std::logic_error("not a cutfem scheme");
  }
}

inline std::vector<double> interpolate_flux(const VectorField& grad, const VectorSpaceZ& spaceZ,
                                            const BackgroundMesh& bg) {
  std::vector<double> z(spaceZ.n_dofs, 0.0);
  for (std::size_t v = 0; v < spaceZ.base_of_vertex.size(); ++v) {
    const int base = spaceZ.base_of_vertex[v];
    if (base < 0) continue;
    const Vec2 g = grad(bg.vertices[v]);
    z[2 * base] = -g.x;
    z[2 * base + 1] = -g.y;
  }
  return z;
}

}  // namespace detail

/// Runs one (scheme, problem, level, angle, parameters) case. Failures are
/// reported in the row, not thrown.
inline StudyRow run_case(const CaseSpec& spec) {
  StudyRow row;
  row.scheme = scheme_name(spec.scheme);
  row.problem = spec.problem;
  row.n = spec.n;
  row.theta0 = spec.theta0;
  row.gamma = spec.params.gamma;
  row.sigma = spec.params.sigma;
  row.gamma_div = spec.params.gamma_div;
  row.gamma1 = spec.params.gamma_1;
  row.kappa = spec.params.kappa;
  row.graddiv_scaling =
      spec.params.graddiv_scaling == GradDivScaling::HSquared ? "h2" : "const";

  using Clock = std::chrono::steady_clock;
  try {
    const LevelSetProblem problem =
        make_problem(spec.problem, spec.R, spec.radius, spec.theta0, spec.params.kappa);
    const BackgroundMesh bg = build_crisscross(spec.n);
    row.h = bg.h;

    const auto t0 = Clock::now();
    const ActiveMesh mesh = classify_and_extract(bg, problem);
    const BoundaryDiscretization bdry = extract_boundary_segments(mesh, bg);
    const ScalarSpaceP1 spaceV = build_scalar_space(mesh, bg);
    row.cut_cells = mesh.n_cut();

    LinearSystem sys;
    VectorSpaceZ spaceZ;
    if (scheme_has_flux(spec.scheme)) {
      spaceZ = build_vector_space(mesh, bg);
      sys = (spec.scheme == Scheme::Neumann)
                ? assemble_neumann(problem, mesh, bg, bdry, spaceV, spaceZ, spec.params)
                : assemble_robin(problem, mesh, bg, bdry, spaceV, spaceZ, spec.params);
    } else if (spec.scheme == Scheme::Dirichlet) {
      sys = assemble_dirichlet(problem, mesh, bg, bdry, spaceV, spec.params);
    } else {
      sys = assemble_cutfem(problem, mesh, bg, bdry, spaceV,
                            detail::cutfem_variant(spec.scheme), spec.params);
    }
    row.dofs = sys.n;
    const auto t1 = Clock::now();
    row.assemble_time = std::chrono::duration<double>(t1 - t0).count();

    const SolveReport solve = solve_direct(sys);
    row.solve_time = solve.factor_time + solve.solve_time;
    row.residual = solve.residual_norm;
    if (!(solve.residual_norm < 1e-9)) {
      row.message = "residual above 1e-9";
      return row;
    }

    std::vector<double> u_h(solve.solution.data(), solve.solution.data() + spaceV.n_dofs);
    row.err = error_norms(problem.exact_u, problem.exact_grad_u, u_h, mesh, bg, spaceV, bdry);

    // Triple norm of the discrete error (nodal interpolant minus solution).
    std::vector<double> e_u = interpolate_nodal(spaceV, bg, problem.exact_u);
    if (scheme_is_meanzero(spec.scheme)) {
      // compare against the mean-zero shifted interpolant
      const std::vector<double> m = detail::omega_h_masses(mesh, bg, spaceV);
      double mass = 0.0, integral = 0.0;
      for (int i = 0; i < spaceV.n_dofs; ++i) {
        mass += m[i];
        integral += m[i] * e_u[i];
      }
      for (double& v : e_u) v -= integral / mass;
    }
    for (int i = 0; i < spaceV.n_dofs; ++i) e_u[i] -= u_h[i];
    if (scheme_has_flux(spec.scheme)) {
      std::vector<double> e_z = detail::interpolate_flux(problem.exact_grad_u, spaceZ, bg);
      for (int i = 0; i < spaceZ.n_dofs; ++i) e_z[i] -= solve.solution[spaceV.n_dofs + i];
      row.err.triple_norm = triple_norm_neumann(e_u, e_z, mesh, bg, spaceV, spaceZ);
    } else {
      row.err.triple_norm = triple_norm_dirichlet(e_u, mesh, bg, spaceV, bdry);
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.message = e.what();
  }
  return row;
}

namespace detail {

inline std::vector<StudyRow> run_cases(const std::vector<CaseSpec>& cases, int threads) {
  std::vector<StudyRow> rows(cases.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(cases.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < cases.size(); ++i) rows[i] = run_case(cases[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) rows[i] = run_case(cases[i]);
      });
    for (auto& t : pool) t.join();
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const StudyRow& a, const StudyRow& b) { return a.sort_key() < b.sort_key(); });
  return rows;
}

inline CaseSpec base_case(const StudyConfig& config) {
  CaseSpec spec;
  spec.scheme = config.scheme;
  spec.problem = config.problem;
  spec.R = config.R;
  spec.radius = config.radius;
  spec.params = config.params;
  return spec;
}

// Slopes of each norm across mesh levels, one group per (scheme, theta0).
inline void append_slopes(StudyReport& report) {
  std::map<std::pair<std::string, double>, std::vector<const StudyRow*>> groups;
  for (const auto& row : report.rows)
    if (row.ok) groups[{row.scheme, row.theta0}].push_back(&row);
  for (const auto& [key, rows] : groups) {
    if (rows.size() < 3) continue;
    struct NormDef {
      const char* name;
      double ErrorReport::*field;
    };
    for (const NormDef& nd : {NormDef{"l2_rel", &ErrorReport::l2_rel},
                              NormDef{"h1_rel", &ErrorReport::h1_rel},
                              NormDef{"l2_meanfree_rel", &ErrorReport::l2_meanfree_rel}}) {
      SlopeRow slope;
      slope.scheme = key.first;
      slope.theta0 = key.second;
      slope.norm = nd.name;
      std::vector<std::pair<double, double>> pts;
      double max_err = 0.0;
      for (const StudyRow* r : rows) {
        pts.emplace_back(r->h, r->err.*nd.field);
        max_err = std::max(max_err, r->err.*nd.field);
      }
      if (max_err < 1e-10) {
        slope.degenerate = true;  // patch-test-level errors, log fit meaningless
      } else {
        try {
          slope.slope = convergence_slope(pts);
        } catch (const std::invalid_argument&) {
          slope.degenerate = true;
        }
      }
      report.slopes.push_back(slope);
    }
  }
}

// Per-level max/min error ratios across the rotation sweep.
inline void append_ratios(StudyReport& report) {
  struct NormDef {
    const char* name;
    double ErrorReport::*field;
  };
  std::map<std::pair<std::string, int>, std::vector<const StudyRow*>> groups;
  for (const auto& row : report.rows)
    if (row.ok) groups[{row.scheme, row.n}].push_back(&row);
  for (const auto& [key, rows] : groups) {
    for (const NormDef& nd : {NormDef{"l2_rel", &ErrorReport::l2_rel},
                              NormDef{"h1_rel", &ErrorReport::h1_rel}}) {
      RatioRow ratio;
      ratio.scheme = key.first;
      ratio.n = key.second;
      ratio.norm = nd.name;
      ratio.max_err = 0.0;
      ratio.min_err = std::numeric_limits<double>::infinity();
      for (const StudyRow* r : rows) {
        ratio.max_err = std::max(ratio.max_err, r->err.*nd.field);
        ratio.min_err = std::min(ratio.min_err, r->err.*nd.field);
      }
      ratio.ratio = (ratio.min_err > 0.0) ? ratio.max_err / ratio.min_err
                                          : std::numeric_limits<double>::infinity();
      report.ratios.push_back(ratio);
    }
  }
}

}  // namespace detail

/// One solve per mesh level; least-squares convergence slopes per norm.
inline StudyReport run_convergence(const StudyConfig& config) {
  config.validate_levels();
  if (config.levels.size() < 3)
    throw std::invalid_argument("run_convergence: need at least 3 mesh levels");
  const double theta0 = config.theta0_list.empty() ? 0.0 : config.theta0_list.front();

  std::vector<CaseSpec> cases;
  for (int n : config.levels) {
    CaseSpec spec = detail::base_case(config);
    spec.n = n;
    spec.theta0 = theta0;
    cases.push_back(spec);
  }
  StudyReport report;
  report.study = "convergence";
  report.rows = detail::run_cases(cases, config.threads);
  detail::append_slopes(report);
  return report;
}

/// One row per (level, angle); per-level max/min error ratios.
inline StudyReport run_rotation_sweep(const StudyConfig& config) {
  config.validate_levels();
  std::vector<double> angles = config.theta0_list;
  if (angles.empty()) {
    const double span = 2.0 * M_PI / 7.0;
    for (int i = 0; i < config.angles; ++i)
      angles.push_back(config.angles > 1 ? span * i / (config.angles - 1) : 0.0);
  }
  if (angles.size() < 8)
    throw std::invalid_argument("run_rotation_sweep: need at least 8 angles");

  std::vector<CaseSpec> cases;
  for (int n : config.levels)
    for (double theta0 : angles) {
      CaseSpec spec = detail::base_case(config);
      spec.n = n;
      spec.theta0 = theta0;
      cases.push_back(spec);
    }
  StudyReport report;
  report.study = "rotate";
  report.rows = detail::run_cases(cases, config.threads);
  detail::append_ratios(report);
  return report;
}

/// Fixed mesh, one row per parameter-grid point.
inline StudyReport run_param_sweep(const StudyConfig& config) {
  config.validate_levels();
  const int n = config.levels.front();
  const double theta0 = config.theta0_list.empty() ? 0.0 : config.theta0_list.front();
  const auto grid = [](const std::vector<double>& list, double fallback) {
    return list.empty() ? std::vector<double>{fallback} : list;
  };
  const std::vector<double> gammas = grid(config.gamma_list, config.params.gamma);
  const std::vector<double> sigmas = grid(config.sigma_list, config.params.sigma);
  const std::vector<double> gamma_divs = grid(config.gamma_div_list, config.params.gamma_div);
  const std::vector<double> gamma1s = grid(config.gamma1_list, config.params.gamma_1);

  std::vector<CaseSpec> cases;
  for (double gamma : gammas)
    for (double sigma : sigmas)
      for (double gamma_div : gamma_divs)
        for (double gamma1 : gamma1s) {
          CaseSpec spec = detail::base_case(config);
          spec.n = n;
          spec.theta0 = theta0;
          spec.params.gamma = gamma;
          spec.params.sigma = sigma;
          spec.params.gamma_div = gamma_div;
          spec.params.gamma_1 = gamma1;
          cases.push_back(spec);
        }
  if (cases.empty()) throw std::invalid_argument("run_param_sweep: empty parameter grid");

  StudyReport report;
  report.study = "params";
  report.rows = detail::run_cases(cases, config.threads);

  // Monotonicity probe: within each gamma <= 1 group (sorted by sigma), record
  // whether the L2 error is nondecreasing from the previous sigma.
  std::map<std::tuple<std::string, double, double, double>, const StudyRow*> prev;
  for (auto& row : report.rows) {
    if (!row.ok || row.gamma > 1.0) continue;
    const auto key = std::make_tuple(row.scheme, row.gamma, row.gamma_div, row.gamma1);
    const auto it = prev.find(key);
    if (it != prev.end())
      row.sigma_monotone = (row.err.l2_rel >= it->second->err.l2_rel) ? "true" : "false";
    prev[key] = &row;
  }
  return report;
}

/// Runs the configured scheme and a CutFEM variant over the same rotation
/// sweep and joins the rows.
inline StudyReport run_compare(const StudyConfig& config) {
  StudyReport report = run_rotation_sweep(config);
  StudyConfig other = config;
  other.scheme = config.compare_with;
  const StudyReport second = run_rotation_sweep(other);
  report.study = "compare";
  report.rows.insert(report.rows.end(), second.rows.begin(), second.rows.end());
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const StudyRow& a, const StudyRow& b) { return a.sort_key() < b.sort_key(); });
  report.ratios.insert(report.ratios.end(), second.ratios.begin(), second.ratios.end());
  return report;
}

}  // namespace nocut
