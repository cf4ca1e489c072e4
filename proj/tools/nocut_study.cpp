// Study harness: reproduces the convergence, rotation-robustness and
// parameter-sweep experiments for the unfitted schemes and their CutFEM
// baselines, emitting CSV tables and SVG plots.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "nocut/config.hpp"
#include "nocut/report.hpp"
#include "nocut/study.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string scheme, problem, n, theta0, graddiv_scaling, out, compare_with;
  double gamma = 0, sigma = 0, gamma_div = 0, gamma1 = 0, kappa = 0, R = 0, radius = 0;
  int threads = 0, seed = 0, angles = 0;
  std::string dump_mesh, dump_cut, dump_matrix;
  bool ritz = false;
};

void add_common_flags(CLI::App* app, CliOptions& opt) {
  app->add_option("--config", opt.config_path, "config file (key = value, [section] per study)");
  app->add_option("--scheme", opt.scheme,
                  "dirichlet|neumann|robin|cutfem_lagrange|cutfem_sym|cutfem_asym|cutfem_neumann");
  app->add_option("--problem", opt.problem, "flower|disk");
  app->add_option("--n", opt.n, "comma-separated mesh levels");
  app->add_option("--theta0", opt.theta0, "comma-separated rotation angles");
  app->add_option("--gamma", opt.gamma, "Nitsche penalty");
  app->add_option("--sigma", opt.sigma, "ghost penalty");
  app->add_option("--gamma-div", opt.gamma_div, "grad-div coefficient");
  app->add_option("--gamma1", opt.gamma1, "flux-matching coefficient");
  app->add_option("--kappa", opt.kappa, "Robin coefficient");
  app->add_option("--graddiv-scaling", opt.graddiv_scaling, "const|h2");
  app->add_option("--R", opt.R, "flower size parameter");
  app->add_option("--radius", opt.radius, "disk radius");
  app->add_option("--out", opt.out, "output directory");
  app->add_option("--threads", opt.threads, "worker threads across cases");
  app->add_option("--seed", opt.seed, "seed for randomized diagnostics");
  app->add_option("--angles", opt.angles, "rotation sweep grid size (default 36)");
  app->add_option("--compare-with", opt.compare_with, "CutFEM variant for `compare`");
}

nocut::StudyConfig build_config(const CLI::App* app, const CliOptions& opt,
                                const std::string& section) {
  nocut::StudyConfig config;
  if (!opt.config_path.empty())
    nocut::apply_config(config, nocut::read_config_file(opt.config_path), section);

  const auto passed = [&](const std::string& flag) { return app->count(flag) > 0; };
  if (passed("--scheme")) config.scheme = nocut::parse_scheme(opt.scheme);
  if (passed("--problem")) config.problem = opt.problem;
  if (passed("--n")) config.levels = nocut::parse_ints(opt.n);
  if (passed("--theta0")) config.theta0_list = nocut::parse_doubles(opt.theta0);
  if (passed("--gamma")) config.gamma_list = {opt.gamma};
  if (passed("--sigma")) config.sigma_list = {opt.sigma};
  if (passed("--gamma-div")) config.gamma_div_list = {opt.gamma_div};
  if (passed("--gamma1")) config.gamma1_list = {opt.gamma1};
  if (passed("--kappa")) config.params.kappa = opt.kappa;
  if (passed("--graddiv-scaling"))
    config.params.graddiv_scaling = (opt.graddiv_scaling == "h2")
                                        ? nocut::GradDivScaling::HSquared
                                        : nocut::GradDivScaling::Constant;
  if (passed("--R")) config.R = opt.R;
  if (passed("--radius")) config.radius = opt.radius;
  if (passed("--out")) config.out_dir = opt.out;
  if (passed("--threads")) config.threads = opt.threads;
  if (passed("--seed")) config.seed = static_cast<unsigned>(opt.seed);
  if (passed("--angles")) config.angles = opt.angles;
  if (passed("--compare-with")) config.compare_with = nocut::parse_scheme(opt.compare_with);
  nocut::finalize_param_lists(config);
  return config;
}

int emit_and_report(const nocut::StudyReport& report, const nocut::StudyConfig& config) {
  const auto files = nocut::emit_outputs(report, config.out_dir);
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  for (const auto& s : report.slopes)
    if (!s.degenerate)
      std::cout << s.scheme << " theta0=" << s.theta0 << " " << s.norm << " slope " << s.slope
                << "\n";
  for (const auto& r : report.ratios)
    std::cout << r.scheme << " n=" << r.n << " " << r.norm << " max/min " << r.ratio << "\n";
  if (report.any_failed()) {
    for (const auto& row : report.rows)
      if (!row.ok)
        std::cerr << "failed: " << row.scheme << " n=" << row.n << " theta0=" << row.theta0
                  << ": " << row.message << "\n";
    return 2;
  }
  return 0;
}

int run_solve(const nocut::StudyConfig& config, const CliOptions& opt) {
  nocut::CaseSpec spec;
  spec.scheme = config.scheme;
  spec.problem = config.problem;
  spec.R = config.R;
  spec.radius = config.radius;
  spec.n = config.levels.front();
  spec.theta0 = config.theta0_list.empty() ? 0.0 : config.theta0_list.front();
  spec.params = config.params;

  if (!opt.dump_mesh.empty() || !opt.dump_cut.empty() || !opt.dump_matrix.empty() || opt.ritz) {
    const nocut::LevelSetProblem problem =
        nocut::make_problem(spec.problem, spec.R, spec.radius, spec.theta0, spec.params.kappa);
    const nocut::BackgroundMesh bg = nocut::build_crisscross(spec.n);
    const nocut::ActiveMesh mesh = nocut::classify_and_extract(bg, problem);
    const nocut::BoundaryDiscretization bdry = nocut::extract_boundary_segments(mesh, bg);
    if (!opt.dump_mesh.empty()) {
      std::ofstream os(opt.dump_mesh);
      nocut::write_mesh(os, bg);
    }
    if (!opt.dump_cut.empty()) {
      std::ofstream os(opt.dump_cut);
      nocut::write_segments(os, bdry);
    }
    if (!opt.dump_matrix.empty() || opt.ritz) {
      const nocut::ScalarSpaceP1 spaceV = nocut::build_scalar_space(mesh, bg);
      nocut::LinearSystem sys;
      if (nocut::scheme_has_flux(spec.scheme)) {
        const nocut::VectorSpaceZ spaceZ = nocut::build_vector_space(mesh, bg);
        sys = (spec.scheme == nocut::Scheme::Neumann)
                  ? nocut::assemble_neumann(problem, mesh, bg, bdry, spaceV, spaceZ, spec.params)
                  : nocut::assemble_robin(problem, mesh, bg, bdry, spaceV, spaceZ, spec.params);
      } else if (spec.scheme == nocut::Scheme::Dirichlet) {
        sys = nocut::assemble_dirichlet(problem, mesh, bg, bdry, spaceV, spec.params);
      } else {
        sys = nocut::assemble_cutfem(problem, mesh, bg, bdry, spaceV,
                                     nocut::detail::cutfem_variant(spec.scheme), spec.params);
      }
      if (!opt.dump_matrix.empty()) {
        std::ofstream os(opt.dump_matrix);
        nocut::write_matrix_coo(os, sys);
      }
      if (opt.ritz) {
        const auto [lo, hi] = nocut::estimate_extreme_ritz(sys, 50, config.seed + 1);
        std::cout << "ritz symmetric-part estimates: min " << lo << " max " << hi << "\n";
      }
    }
  }

  const nocut::StudyRow row = nocut::run_case(spec);
  std::cout << nocut::kStudyCsvHeader << "\r\n";
  nocut::write_study_row(std::cout, row);
  return row.ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unfitted finite element study harness"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* solve = app.add_subcommand("solve", "run a single case and print its row");
  CLI::App* conv = app.add_subcommand("convergence", "mesh refinement study");
  CLI::App* rotate = app.add_subcommand("rotate-sweep", "rotation robustness sweep");
  CLI::App* params = app.add_subcommand("param-sweep", "stabilization parameter sweep");
  CLI::App* compare = app.add_subcommand("compare", "scheme vs CutFEM on the same sweep");
  for (CLI::App* sub : {solve, conv, rotate, params, compare}) add_common_flags(sub, opt);
  solve->add_option("--dump-mesh", opt.dump_mesh, "write background mesh (v/t lines)");
  solve->add_option("--dump-cut", opt.dump_cut, "write boundary segments (s lines)");
  solve->add_option("--dump-matrix", opt.dump_matrix, "write assembled matrix (i j value)");
  solve->add_flag("--ritz", opt.ritz, "print extreme Ritz estimates of the symmetric part");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return run_solve(build_config(solve, opt, "solve"), opt);
    if (conv->parsed()) {
      const auto config = build_config(conv, opt, "convergence");
      return emit_and_report(nocut::run_convergence(config), config);
    }
    if (rotate->parsed()) {
      const auto config = build_config(rotate, opt, "rotate-sweep");
      return emit_and_report(nocut::run_rotation_sweep(config), config);
    }
    if (params->parsed()) {
      const auto config = build_config(params, opt, "param-sweep");
      return emit_and_report(nocut::run_param_sweep(config), config);
    }
    const auto config = build_config(compare, opt, "compare");
    return emit_and_report(nocut::run_compare(config), config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
