#include "fastreact/commands.hpp"

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>

#include "fastreact/emit.hpp"
#include "fastreact/errors.hpp"
#include "fastreact/galerkin.hpp"
#include "fastreact/integrator.hpp"
#include "fastreact/linear_manifold.hpp"
#include "fastreact/rates.hpp"
#include "fastreact/reduction.hpp"

namespace fastreact {

namespace {

namespace fs = std::filesystem;

struct Outputs {
  fs::path dir;
  const ExperimentConfig& cfg;

  fs::path path(const std::string& name) const { return dir / name; }

  std::ofstream open(const std::string& name) const {
    fs::create_directories(dir);
    std::ofstream out(path(name), std::ios::binary);
    if (!out) throw ConfigError("--out: cannot write '" + path(name).string() + "'");
    return out;
  }

  void csv(const std::vector<Series>& cols) const {
    auto out = open(cfg.csv);
    emit_csv(cols, out);
  }

  void svg(const std::vector<Series>& cols, const ChartSpec& spec) const {
    if (cfg.svg.empty()) return;
    auto out = open(cfg.svg);
    emit_svg(cols, spec, out);
  }

  void meta(const std::vector<std::pair<std::string, std::string>>& extra = {}) const {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "spec_version" << YAML::Value << cfg.spec_version;
    e << YAML::Key << "command" << YAML::Value << to_string(cfg.command);
    if (cfg.seed) {
      e << YAML::Key << "seed" << YAML::Value << *cfg.seed;
    } else {
      e << YAML::Key << "seed" << YAML::Value << YAML::Null;
    }
    e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "kind" << YAML::Value << std::string(to_string(cfg.model.kind));
    for (auto [k, v] : std::initializer_list<std::pair<const char*, double>>{
             {"d", cfg.model.d}, {"delta", cfg.model.delta}, {"eps", cfg.model.eps},
             {"kappa", cfg.model.kappa}, {"a", cfg.model.a}, {"b", cfg.model.b}, {"c", cfg.model.c},
             {"L", cfg.model.L}}) {
      e << YAML::Key << k << YAML::Value << format_double(v);
    }
    e << YAML::EndMap;
    e << YAML::Key << "N" << YAML::Value << cfg.N;
    for (const auto& [k, v] : extra) e << YAML::Key << k << YAML::Value << v;
    e << YAML::EndMap;
    auto out = open(cfg.csv + ".meta.yaml");
    out << e.c_str() << '\n';
  }
};

double sample_interval(const ExperimentConfig& cfg) { return cfg.T / static_cast<double>(cfg.samples); }

double fitted_dt(const ExperimentConfig& cfg, const ModelParams& p) {
  const double interval = sample_interval(cfg);
  const double dt0 = cfg.dt ? *cfg.dt : default_dt(p, cfg.T);
  return interval / std::ceil(interval / dt0 - 1e-12);
}

FastSlowState initial_state(const ExperimentConfig& cfg, const ModelParams& p, const Grid& grid) {
  const SpectralField v = cfg.initial.v.on(grid);
  switch (cfg.initial.u_mode) {
    case UInit::well_prepared: return {critical_map(v, p), v, 0.0};
    case UInit::perturbed: return {perturbed_initial_u(p, v, cfg.initial.eps_in), v, 0.0};
    case UInit::given: break;
  }
  return {cfg.initial.u.on(grid), v, 0.0};
}

std::vector<Series> trajectory_columns(const Trajectory& traj) {
  std::vector<Series> cols = {{"t", {}},     {"u_L2", {}},    {"v_L2", {}},    {"u_H2", {}},
                              {"v_H2", {}},  {"v_mode0", {}}, {"linf_u1", {}}, {"linf_u2", {}}};
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    cols[0].values.push_back(s.t);
    cols[1].values.push_back(sobolev_norm(s.u, 0));
    cols[2].values.push_back(sobolev_norm(s.v, 0));
    cols[3].values.push_back(sobolev_norm(s.u, 2));
    cols[4].values.push_back(sobolev_norm(s.v, 2));
    cols[5].values.push_back(s.v[0]);
    cols[6].values.push_back(traj.linf_u1[i]);
    cols[7].values.push_back(traj.linf_u2[i]);
  }
  return cols;
}

void cmd_simulate(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log, bool limit) {
  const ModelParams& p = cfg.model;
  const Grid grid(p.L, cfg.N);
  const FastSlowState s0 = initial_state(cfg, p, grid);
  const double dt = fitted_dt(cfg, p);
  const Trajectory traj = limit ? solve_limit_system(s0.v, p, cfg.T, dt, sample_interval(cfg))
                                : simulate(s0, p, cfg.T, dt, sample_interval(cfg));
  const auto cols = trajectory_columns(traj);
  out.csv(cols);
  out.svg({cols[0], cols[1], cols[2]}, {limit ? "limit system" : "fast-slow system", false, false});
  out.meta({{"dt", format_double(dt)}});
  log << (limit ? "limit" : "simulate") << ": " << traj.samples.size() << " samples, dt = " << dt
      << '\n';
}

int cmd_converge(const ExperimentConfig& cfg, const Outputs& out, const RunOptions& opt,
                 std::ostream& log) {
  ConvergenceConfig cc;
  cc.base = cfg.model;
  cc.N = cfg.N;
  cc.T = cfg.T;
  cc.sample_intervals = cfg.samples;
  cc.dt = cfg.dt;
  cc.eps_list = cfg.eps_list;
  cc.delta_exponent = cfg.delta_exponent;
  cc.delta_fixed = cfg.delta_fixed;
  cc.v_in = cfg.initial.v.as_function(cfg.model.L);
  switch (cfg.initial.u_mode) {
    case UInit::well_prepared: cc.preparation = Preparation::well_prepared; break;
    case UInit::perturbed: cc.preparation = Preparation::perturbed; break;
    case UInit::given:
      cc.preparation = Preparation::given;
      cc.u_in = cfg.initial.u.as_function(cfg.model.L);
      break;
  }
  cc.eps_in_target = cfg.initial.eps_in;
  cc.threads = opt.threads ? *opt.threads : cfg.threads;
  cc.timing = cfg.timing;
  const ConvergenceReport rep = convergence_study(cc);

  const std::vector<std::string> header = {"eps",    "delta",  "eps_in",
                                           "E_LinfL2", "E_L2H1", "E_LinfH2",
                                           "E_LinfL2_postlayer", "wall_s"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<std::string>> rows;
  std::string failures;
  for (const auto& r : rep.rows) {
    const bool ok = r.ok;
    rows.push_back({format_double(r.eps), format_double(r.delta), format_double(ok ? r.eps_in : nan),
                    format_double(ok ? r.errors.LinfL2 : nan), format_double(ok ? r.errors.L2H1 : nan),
                    format_double(ok ? r.errors.LinfH2 : nan),
                    format_double(ok ? r.errors.LinfL2_post : nan), format_double(r.wall_s)});
    if (!ok) failures += "eps = " + format_double(r.eps) + ": " + r.failure + "\n";
  }
  auto footer = [&](const char* name, double v) {
    std::vector<std::string> row(header.size());
    row[0] = name;
    row[1] = format_double(v);
    rows.push_back(row);
  };
  footer("order_LinfL2", rep.order_LinfL2.order);
  footer("order_L2H1", rep.order_L2H1.order);
  footer("order_LinfH2", rep.order_LinfH2.order);
  footer("fit_residual", rep.fit_residual);
  {
    auto f = out.open(cfg.csv);
    emit_csv_rows(header, rows, f);
  }
  std::vector<Series> chart = {{"eps", {}}, {"E_LinfL2", {}}, {"E_L2H1", {}}, {"E_LinfH2", {}}};
  for (const auto& r : rep.rows) {
    if (!r.ok) continue;
    chart[0].values.push_back(r.eps);
    chart[1].values.push_back(r.errors.LinfL2);
    chart[2].values.push_back(r.errors.L2H1);
    chart[3].values.push_back(r.errors.LinfH2);
  }
  out.svg(chart, {"error against eps", true, true});
  out.meta({{"plateau", rep.plateau ? "true" : "false"},
            {"order_LinfH2_postlayer", format_double(rep.order_LinfH2_post.order)}});
  if (!failures.empty()) {
    auto f = out.open(cfg.csv + ".failures.txt");
    f << failures;
  }
  log << "converge: orders " << rep.order_LinfL2.order << " (LinfL2), " << rep.order_L2H1.order
      << " (L2H1), " << rep.order_LinfH2.order << " (LinfH2)"
      << (rep.plateau ? ", plateau reached" : "") << '\n';
  return failures.empty() ? kExitOk : kExitDivergence;
}

void cmd_manifold_linear(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log) {
  std::vector<std::size_t> modes = cfg.modes;
  if (modes.empty()) {
    modes.resize(8);
    std::iota(modes.begin(), modes.end(), std::size_t{1});
  }
  const auto rep = invariance_and_distance(cfg.model, modes, cfg.T);
  std::vector<Series> cols = {{"k", {}},
                              {"mu", {}},
                              {"Omega", {}},
                              {"w_plus", {}},
                              {"w_minus", {}},
                              {"slow_rate", {}},
                              {"fast_rate", {}},
                              {"slope", {}},
                              {"asymptotic_slow_rate", {}},
                              {"regime_ok", {}},
                              {"invariance_defect", {}},
                              {"slope_distance", {}},
                              {"distance_bound", {}},
                              {"fitted_attraction_rate", {}},
                              {"attraction_rel_error", {}}};
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const ModeSpectrum s = mode_spectrum(cfg.model, modes[i]);
    const auto& r = rep[i];
    const double vals[] = {static_cast<double>(modes[i]), s.mu, s.Omega, s.w_plus, s.w_minus,
                           s.slow_rate, s.fast_rate, s.slope, s.asymptotic_slow_rate,
                           s.regime_ok ? 1.0 : 0.0, r.invariance_defect, r.slope_distance,
                           r.distance_bound, r.fitted_attraction_rate, r.attraction_rel_error};
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c].values.push_back(vals[c]);
  }
  out.csv(cols);
  out.svg({cols[0], cols[11], cols[12]}, {"distance of the slow slope from 1/2", false, true});
  out.meta();
  log << "manifold-linear: " << modes.size() << " modes\n";
}

std::vector<std::vector<double>> slow_samples(const ExperimentConfig& cfg, std::size_t k0) {
  std::vector<std::vector<double>> samples = cfg.slow_samples;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != k0) {
      throw ConfigError("study.slow_samples[" + std::to_string(i) + "]: expected k0 = " +
                        std::to_string(k0) + " coefficients");
    }
  }
  if (cfg.random_samples > 0) {
    std::mt19937_64 rng(*cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t i = 0; i < cfg.random_samples; ++i) {
      std::vector<double> xi(k0);
      for (auto& x : xi) x = cfg.sample_amplitude * unit(rng);
      if (cfg.model.kind == ModelKind::nonlinear) xi[0] = std::abs(xi[0]) + 2.0 * cfg.sample_amplitude;
      samples.push_back(std::move(xi));
    }
  }
  return samples;
}

void cmd_manifold_galerkin(const ExperimentConfig& cfg, const Outputs& out, const RunOptions& opt,
                           std::ostream& log) {
  const ModelParams& p = cfg.model;
  const SplittingParams split = splitting_parameters(cfg.zeta_inv, p);
  LPOptions lp;
  lp.T_back = cfg.T_back;
  lp.tol = cfg.tol;
  lp.n_t = cfg.n_t;
  lp.fast_band = cfg.fast_band;
  lp.max_iter = cfg.max_iter;
  lp.grid_nodes = cfg.N;
  lp.enforce_gap = cfg.enforce_gap;
  lp.lips = cfg.lipschitz;
  const std::size_t k0 = static_cast<std::size_t>(split.k0);
  const auto samples = slow_samples(cfg, k0);
  const ManifoldGraph g = manifold_graph(samples, p, split, lp, opt.threads ? *opt.threads : cfg.threads);
  const std::size_t KG = galerkin_size(split, lp);

  std::vector<Series> cols;
  cols.push_back({"sample", {}});
  for (std::size_t k = 0; k < k0; ++k) cols.push_back({"xi_" + std::to_string(k), {}});
  for (std::size_t k = 0; k < KG; ++k) cols.push_back({"h_u_" + std::to_string(k), {}});
  for (std::size_t k = k0; k < KG; ++k) cols.push_back({"h_v_" + std::to_string(k), {}});
  for (const char* name : {"iterations", "contraction", "final_change", "T_back", "eta",
                           "gap_total", "gap_passes"}) {
    cols.push_back({name, {}});
  }
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const auto& pt = g.points[i];
    std::size_t c = 0;
    cols[c++].values.push_back(static_cast<double>(i));
    for (double x : pt.v_slow) cols[c++].values.push_back(x);
    for (double x : pt.h_u) cols[c++].values.push_back(x);
    for (double x : pt.h_vF) cols[c++].values.push_back(x);
    for (double x : {static_cast<double>(pt.iterations), pt.contraction, pt.final_change, pt.T_back,
                     pt.eta, pt.gap.total, pt.gap.passes ? 1.0 : 0.0}) {
      cols[c++].values.push_back(x);
    }
  }
  out.csv(cols);
  out.meta({{"k0", std::to_string(split.k0)},
            {"galerkin_modes", std::to_string(KG)},
            {"lipschitz_ratio", format_double(g.lipschitz_ratio)}});
  log << "manifold-galerkin: " << g.points.size() << " graph points, k0 = " << split.k0
      << ", K_G = " << KG << '\n';
}

void cmd_gap_check(const ExperimentConfig& cfg, const Outputs& out, const RunOptions& opt,
                   std::ostream& log) {
  std::vector<double> eps_list = cfg.eps_list;
  if (eps_list.empty()) eps_list = {cfg.model.eps};
  const std::vector<std::string> header = {"eps", "zeta_inv", "k0",    "N_S",   "N_F",        "gap",
                                           "eta", "term1",    "term2", "param_ineq", "passes"};
  std::vector<std::vector<std::string>> rows;
  for (double eps : eps_list) {
    ModelParams p = cfg.model;
    p.eps = eps;
    if (cfg.delta_fixed) p.delta = *cfg.delta_fixed;
    const SplittingParams split = splitting_parameters(cfg.zeta_inv, p);
    LipschitzConstants lips;
    if (cfg.lipschitz) {
      lips = *cfg.lipschitz;
    } else {
      lips = lp_lipschitz(p, cfg.M ? *cfg.M : 1.0, cfg.seed.value_or(0));
    }
    const ModelParams eff = cfg.lipschitz ? p : lp_effective_params(p);
    const GapReport r = validate_assumptions(eff, split, lips);
    rows.push_back({format_double(eps), format_double(split.zeta_inv), std::to_string(split.k0),
                    format_double(split.N_S), format_double(split.N_F), format_double(split.gap),
                    format_double(split.eta), format_double(r.term1), format_double(r.term2),
                    format_double(r.parameter_inequality), r.passes ? "true" : "false"});
    if (!opt.quiet) {
      log << "gap-check eps = " << eps << ": total = " << r.total << (r.passes ? " (passes)" : " (fails)")
          << "; N_S - N_F = " << split.gap << " = k0 - 2 by the formulas, some statements quote k0\n";
    }
  }
  auto f = out.open(cfg.csv);
  emit_csv_rows(header, rows, f);
  out.meta();
}

void cmd_initial_layer(const ExperimentConfig& cfg, const Outputs& out, std::ostream& log) {
  const ModelParams& p = cfg.model;
  const Grid grid(p.L, cfg.N);
  const FastSlowState s0 = initial_state(cfg, p, grid);
  double eps_in = 0, ratio = std::numeric_limits<double>::quiet_NaN();
  if (p.kind == ModelKind::nonlinear) {
    const InitialLayer layer = initial_layer(s0.u, s0.v, p.kappa);
    eps_in = layer.eps_in;
    if (layer.ratio) ratio = *layer.ratio;
  } else {
    eps_in = layer_residual(p, s0.u, s0.v);
    if (eps_in > 0) ratio = sobolev_norm(s0.u - critical_map(s0.v, p), 2) / eps_in;
  }
  const double M = cfg.M ? *cfg.M : std::max(sobolev_norm(s0.u, 2) + sobolev_norm(s0.v, 2), 1e-12);
  const ConstantsReport c = theoretical_constants(p, M, *cfg.seed);
  std::vector<Series> cols = {
      {"eps_in", {eps_in}},     {"ratio", {ratio}},         {"M", {M}},
      {"C_star", {c.C_star}},   {"C_HS", {c.C_HS}},         {"lambda_1", {c.lambda_1}},
      {"K0", {c.K0}},           {"K1", {c.K1}},             {"K2", {c.K2}},
      {"K_M", {c.K_M}},         {"kappa", {p.kappa}},       {"kappa_bound", {c.kappa_bound}},
      {"kappa_ok", {c.kappa_ok ? 1.0 : 0.0}}};
  out.csv(cols);
  out.meta();
  log << "initial-layer: eps_in = " << eps_in << ", kappa_bound = " << c.kappa_bound
      << (c.kappa_ok ? "" : " (kappa exceeds the admissibility bound)") << '\n';
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log) {
  (void)run_guarded;
  const Outputs out{fs::path(opt.out_dir), cfg};
  switch (cfg.command) {
    case Command::simulate: cmd_simulate(cfg, out, log, false); break;
    case Command::limit: cmd_simulate(cfg, out, log, true); break;
    case Command::converge:
      if (cmd_converge(cfg, out, opt, log) != kExitOk) {
        throw DivergenceError("one or more converge runs failed; see " + cfg.csv + ".failures.txt",
                              std::numeric_limits<double>::quiet_NaN());
      }
      break;
    case Command::manifold_linear: cmd_manifold_linear(cfg, out, log); break;
    case Command::manifold_galerkin: cmd_manifold_galerkin(cfg, out, opt, log); break;
    case Command::gap_check: cmd_gap_check(cfg, out, opt, log); break;
    case Command::initial_layer: cmd_initial_layer(cfg, out, log); break;
  }
}

int run_guarded(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log,
                std::ostream& err) {
  try {
    run_experiment(cfg, opt, log);
    return kExitOk;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const AssumptionError& e) {
    err << "assumption check failed: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const DegenerateSplittingError& e) {
    err << "assumption check failed: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Pseudospectral fast-slow reaction-diffusion laboratory"};
  std::string config_path;
  RunOptions opt;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  app.add_option("--config", config_path, "YAML experiment file")->required();
  app.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Seed for randomized steps (overrides the file)");
  app.add_option("--threads", threads, "Worker threads for independent runs");
  app.add_flag("--quiet", opt.quiet, "Suppress progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (threads > 0) opt.threads = threads;
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  std::ostream null_stream(nullptr);
  return run_guarded(cfg, opt, opt.quiet ? null_stream : std::cout, std::cerr);
}

}  // namespace fastreact
