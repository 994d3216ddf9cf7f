#include "fastreact/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "fastreact/errors.hpp"

namespace fastreact {

namespace {

struct CommandName {
  Command cmd;
  const char* name;
};

constexpr CommandName kCommands[] = {
    {Command::simulate, "simulate"},
    {Command::limit, "limit"},
    {Command::converge, "converge"},
    {Command::manifold_linear, "manifold-linear"},
    {Command::manifold_galerkin, "manifold-galerkin"},
    {Command::gap_check, "gap-check"},
    {Command::initial_layer, "initial-layer"},
};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& path, std::set<std::string> allowed) {
  if (!node.IsMap()) fail(path, "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

template <class T>
T read(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(path, "cannot read value '" + YAML::Dump(node) + "'");
  }
}

double read_double(const YAML::Node& node, const std::string& path) {
  const double x = read<double>(node, path);
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

std::size_t read_count(const YAML::Node& node, const std::string& path) {
  const long long x = read<long long>(node, path);
  if (x < 0) fail(path, "must be >= 0");
  return static_cast<std::size_t>(x);
}

void maybe(const YAML::Node& parent, const char* key, const std::string& path, double& out) {
  if (parent[key]) out = read_double(parent[key], path + "." + key);
}

FieldSpec parse_field(const YAML::Node& node, const std::string& path) {
  FieldSpec f;
  if (node.IsScalar()) {
    f.mean = read_double(node, path);
    return f;
  }
  check_keys(node, path, {"constant", "mean", "amplitude", "mode", "cosines", "coefficients"});
  if (node["coefficients"]) {
    f.coefficients = read<std::vector<double>>(node["coefficients"], path + ".coefficients");
    if (f.coefficients.empty()) fail(path + ".coefficients", "must not be empty");
    return f;
  }
  if (node["constant"]) f.mean = read_double(node["constant"], path + ".constant");
  if (node["mean"]) f.mean = read_double(node["mean"], path + ".mean");
  if (node["amplitude"]) {
    const double amp = read_double(node["amplitude"], path + ".amplitude");
    const std::size_t mode = node["mode"] ? read_count(node["mode"], path + ".mode") : 1;
    f.cosines.emplace_back(mode, amp);
  }
  if (node["cosines"]) {
    const auto& list = node["cosines"];
    if (!list.IsSequence()) fail(path + ".cosines", "expected a list of [mode, amplitude]");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto pair = read<std::vector<double>>(list[i], path + ".cosines[" + std::to_string(i) + "]");
      if (pair.size() != 2 || pair[0] < 0) {
        fail(path + ".cosines[" + std::to_string(i) + "]", "expected [mode, amplitude]");
      }
      f.cosines.emplace_back(static_cast<std::size_t>(pair[0]), pair[1]);
    }
  }
  return f;
}

InitialSpec parse_initial(const YAML::Node& node) {
  const std::string path = "initial";
  check_keys(node, path, {"preset", "u", "v", "eps_in"});
  InitialSpec spec;
  if (node["preset"]) {
    spec = initial_preset(read<std::string>(node["preset"], "initial.preset"));
  } else {
    if (!node["v"]) fail("initial.v", "missing");
    spec.v = parse_field(node["v"], "initial.v");
  }
  if (node["u"]) {
    const auto& u = node["u"];
    if (u.IsScalar() && u.as<std::string>() == "well_prepared") {
      spec.u_mode = UInit::well_prepared;
    } else if (u.IsScalar() && u.as<std::string>() == "perturbed") {
      spec.u_mode = UInit::perturbed;
    } else {
      spec.u_mode = UInit::given;
      spec.u = parse_field(u, "initial.u");
    }
  }
  if (node["eps_in"]) {
    spec.eps_in = read_double(node["eps_in"], "initial.eps_in");
    if (spec.eps_in < 0) fail("initial.eps_in", "must be >= 0");
  }
  return spec;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& e : kCommands) {
    if (e.cmd == c) return e.name;
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (const auto& e : kCommands) {
    if (name == e.name) return e.cmd;
  }
  fail("command", "unknown command '" + name + "'");
}

std::function<double(double)> FieldSpec::as_function(double L) const {
  if (!coefficients.empty()) {
    return [c = coefficients, L](double x) {
      double s = c[0];
      for (std::size_t k = 1; k < c.size(); ++k) s += c[k] * std::cos(static_cast<double>(k) * std::numbers::pi * x / L);
      return s;
    };
  }
  return [m = mean, cs = cosines, L](double x) {
    double s = m;
    for (auto [k, a] : cs) s += a * std::cos(static_cast<double>(k) * std::numbers::pi * x / L);
    return s;
  };
}

SpectralField FieldSpec::on(const Grid& grid) const {
  std::vector<double> c(grid.size(), 0.0);
  if (!coefficients.empty()) {
    if (coefficients.size() > grid.size()) throw ConfigError("initial: more coefficients than grid modes");
    std::copy(coefficients.begin(), coefficients.end(), c.begin());
  } else {
    c[0] = mean;
    for (auto [k, a] : cosines) {
      if (k >= grid.size()) throw ConfigError("initial: cosine mode " + std::to_string(k) + " exceeds the grid");
      c[k] += a;
    }
  }
  return SpectralField(grid, std::move(c));
}

InitialSpec initial_preset(const std::string& name) {
  InitialSpec s;
  s.preset = name;
  s.u_mode = UInit::given;
  if (name == "cosine") {
    s.v = {0.6, {{1, 0.6}}, {}};
    s.u = {0.2, {{1, 0.2}}, {}};
  } else if (name == "constant") {
    s.v = {1.0, {}, {}};
    s.u = {0.3, {}, {}};
  } else if (name == "two_mode") {
    s.v = {0.5, {{1, 0.3}, {2, 0.15}}, {}};
    s.u = {0.2, {{1, 0.12}, {2, 0.06}}, {}};
  } else {
    fail("initial.preset", "unknown preset '" + name + "' (cosine, constant, two_mode)");
  }
  return s;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   std::optional<std::uint64_t> seed_override) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: YAML parse error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  check_keys(root, "", {"spec_version", "command", "seed", "model", "grid", "time", "study", "initial", "output"});

  ExperimentConfig cfg;
  if (!root["spec_version"]) fail("spec_version", "missing");
  cfg.spec_version = read<int>(root["spec_version"], "spec_version");
  if (cfg.spec_version != 1) fail("spec_version", "unsupported version " + std::to_string(cfg.spec_version));
  if (!root["command"]) fail("command", "missing");
  cfg.command = parse_command(read<std::string>(root["command"], "command"));
  if (root["seed"]) cfg.seed = read<std::uint64_t>(root["seed"], "seed");

  if (const auto m = root["model"]) {
    check_keys(m, "model", {"kind", "d", "delta", "eps", "kappa", "a", "b", "c"});
    if (m["kind"]) cfg.model.kind = parse_model_kind(read<std::string>(m["kind"], "model.kind"));
    maybe(m, "d", "model", cfg.model.d);
    maybe(m, "delta", "model", cfg.model.delta);
    maybe(m, "eps", "model", cfg.model.eps);
    maybe(m, "kappa", "model", cfg.model.kappa);
    maybe(m, "a", "model", cfg.model.a);
    maybe(m, "b", "model", cfg.model.b);
    maybe(m, "c", "model", cfg.model.c);
  } else {
    fail("model", "missing block");
  }
  if (const auto g = root["grid"]) {
    check_keys(g, "grid", {"L", "N"});
    maybe(g, "L", "grid", cfg.model.L);
    if (g["N"]) cfg.N = read_count(g["N"], "grid.N");
  }
  if (const auto t = root["time"]) {
    check_keys(t, "time", {"T", "dt", "samples"});
    maybe(t, "T", "time", cfg.T);
    if (t["dt"]) cfg.dt = read_double(t["dt"], "time.dt");
    if (t["samples"]) cfg.samples = read_count(t["samples"], "time.samples");
  }
  if (const auto s = root["study"]) {
    check_keys(s, "study", {"eps", "delta_exponent", "delta", "zeta_inv", "tol", "T_back", "n_t",
                            "fast_band", "max_iter", "enforce_gap", "modes", "alpha", "beta", "M",
                            "lipschitz", "slow_samples", "random_samples", "sample_amplitude",
                            "tau", "threads"});
    if (s["eps"]) cfg.eps_list = read<std::vector<double>>(s["eps"], "study.eps");
    maybe(s, "delta_exponent", "study", cfg.delta_exponent);
    if (s["delta"]) cfg.delta_fixed = read_double(s["delta"], "study.delta");
    maybe(s, "zeta_inv", "study", cfg.zeta_inv);
    maybe(s, "tol", "study", cfg.tol);
    maybe(s, "T_back", "study", cfg.T_back);
    if (s["n_t"]) cfg.n_t = read_count(s["n_t"], "study.n_t");
    if (s["fast_band"]) cfg.fast_band = read_count(s["fast_band"], "study.fast_band");
    if (s["max_iter"]) cfg.max_iter = read_count(s["max_iter"], "study.max_iter");
    if (s["enforce_gap"]) cfg.enforce_gap = read<bool>(s["enforce_gap"], "study.enforce_gap");
    if (s["modes"]) {
      for (double k : read<std::vector<double>>(s["modes"], "study.modes")) {
        if (k < 0 || k != std::floor(k)) fail("study.modes", "mode indices must be nonnegative integers");
        cfg.modes.push_back(static_cast<std::size_t>(k));
      }
    }
    maybe(s, "alpha", "study", cfg.alpha);
    maybe(s, "beta", "study", cfg.beta);
    if (s["M"]) cfg.M = read_double(s["M"], "study.M");
    if (const auto l = s["lipschitz"]) {
      check_keys(l, "study.lipschitz", {"f", "phi", "psi"});
      LipschitzConstants lc;
      maybe(l, "f", "study.lipschitz", lc.f);
      maybe(l, "phi", "study.lipschitz", lc.phi);
      maybe(l, "psi", "study.lipschitz", lc.psi);
      cfg.lipschitz = lc;
    }
    if (s["slow_samples"]) {
      cfg.slow_samples = read<std::vector<std::vector<double>>>(s["slow_samples"], "study.slow_samples");
    }
    if (s["random_samples"]) cfg.random_samples = read_count(s["random_samples"], "study.random_samples");
    maybe(s, "sample_amplitude", "study", cfg.sample_amplitude);
    maybe(s, "tau", "study", cfg.tau);
    if (s["threads"]) cfg.threads = static_cast<unsigned>(read_count(s["threads"], "study.threads"));
  }
  if (const auto i = root["initial"]) {
    cfg.initial = parse_initial(i);
    cfg.has_initial = true;
  }
  if (const auto o = root["output"]) {
    check_keys(o, "output", {"csv", "svg", "timing"});
    if (o["csv"]) cfg.csv = read<std::string>(o["csv"], "output.csv");
    if (o["svg"]) cfg.svg = read<std::string>(o["svg"], "output.svg");
    if (o["timing"]) cfg.timing = read<bool>(o["timing"], "output.timing");
  }
  if (cfg.csv.empty()) cfg.csv = to_string(cfg.command) + ".csv";
  if (seed_override) cfg.seed = seed_override;
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), seed_override);
}

void validate_config(const ExperimentConfig& cfg) {
  cfg.model.validate();
  const Grid grid(cfg.model.L, cfg.N);
  (void)grid;
  const auto need_initial = [&] {
    if (!cfg.has_initial) fail("initial", "missing block for command " + to_string(cfg.command));
  };
  const auto need_time = [&] {
    if (!(cfg.T > 0)) fail("time.T", "must be > 0");
    if (cfg.samples == 0) fail("time.samples", "must be >= 1");
    if (cfg.dt) {
      if (!(*cfg.dt > 0)) fail("time.dt", "must be > 0");
      if (cfg.model.kind == ModelKind::nonlinear && cfg.command != Command::converge &&
          cfg.command != Command::limit && *cfg.dt > 0.5 * cfg.model.eps) {
        fail("time.dt", "nonlinear kind needs dt <= eps/2");
      }
    }
  };
  const auto need_eps_list = [&] {
    if (cfg.eps_list.empty()) fail("study.eps", "missing or empty");
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
      if (!(cfg.eps_list[i] > 0)) fail("study.eps[" + std::to_string(i) + "]", "must be > 0");
      if (i && !(cfg.eps_list[i] < cfg.eps_list[i - 1])) fail("study.eps", "must be strictly decreasing");
    }
  };
  if (cfg.delta_fixed && *cfg.delta_fixed < 0) fail("study.delta", "must be >= 0");
  if (cfg.M && !(*cfg.M > 0)) fail("study.M", "must be > 0");
  if (!(cfg.tol > 0)) fail("study.tol", "must be > 0");
  if (cfg.T_back < 0) fail("study.T_back", "must be >= 0");

  switch (cfg.command) {
    case Command::simulate:
    case Command::limit:
      need_time();
      need_initial();
      break;
    case Command::converge:
      need_time();
      need_initial();
      need_eps_list();
      if (!cfg.delta_fixed && !(cfg.delta_exponent > 1)) {
        fail("study.delta_exponent", "must be > 1 (or give study.delta)");
      }
      break;
    case Command::manifold_linear:
      if (cfg.model.kind != ModelKind::linear) fail("model.kind", "manifold-linear needs kind: linear");
      if (!(cfg.T > 0)) fail("time.T", "must be > 0");
      break;
    case Command::manifold_galerkin:
      if (!(cfg.zeta_inv > 1)) fail("study.zeta_inv", "must be > 1");
      if (cfg.slow_samples.empty() && cfg.random_samples == 0) {
        fail("study.slow_samples", "give slow_samples or random_samples");
      }
      if (cfg.random_samples > 0 && !cfg.seed) fail("seed", "required for random_samples");
      if (cfg.n_t < 3) fail("study.n_t", "must be >= 3");
      break;
    case Command::gap_check:
      if (!(cfg.zeta_inv > 1)) fail("study.zeta_inv", "must be > 1");
      if (!cfg.eps_list.empty()) need_eps_list();
      if (!cfg.lipschitz && cfg.model.kind == ModelKind::nonlinear && !cfg.seed) {
        fail("seed", "required when the Lipschitz constants are estimated");
      }
      break;
    case Command::initial_layer:
      need_initial();
      if (!cfg.seed) fail("seed", "required (the smoothing constant estimate is randomized)");
      break;
  }
  if (cfg.alpha < 0 || cfg.alpha > 1) fail("study.alpha", "must lie in [0, 1]");
  if (cfg.beta < 0 || cfg.beta > 1) fail("study.beta", "must lie in [0, 1]");
}

}  // namespace fastreact
