#pragma once

// Experiment configuration read from YAML (schema version 1).
//
//   spec_version: 1
//   command: converge              # simulate | limit | converge | manifold-linear
//                                  # | manifold-galerkin | gap-check | initial-layer
//   seed: 7
//   model: {kind: nonlinear, d: 1, delta: 0, eps: 0.01, kappa: 1, a: 1, b: 1, c: 1}
//   grid: {L: 3.141592653589793, N: 64}
//   time: {T: 1, dt: 0.001, samples: 100}
//   study: {eps: [1e-2, 3e-3], delta_exponent: 1.5, zeta_inv: 10, tol: 1e-10}
//   initial: {preset: cosine} | {v: {mean: 0.5, amplitude: 0.5, mode: 1}, u: well_prepared}
//   output: {csv: run.csv, svg: run.svg, timing: false}

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fastreact/galerkin.hpp"
#include "fastreact/models.hpp"
#include "fastreact/spectral.hpp"

namespace fastreact {

enum class Command {
  simulate,
  limit,
  converge,
  manifold_linear,
  manifold_galerkin,
  gap_check,
  initial_layer,
};

std::string to_string(Command c);
/// Throws ConfigError naming the `command` field.
Command parse_command(const std::string& name);

/// mean + sum_i amplitude_i cos(mode_i pi x / L), or explicit cosine coefficients.
struct FieldSpec {
  double mean = 0.0;
  std::vector<std::pair<std::size_t, double>> cosines;  ///< (mode, amplitude)
  std::vector<double> coefficients;                      ///< used when non-empty

  std::function<double(double)> as_function(double L) const;
  SpectralField on(const Grid& grid) const;
};

enum class UInit { well_prepared, perturbed, given };

struct InitialSpec {
  FieldSpec v;
  UInit u_mode = UInit::well_prepared;
  FieldSpec u;
  double eps_in = 0.1;
  std::string preset;  ///< name when a preset was used
};

/// Built-in data: "cosine" u = 0.2(1 + cos), v = 0.6(1 + cos); "constant"
/// u = 0.3, v = 1; "two_mode" v = 0.5 + 0.3 cos + 0.15 cos 2, u = 0.4 v.
InitialSpec initial_preset(const std::string& name);

struct ExperimentConfig {
  int spec_version = 1;
  Command command = Command::simulate;
  std::optional<std::uint64_t> seed;

  ModelParams model;
  std::size_t N = 64;

  double T = 1.0;
  std::optional<double> dt;
  std::size_t samples = 100;

  std::vector<double> eps_list;
  double delta_exponent = 1.5;
  std::optional<double> delta_fixed;
  double zeta_inv = 0;
  double tol = 1e-10;
  double T_back = 0;
  std::size_t n_t = 512;
  std::size_t fast_band = 0;
  std::size_t max_iter = 500;
  bool enforce_gap = true;
  std::vector<std::size_t> modes;
  double alpha = 0.0, beta = 0.0;
  std::optional<double> M;
  std::optional<LipschitzConstants> lipschitz;
  std::vector<std::vector<double>> slow_samples;
  std::size_t random_samples = 0;
  double sample_amplitude = 0.1;
  double tau = -1;  ///< attraction time for manifold-galerkin cross checks; < 0 default
  unsigned threads = 1;

  InitialSpec initial;
  bool has_initial = false;

  std::string csv;
  std::string svg;
  bool timing = false;
};

/// Parses and validates; ConfigError messages start with the offending field path.
/// A seed override (the --seed flag) replaces the file's seed before validation.
ExperimentConfig parse_config_text(const std::string& yaml_text,
                                   std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config(const std::string& path,
                             std::optional<std::uint64_t> seed_override = {});

/// Checks the per-command requirements; called by the parsers.
void validate_config(const ExperimentConfig& cfg);

}  // namespace fastreact
