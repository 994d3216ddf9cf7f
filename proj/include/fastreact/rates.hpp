#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastreact/models.hpp"
#include "fastreact/spectral.hpp"
#include "fastreact/state.hpp"

namespace fastreact {

struct ErrorNorms {
  double LinfL2 = 0, L2H1 = 0, LinfH2 = 0;
  /// Same norms restricted to samples with t >= t_skip.
  double LinfL2_post = 0, L2H1_post = 0, LinfH2_post = 0;
};

/// U = u_eps - u, V = v_eps - v per sample. L^inf norms are maxima over samples of
/// ||U|| + ||V||; the L^2-in-time norm uses trapezoid weights. Throws ShapeError
/// on mismatched sampling or grids.
ErrorNorms trajectory_error_norms(const Trajectory& fast, const Trajectory& limit, double t_skip = 0);

struct OrderFit {
  double order = 0;
  double intercept = 0;
  /// RMS of the log residuals.
  double residual = 0;
};

/// Least-squares line through (log x, log y); entries with y <= 0 are skipped.
OrderFit fit_order(std::span<const double> x, std::span<const double> y);

/// ||g(u, v)||_{H^2} with the model's g.
double layer_residual(const ModelParams& p, const SpectralField& u, const SpectralField& v);

/// u_in = h(v_in) + s with the constant s >= 0 chosen so that the layer residual equals
/// `eps_in`. Throws ConfigError if that needs u_in > v_in somewhere.
SpectralField perturbed_initial_u(const ModelParams& p, const SpectralField& v_in, double eps_in);

enum class Preparation { well_prepared, perturbed, given };

struct ConvergenceConfig {
  ModelParams base;  ///< eps and delta are overwritten per run
  std::size_t N = 128;
  double T = 0.5;
  std::size_t sample_intervals = 100;
  std::optional<double> dt;  ///< default: min(eps/2, T/1000), rounded to divide the sampling
  std::vector<double> eps_list;
  double delta_exponent = 1.5;
  std::optional<double> delta_fixed;
  std::function<double(double)> v_in;
  std::function<double(double)> u_in;  ///< used with Preparation::given
  Preparation preparation = Preparation::well_prepared;
  double eps_in_target = 0.1;
  double t_skip_factor = 5.0;
  unsigned threads = 1;
  bool timing = true;
};

struct ConvergenceRow {
  double eps = 0, delta = 0, eps_in = 0;
  ErrorNorms errors;
  double wall_s = 0;
  bool ok = true;
  std::string failure;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  OrderFit order_LinfL2, order_L2H1, order_LinfH2;
  OrderFit order_LinfL2_post, order_L2H1_post, order_LinfH2_post;
  /// Largest fit residual of the three main fits.
  double fit_residual = 0;
  /// The last E_LinfL2 is at least 0.9 times the previous one.
  bool plateau = false;
};

/// Runs the fast system and the limit system per eps; divergent runs are kept
/// with ok = false and excluded from the fits.
ConvergenceReport convergence_study(const ConvergenceConfig& cfg);

}  // namespace fastreact
