#pragma once

// Closed-form mode dynamics of the linear model
//   u_t = (d + delta) u_xx + (v - 2u)/eps,  v_t = d v_xx + delta u_xx.
// With mu = (k pi / L)^2, Omega = sqrt(eps^2 delta^2 mu^2 + 4) and
// w_pm = +-Omega - eps (2d + delta) mu - 2, each mode evolves as a sum of
// exp(t w_+ / (2 eps)) (slow) and exp(t w_- / (2 eps)) (fast). The slow
// eigenline is u = slope * v with slope = 2 / (Omega + eps delta mu + 2).

#include <cstddef>
#include <span>
#include <vector>

#include "fastreact/models.hpp"

namespace fastreact {

struct ModeSpectrum {
  std::size_t k = 0;
  double mu = 0;
  double Omega = 0;
  double w_plus = 0, w_minus = 0;
  double slow_rate = 0, fast_rate = 0;
  double slope = 0;
  /// -(2d + delta) mu / 2 + eps delta^2 mu^2 / 8, the small-eps expansion of slow_rate.
  double asymptotic_slow_rate = 0;
  /// eps delta mu <= 0.1.
  bool regime_ok = false;
};

/// Throws ConfigError unless p.kind is linear.
ModeSpectrum mode_spectrum(const ModelParams& p, std::size_t k);

struct ModeSolution {
  double u = 0, v = 0;
  /// Limit component exp(-t (2d + delta) mu / 2) v_k0.
  double v_limit = 0;
};

ModeSolution closed_form_solution(double u_k0, double v_k0, const ModelParams& p, std::size_t k,
                                  double t);

struct ModeInvariance {
  std::size_t k = 0;
  double slope = 0;
  /// max_t |u_k/v_k - slope| from an on-manifold start (affine |u_k - slope v_k|
  /// once |v_k| < 1e-8, flagged by used_affine).
  double invariance_defect = 0;
  bool used_affine = false;
  double slope_distance = 0;  ///< |slope - 1/2|
  double distance_bound = 0;  ///< eps delta mu / 4
  bool bound_applies = false;  ///< eps delta mu <= 1
  double fast_rate = 0;
  /// Log-linear fit of |u_k - slope v_k| over t in [0, 5 eps] from an off-manifold start.
  double fitted_attraction_rate = 0;
  double attraction_rel_error = 0;
  bool regime_ok = false;
};

std::vector<ModeInvariance> invariance_and_distance(const ModelParams& p,
                                                    std::span<const std::size_t> modes, double T,
                                                    std::size_t time_points = 201);

}  // namespace fastreact
