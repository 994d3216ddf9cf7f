#pragma once

// Second-order exponential time differencing (ETDRK2) with exact per-mode 2x2
// linear propagators. The linear part is
//   nonlinear kind: u' = -(d+delta) mu u - u/eps,        v' = -d mu v - delta mu u
//   linear kind:    u' = -(d+delta) mu u + (v - 2u)/eps, v' = -d mu v - delta mu u
// and the remainder N(u, v) = (kappa f~/eps + phi, psi) is explicit.

#include <functional>
#include <span>
#include <vector>

#include "fastreact/expm.hpp"
#include "fastreact/models.hpp"
#include "fastreact/spectral.hpp"
#include "fastreact/state.hpp"

namespace fastreact {

/// Per-mode E = exp(dt M_k), W1 = dt phi_1(dt M_k), W2 = dt phi_2(dt M_k).
struct ModePropagator {
  double dt = 0;
  std::vector<Mat2> generator;
  std::vector<Mat2> E, W1, W2;
};

Mat2 mode_generator(const ModelParams& p, double mu);

/// dt >= 0; dt = 0 gives identity propagators.
ModePropagator linear_propagator(const ModelParams& p, const Grid& grid, double dt);

/// Scalar counterpart for diagonal linear parts w' = rate_k w + N(w).
struct ScalarPropagator {
  double dt = 0;
  std::vector<double> E, W1, W2;
};

ScalarPropagator scalar_propagator(std::span<const double> rates, double dt);

using FieldMap = std::function<SpectralField(const SpectralField&)>;

SpectralField etd_step(const SpectralField& w, const ScalarPropagator& prop, const FieldMap& N);

struct StepOptions {
  /// Nonlinear kind requires dt <= dt_factor * eps.
  double dt_factor = 0.5;
};

double default_dt(const ModelParams& p, double T);

FastSlowState etd_step(const FastSlowState& s, const ModelParams& p, const ModePropagator& prop);
FastSlowState etd_step(const FastSlowState& s, const ModelParams& p, double dt,
                       const StepOptions& opt = {});

/// Number of steps per sample and number of samples; throws ConfigError unless
/// dt divides sample_every and sample_every divides T (relative slack 1e-9).
struct StepPlan {
  std::size_t steps_per_sample = 0;
  std::size_t samples = 0;
};
StepPlan plan_steps(double T, double dt, double sample_every);

/// Throws DivergenceError(time) on non-finite or |coefficient| > 1e8.
void check_finite(const SpectralField& w, double t, const char* name);

Trajectory simulate(const FastSlowState& s0, const ModelParams& p, double T, double dt,
                    double sample_every, const StepOptions& opt = {});

}  // namespace fastreact
