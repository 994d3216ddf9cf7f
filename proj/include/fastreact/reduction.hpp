#pragma once

// Reduction to the critical manifold {g(u, v) = 0}: the map u = h_kappa(v),
// the initial layer, the limit system, and the constants that decide whether
// limit trajectories stay on the manifold.

#include <cstdint>
#include <optional>

#include "fastreact/models.hpp"
#include "fastreact/spectral.hpp"
#include "fastreact/state.hpp"

namespace fastreact {

/// Root of -u + kappa (v - u)^2 = 0 with 0 <= u <= v. Throws DomainError if v < -1e-12.
double critical_u(double v, double kappa);

/// Field version; the sign check runs on the collocation nodes.
SpectralField critical_map(const SpectralField& v, double kappa);

/// Linear kind: the critical manifold is u = v / 2.
SpectralField critical_map(const SpectralField& v, const ModelParams& p);

struct InitialLayer {
  double eps_in = 0.0;
  SpectralField u0;
  /// ||u_in - u0||_{H^2} / eps_in, present when eps_in > 0.
  std::optional<double> ratio;
};

/// Requires v_in >= u_in >= 0 on the nodes (DomainError otherwise).
InitialLayer initial_layer(const SpectralField& u_in, const SpectralField& v_in, double kappa);

struct ConstantsReport {
  double C_star = 0;
  double C_HS = 0;  ///< numeric lower bound inflated by 1.5, an estimate
  double lambda_1 = 0;
  double K0 = 0, K1 = 0, K2 = 0, K_M = 0;
  double kappa_bound = 0;
  bool kappa_ok = false;
};

/// sqrt(coth(L)), the sup of |w(x)| / ||w||_{H^1} over H^1(0, L).
double sharp_embedding_constant(double L);

/// Numeric lower bound for the heat smoothing constant, before inflation.
double smoothing_constant_lower_bound(const ModelParams& p, std::uint64_t seed);

/// Requires c > 0 and M > 0. Randomness (smoothing constant) flows from `seed`.
ConstantsReport theoretical_constants(const ModelParams& p, double M, std::uint64_t seed = 0);

/// Integrates v_t = d v_xx + psi(h(v), v) with second-order ETD; u = h(v) at each sample.
/// Linear kind: u = v / 2 and v_t = (d + delta / 2) v_xx.
/// Throws DivergenceError if any coefficient exceeds 1e8.
Trajectory solve_limit_system(const SpectralField& v_in, const ModelParams& p, double T, double dt,
                              double sample_interval);

}  // namespace fastreact
