#pragma once

// Reaction terms of the fast-slow system
//
//   u_t = (d + delta) u_xx + phi(u, v) + g(u, v) / eps
//   v_t = d v_xx + delta u_xx + psi(u, v)
//
// in two flavours: the nonlinear reversible reaction with
// g = -u + kappa (v - u)^2 and Lotka-Volterra sources, and the linear
// reaction g = v - 2u with no sources.

#include <cstdint>
#include <numbers>
#include <string_view>

namespace fastreact {

enum class ModelKind { nonlinear, linear };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelParams {
  double d = 1.0;
  double delta = 0.0;
  double eps = 0.01;
  double kappa = 1.0;
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double L = std::numbers::pi;
  ModelKind kind = ModelKind::nonlinear;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
};

struct ReactionEval {
  double g = 0, f_tilde = 0, phi = 0, psi = 0;
  double g1 = 0, g2 = 0, phi1 = 0, phi2 = 0, psi1 = 0, psi2 = 0;
};

ReactionEval eval_reaction(const ModelParams& p, double x, double y) noexcept;

struct LipschitzConstants {
  double f = 0;
  double phi = 0;
  double psi = 0;
};

/// L_f = kappa * 12 * C_* * K_M; L_phi, L_psi are sup-norms of the gradients
/// over [0, K0]^2. Gradients are measured in the max of the absolute partials,
/// the dual of the sum norm used on the product space.
LipschitzConstants lipschitz_from_constants(const ModelParams& p, double c_star, double k_m,
                                            double k0);

/// Same, with C_*, K_M and K_{0,M} from theoretical_constants(p, radius, seed).
/// For the linear kind, returns the constants of the rescaled form
/// g = 2(-u + v/2): L_f = 1/2 and no sources.
LipschitzConstants lipschitz_estimates(const ModelParams& p, double radius,
                                       std::uint64_t seed = 0);

/// sup |psi| over the box [0, box]^2 (exact: candidates on corners and edge critical points).
double sup_abs_psi(const ModelParams& p, double box);
/// sup |psi_1| + sup |psi_2| over [0, box]^2.
double sum_sup_abs_psi_partials(const ModelParams& p, double box);

}  // namespace fastreact
