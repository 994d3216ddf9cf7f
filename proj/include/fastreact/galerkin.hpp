#pragma once

// Slow manifolds of Galerkin truncations by Lyapunov-Perron iteration.
//
// The truncation keeps modes k < K_G = min(N, k0 + fast_band). The slow
// variables are the v-modes k < k0; u (all modes) and the v-modes k >= k0
// are fast. On a backward window [-T_back, 0] the map is
//   u(t)   = int_{-T_back}^t e^{a_k (t-s)} F_u(s) ds
//   v_F(t) = int_{-T_back}^t e^{b_k (t-s)} G_v(s) ds
//   v_S(t) = e^{b_k t} xi - int_t^0 e^{b_k (t-s)} G_v(s) ds
// with a_k = -(d + delta) mu_k - r/eps, b_k = -d mu_k, and the cross
// diffusion -delta mu_k u_k moved into G_v.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fastreact/models.hpp"
#include "fastreact/spectral.hpp"

namespace fastreact {

struct OperatorConstants {
  double C_A = 1.0;
  double M_A = 1.0;
  double omega_A = 0.0;
};

struct SplittingParams {
  double zeta_inv = 0;
  /// True when zeta_inv was a perfect square and has been moved up by 1e-9.
  bool nudged = false;
  int k0 = 0;
  double N_S = 0, N_F = 0;
  /// N_S - N_F = k0 - 2 by the formulas (the value k0 is sometimes quoted; see README).
  double gap = 0;
  /// zeta_inv (eps (d + delta) omega_A - 1) + (N_S + N_F)/2.
  double eta = 0;
};

/// Throws ConfigError for zeta_inv <= 1 and DegenerateSplittingError when gap <= 0.
SplittingParams splitting_parameters(double zeta_inv, const ModelParams& p,
                                     const OperatorConstants& ops = {});

struct GapReport {
  double term1 = 0, term2 = 0, total = 0;
  double parameter_inequality = 0;
  double eps_zeta_inv = 0;           ///< eps * zeta_inv
  double eps_zeta_limit = 0;         ///< (1 - L_f)/4
  bool eps_zeta_ok = false;          ///< eps * zeta_inv < (1 - L_f)/4
  double delta_over_eps_zeta = 0;    ///< delta / (eps zeta^{-1/2})
  bool passes = false;
};

GapReport validate_assumptions(const ModelParams& p, const SplittingParams& split,
                               const LipschitzConstants& lips, const OperatorConstants& ops = {});

/// The linear kind written as u_t = ... + (-u + v/2)/(eps/2): returns params with eps halved.
ModelParams lp_effective_params(const ModelParams& p);

/// Constants used for the gap check of the LP iteration: (1/2, 0, 0) for the
/// linear kind, lipschitz_estimates(p, radius, seed) otherwise.
LipschitzConstants lp_lipschitz(const ModelParams& p, double radius, std::uint64_t seed = 0);

struct LPOptions {
  double T_back = 0;        ///< 0 selects the default horizon
  double tol = 1e-10;
  std::size_t n_t = 512;
  std::size_t fast_band = 0;  ///< 0 selects 3 k0
  std::size_t max_iter = 500;
  std::size_t grid_nodes = 64;
  /// Pointwise clamp of (u, v) inside the nonlinear terms; 0 selects 2 sup|xi|.
  double clip_radius = 0;
  bool enforce_gap = true;
  std::optional<LipschitzConstants> lips;
  OperatorConstants ops;
};

struct GraphPoint {
  std::vector<double> v_slow;  ///< xi, modes k < k0
  std::vector<double> h_u;     ///< u at t = 0, modes k < K_G
  std::vector<double> h_vF;    ///< v at t = 0, modes k0 <= k < K_G
  std::size_t iterations = 0;
  double contraction = 0;      ///< max ratio of successive iterate distances
  double T_back = 0;
  double eta = 0;              ///< weight used in the sup-norm
  double final_change = 0;
  GapReport gap;
};

/// Default horizon: max(20 eps ln(1/tol), 1.1 ln(10/tol) / |slowest fast rate|).
double default_backward_horizon(const ModelParams& p, const SplittingParams& split, double tol,
                                std::size_t galerkin_modes);

std::size_t galerkin_size(const SplittingParams& split, const LPOptions& opt);

/// Throws DivergenceError on three consecutive non-contracting iterations or
/// max_iter exhaustion, HorizonError when the truncated tail exceeds tol/10,
/// and AssumptionError when enforce_gap is set and the gap check fails.
GraphPoint lyapunov_perron_fixed_point(std::span<const double> v0_slow, const ModelParams& p,
                                       const SplittingParams& split, const LPOptions& opt = {});

struct ManifoldGraph {
  std::vector<std::size_t> slow_modes;
  std::vector<GraphPoint> points;
  /// max over pairs of ||h(x) - h(y)||_{H^2} / ||x - y||_{H^2}.
  double lipschitz_ratio = 0;
};

ManifoldGraph manifold_graph(std::span<const std::vector<double>> samples, const ModelParams& p,
                             const SplittingParams& split, const LPOptions& opt = {},
                             unsigned threads = 1);

/// H^2 norm of a truncated coefficient vector starting at mode `first`.
double coeff_h2_norm(std::span<const double> c, double L, std::size_t first = 0);

/// Forward integration from (h^0(v0), v0) for time tau (tau < 0 selects
/// 5 eps ln(1/eps)); the terminal v-modes k < k0 become v_slow.
GraphPoint attraction_projection(std::span<const double> v0_slow, const ModelParams& p,
                                 const SplittingParams& split, double tau = -1,
                                 const LPOptions& opt = {});

struct DistanceReport {
  double u_distance_L2 = 0;   ///< ||h_u - h^0(xi)||_{L^2}
  double vF_norm_H2 = 0;      ///< ||h_vF||_{H^2}
  double total = 0;
  /// (eps + (delta + eps)/(eps gap)) ||xi||_{H^2}
  double scale = 0;
};

DistanceReport distance_to_critical(const GraphPoint& pt, const ModelParams& p,
                                    const SplittingParams& split, std::size_t grid_nodes = 64);

struct ResolventReport {
  double worst_ratio_first = 0, worst_ratio_second = 0;
  std::size_t worst_mode_first = 0, worst_mode_second = 0;
  bool first_ok = false, second_ok = false;
  bool skipped_mode0 = false;  ///< alpha < beta makes mode 0 singular
};

/// Per mode lambda = -mu_k: |lambda|^{alpha-beta} / |eps (d+delta) lambda - 1| against 1
/// (alpha <= beta) or eps^{2(beta-alpha)} (alpha > beta), and
/// eps (d+delta) |lambda|^{1+alpha-beta} / |eps (d+delta) lambda - 1| against eps^{2(beta-alpha)}.
ResolventReport resolvent_bound_check(const ModelParams& p, const Grid& grid, double alpha,
                                      double beta);

}  // namespace fastreact
