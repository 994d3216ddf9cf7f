#include "fastreact/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "fastreact/errors.hpp"
#include "fastreact/expm.hpp"
#include "fastreact/integrator.hpp"
#include "fastreact/reduction.hpp"

namespace fastreact {

SplittingParams splitting_parameters(double zeta_inv, const ModelParams& p,
                                     const OperatorConstants& ops) {
  if (!(zeta_inv > 1) || !std::isfinite(zeta_inv)) {
    throw ConfigError("study.zeta_inv: must be > 1, got " + std::to_string(zeta_inv));
  }
  SplittingParams s;
  const double root = std::round(std::sqrt(zeta_inv));
  if (root * root == zeta_inv) {
    zeta_inv += 1e-9;
    s.nudged = true;
  }
  s.zeta_inv = zeta_inv;
  s.k0 = static_cast<int>(std::floor(std::sqrt(zeta_inv)));
  const double k0 = s.k0;
  s.N_S = -zeta_inv - (k0 - 1) * (k0 - 1);
  s.N_F = -zeta_inv - k0 * k0 + k0 + 1;
  s.gap = s.N_S - s.N_F;
  s.eta = zeta_inv * (p.eps * (p.d + p.delta) * ops.omega_A - 1.0) + 0.5 * (s.N_F + s.N_S);
  if (s.gap <= 0) {
    throw DegenerateSplittingError("splitting gap N_S - N_F = " + std::to_string(s.gap) +
                                   " <= 0 for zeta_inv = " + std::to_string(zeta_inv) +
                                   " (k0 = " + std::to_string(s.k0) + ")");
  }
  return s;
}

GapReport validate_assumptions(const ModelParams& p, const SplittingParams& split,
                               const LipschitzConstants& lips, const OperatorConstants& ops) {
  GapReport r;
  const double eps = p.eps;
  const double CA = ops.C_A;
  const double lf = lips.f + eps * lips.phi;
  r.parameter_inequality = (1.0 - eps * split.zeta_inv) * (eps * (p.d + p.delta) * ops.omega_A - 1.0) -
                           eps * (split.N_S + split.N_F) / 2.0;
  r.term1 = CA * lf / std::abs(r.parameter_inequality);
  r.term2 = 2.0 * (p.delta * (CA + CA * CA / p.d) * lf + 2.0 * CA * eps * lips.psi) / (eps * split.gap);
  r.total = r.term1 + r.term2;
  r.eps_zeta_inv = eps * split.zeta_inv;
  r.eps_zeta_limit = (1.0 - lips.f) / 4.0;
  r.eps_zeta_ok = r.eps_zeta_inv < r.eps_zeta_limit;
  r.delta_over_eps_zeta = p.delta / (eps * std::sqrt(split.zeta_inv));
  r.passes = r.total < 1.0 && r.parameter_inequality < 0.0 && r.eps_zeta_ok;
  return r;
}

ModelParams lp_effective_params(const ModelParams& p) {
  ModelParams q = p;
  if (p.kind == ModelKind::linear) q.eps = 0.5 * p.eps;
  return q;
}

LipschitzConstants lp_lipschitz(const ModelParams& p, double radius, std::uint64_t seed) {
  if (p.kind == ModelKind::linear) return {0.5, 0.0, 0.0};
  return lipschitz_estimates(p, radius, seed);
}

double coeff_h2_norm(std::span<const double> c, double L, std::size_t first) {
  double sum = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::size_t k = first + i;
    if (k == 0) {
      sum += L * c[i] * c[i];
    } else {
      const double mu = std::pow(static_cast<double>(k) * std::numbers::pi / L, 2);
      sum += 0.5 * L * (1.0 + mu + mu * mu) * c[i] * c[i];
    }
  }
  return std::sqrt(sum);
}

namespace {

double mode_mu(std::size_t k, double L) { return std::pow(static_cast<double>(k) * std::numbers::pi / L, 2); }

double reaction_rate(const ModelParams& p) {
  return (p.kind == ModelKind::linear ? 2.0 : 1.0) / p.eps;
}

double slowest_fast_rate(const ModelParams& p, const SplittingParams& split) {
  const double u_rate = -reaction_rate(p);
  const double vf_rate = -p.d * mode_mu(static_cast<std::size_t>(split.k0), p.L);
  return std::max(u_rate, vf_rate);
}

// Exponentially fitted trapezoid weights for y' = r y + F on a step h: F is
// written as e^{beta tau} g(tau) with g linear, so forcing that grows like the
// slow mode it drives (beta = its diffusive rate) is integrated exactly.
// beta = 0 is the plain exponential trapezoid rule.
struct StepWeights {
  double e, w_left, w_right;
};

StepWeights forward_weights(double rate, double beta, double h) {
  const double z = (rate - beta) * h;
  const double p1 = phi_fn(1, z), p2 = phi_fn(2, z);
  return {std::exp(rate * h), h * std::exp(beta * h) * (p1 - p2), h * p2};
}

// v_j = e v_{j+1} - (w_left G_j + w_right G_{j+1}).
StepWeights backward_weights(double rate, double beta, double h) {
  const double z = (beta - rate) * h;
  const double p1 = phi_fn(1, z), p2 = phi_fn(2, z);
  return {std::exp(-rate * h), h * p2, h * (p1 - p2) * std::exp(-beta * h)};
}

}  // namespace

std::size_t galerkin_size(const SplittingParams& split, const LPOptions& opt) {
  const std::size_t k0 = static_cast<std::size_t>(split.k0);
  const std::size_t band = opt.fast_band == 0 ? 3 * k0 : opt.fast_band;
  return std::min(opt.grid_nodes, k0 + band);
}

double default_backward_horizon(const ModelParams& p, const SplittingParams& split, double tol,
                                std::size_t) {
  const double base = 20.0 * p.eps * std::log(1.0 / tol);
  const double rate = std::abs(slowest_fast_rate(p, split));
  return std::max(base, 1.1 * std::log(10.0 / tol) / rate);
}

GraphPoint lyapunov_perron_fixed_point(std::span<const double> v0_slow, const ModelParams& p,
                                       const SplittingParams& split, const LPOptions& opt) {
  p.validate();
  const std::size_t k0 = static_cast<std::size_t>(split.k0);
  if (v0_slow.size() != k0) {
    throw ShapeError("slow data must have k0 = " + std::to_string(k0) + " coefficients, got " +
                     std::to_string(v0_slow.size()));
  }
  if (!(opt.tol > 0)) throw ConfigError("study.tol: must be > 0");
  if (opt.n_t < 3) throw ConfigError("study.n_t: need at least 3 time points");
  const std::size_t KG = galerkin_size(split, opt);
  if (KG <= k0) throw ConfigError("grid.N: Galerkin truncation leaves no fast v-modes");
  const Grid grid(p.L, opt.grid_nodes);

  GraphPoint out;
  out.v_slow.assign(v0_slow.begin(), v0_slow.end());

  // Gap check on the general form.
  const double radius = std::max(coeff_h2_norm(v0_slow, p.L), 1e-12);
  const LipschitzConstants lips = opt.lips ? *opt.lips : lp_lipschitz(p, radius);
  out.gap = validate_assumptions(lp_effective_params(p), split, lips, opt.ops);
  if (opt.enforce_gap && !out.gap.passes) {
    std::ostringstream msg;
    msg << "gap condition fails: term1 = " << out.gap.term1 << ", term2 = " << out.gap.term2
        << ", parameter inequality = " << out.gap.parameter_inequality;
    throw AssumptionError(msg.str());
  }

  const double T_back =
      opt.T_back > 0 ? opt.T_back : default_backward_horizon(p, split, opt.tol, KG);
  const double tail = std::exp(slowest_fast_rate(p, split) * T_back);
  if (tail > opt.tol / 10.0) {
    throw HorizonError("study.T_back: truncated tail " + std::to_string(tail) +
                       " exceeds tol/10 for T_back = " + std::to_string(T_back));
  }
  out.T_back = T_back;
  // Midpoint of the dichotomy gap between slow and fast v-modes.
  const double eta = -p.d * (mode_mu(k0 - 1, p.L) + mode_mu(k0, p.L)) / 2.0;
  out.eta = eta;

  const std::size_t nt = opt.n_t;
  const double h = T_back / static_cast<double>(nt - 1);
  std::vector<double> t(nt), weight(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    t[j] = -T_back + h * static_cast<double>(j);
    weight[j] = std::exp(-eta * t[j]);
  }

  const double r = reaction_rate(p);
  std::vector<double> mu(KG), a(KG), b(KG);
  std::vector<StepWeights> wu(KG), wv(KG);
  for (std::size_t k = 0; k < KG; ++k) {
    mu[k] = mode_mu(k, p.L);
    a[k] = -(p.d + p.delta) * mu[k] - r;
    b[k] = -p.d * mu[k];
    const double beta = k < k0 ? b[k] : 0.0;
    wu[k] = forward_weights(a[k], beta, h);
    wv[k] = k < k0 ? backward_weights(b[k], beta, h) : forward_weights(b[k], beta, h);
  }

  double clip = opt.clip_radius;
  if (p.kind == ModelKind::nonlinear && clip <= 0) {
    std::vector<double> xi(grid.size(), 0.0);
    std::copy(v0_slow.begin(), v0_slow.end(), xi.begin());
    const auto vals = SpectralField(grid, xi).values();
    double sup = 0;
    for (double x : vals) sup = std::max(sup, std::abs(x));
    clip = std::max(2.0 * sup, 1e-12);
  }

  using Path = std::vector<std::vector<double>>;
  Path U(nt, std::vector<double>(KG, 0.0)), V(nt, std::vector<double>(KG, 0.0));
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t k = 0; k < k0; ++k) V[j][k] = std::exp(b[k] * t[j]) * v0_slow[k];
  }

  std::vector<double> pu(grid.padded_size()), pv(grid.padded_size());
  std::vector<double> cu(grid.size()), cv(grid.size());
  auto forcing = [&](const std::vector<double>& u, const std::vector<double>& v,
                     std::vector<double>& fu, std::vector<double>& gv) {
    fu.assign(KG, 0.0);
    gv.assign(KG, 0.0);
    if (p.kind == ModelKind::linear) {
      for (std::size_t k = 0; k < KG; ++k) fu[k] = v[k] / p.eps;
    } else {
      std::fill(cu.begin(), cu.end(), 0.0);
      std::fill(cv.begin(), cv.end(), 0.0);
      std::copy(u.begin(), u.end(), cu.begin());
      std::copy(v.begin(), v.end(), cv.begin());
      grid.inverse_padded(cu, pu);
      grid.inverse_padded(cv, pv);
      for (std::size_t j = 0; j < pu.size(); ++j) {
        const double x = std::clamp(pu[j], -clip, clip);
        const double y = std::clamp(pv[j], -clip, clip);
        const ReactionEval e = eval_reaction(p, x, y);
        pu[j] = p.kappa * e.f_tilde / p.eps + e.phi;
        pv[j] = e.psi;
      }
      grid.forward_padded(pu, cu);
      grid.forward_padded(pv, cv);
      for (std::size_t k = 0; k < KG; ++k) {
        fu[k] = cu[k];
        gv[k] = cv[k];
      }
    }
    for (std::size_t k = 0; k < KG; ++k) gv[k] -= p.delta * mu[k] * u[k];
  };

  Path FU(nt), GV(nt);
  Path U_new = U, V_new = V;
  double prev_change = std::numeric_limits<double>::infinity();
  int non_contracting = 0;
  for (std::size_t iter = 1; iter <= opt.max_iter; ++iter) {
    for (std::size_t j = 0; j < nt; ++j) forcing(U[j], V[j], FU[j], GV[j]);

    for (std::size_t k = 0; k < KG; ++k) {
      U_new[0][k] = 0.0;
      for (std::size_t j = 0; j + 1 < nt; ++j) {
        U_new[j + 1][k] = wu[k].e * U_new[j][k] + wu[k].w_left * FU[j][k] + wu[k].w_right * FU[j + 1][k];
      }
      if (k < k0) {
        V_new[nt - 1][k] = v0_slow[k];
        for (std::size_t j = nt - 1; j-- > 0;) {
          V_new[j][k] = wv[k].e * V_new[j + 1][k] - (wv[k].w_left * GV[j][k] + wv[k].w_right * GV[j + 1][k]);
        }
      } else {
        V_new[0][k] = 0.0;
        for (std::size_t j = 0; j + 1 < nt; ++j) {
          V_new[j + 1][k] = wv[k].e * V_new[j][k] + wv[k].w_left * GV[j][k] + wv[k].w_right * GV[j + 1][k];
        }
      }
    }

    double change = 0.0;
    std::vector<double> du(KG), dvs(k0), dvf(KG - k0);
    for (std::size_t j = 0; j < nt; ++j) {
      for (std::size_t k = 0; k < KG; ++k) du[k] = U_new[j][k] - U[j][k];
      for (std::size_t k = 0; k < k0; ++k) dvs[k] = V_new[j][k] - V[j][k];
      for (std::size_t k = k0; k < KG; ++k) dvf[k - k0] = V_new[j][k] - V[j][k];
      const double norm = coeff_h2_norm(du, p.L) + coeff_h2_norm(dvf, p.L, k0) + coeff_h2_norm(dvs, p.L);
      change = std::max(change, weight[j] * norm);
    }
    if (!std::isfinite(change)) {
      throw DivergenceError("Lyapunov-Perron iterate is not finite", std::nan(""));
    }
    std::swap(U, U_new);
    std::swap(V, V_new);
    out.iterations = iter;
    out.final_change = change;

    if (change < opt.tol) break;
    if (std::isfinite(prev_change) && prev_change > 0) {
      const double ratio = change / prev_change;
      out.contraction = std::max(out.contraction, ratio);
      non_contracting = ratio >= 1.0 ? non_contracting + 1 : 0;
      if (non_contracting >= 3) {
        std::ostringstream msg;
        msg << "Lyapunov-Perron map is not contracting (ratio " << ratio << "); gap report: term1 = "
            << out.gap.term1 << ", term2 = " << out.gap.term2 << ", total = " << out.gap.total
            << ", passes = " << (out.gap.passes ? "true" : "false");
        throw DivergenceError(msg.str(), std::nan(""));
      }
    }
    prev_change = change;
    if (iter == opt.max_iter) {
      throw DivergenceError("Lyapunov-Perron iteration did not reach tol in " +
                                std::to_string(opt.max_iter) + " iterations",
                            std::nan(""));
    }
  }

  out.h_u = U[nt - 1];
  out.h_vF.assign(V[nt - 1].begin() + static_cast<std::ptrdiff_t>(k0), V[nt - 1].end());
  return out;
}

ManifoldGraph manifold_graph(std::span<const std::vector<double>> samples, const ModelParams& p,
                             const SplittingParams& split, const LPOptions& opt, unsigned threads) {
  ManifoldGraph g;
  for (std::size_t k = 0; k < static_cast<std::size_t>(split.k0); ++k) g.slow_modes.push_back(k);
  g.points.resize(samples.size());
  std::vector<std::exception_ptr> errors(samples.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(samples.size())));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < samples.size(); i += workers) {
      try {
        g.points[i] = lyapunov_perron_fixed_point(samples[i], p, split, opt);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::size_t k0 = static_cast<std::size_t>(split.k0);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    for (std::size_t j = i + 1; j < g.points.size(); ++j) {
      const auto& x = g.points[i];
      const auto& y = g.points[j];
      std::vector<double> dx(x.v_slow.size()), du(x.h_u.size()), dv(x.h_vF.size());
      for (std::size_t k = 0; k < dx.size(); ++k) dx[k] = x.v_slow[k] - y.v_slow[k];
      for (std::size_t k = 0; k < du.size(); ++k) du[k] = x.h_u[k] - y.h_u[k];
      for (std::size_t k = 0; k < dv.size(); ++k) dv[k] = x.h_vF[k] - y.h_vF[k];
      const double base = coeff_h2_norm(dx, p.L);
      if (base > 0) {
        const double num = coeff_h2_norm(du, p.L) + coeff_h2_norm(dv, p.L, k0);
        g.lipschitz_ratio = std::max(g.lipschitz_ratio, num / base);
      }
    }
  }
  return g;
}

namespace {
SpectralField slow_field(const Grid& grid, std::span<const double> coeffs) {
  std::vector<double> c(grid.size(), 0.0);
  std::copy(coeffs.begin(), coeffs.end(), c.begin());
  return SpectralField(grid, std::move(c));
}
}  // namespace

GraphPoint attraction_projection(std::span<const double> v0_slow, const ModelParams& p,
                                 const SplittingParams& split, double tau, const LPOptions& opt) {
  p.validate();
  const std::size_t k0 = static_cast<std::size_t>(split.k0);
  if (v0_slow.size() != k0) throw ShapeError("slow data must have k0 coefficients");
  if (tau < 0) tau = 5.0 * p.eps * std::log(1.0 / p.eps);
  const std::size_t KG = galerkin_size(split, opt);
  const Grid grid(p.L, opt.grid_nodes);
  const SpectralField v0 = slow_field(grid, v0_slow);
  FastSlowState s{critical_map(v0, p), v0, 0.0};
  if (tau > 0) {
    const double dt0 = default_dt(p, tau);
    const double dt = tau / std::ceil(tau / dt0 - 1e-12);
    const Trajectory traj = simulate(s, p, tau, dt, tau);
    s = traj.samples.back();
  }
  GraphPoint out;
  out.v_slow.assign(s.v.coeffs().begin(), s.v.coeffs().begin() + static_cast<std::ptrdiff_t>(k0));
  out.h_u.assign(s.u.coeffs().begin(), s.u.coeffs().begin() + static_cast<std::ptrdiff_t>(KG));
  out.h_vF.assign(s.v.coeffs().begin() + static_cast<std::ptrdiff_t>(k0),
                  s.v.coeffs().begin() + static_cast<std::ptrdiff_t>(KG));
  out.T_back = tau;
  return out;
}

DistanceReport distance_to_critical(const GraphPoint& pt, const ModelParams& p,
                                    const SplittingParams& split, std::size_t grid_nodes) {
  const Grid grid(p.L, grid_nodes);
  const SpectralField xi = slow_field(grid, pt.v_slow);
  const SpectralField h0 = critical_map(xi, p);
  std::vector<double> diff(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    diff[k] = (k < pt.h_u.size() ? pt.h_u[k] : 0.0) - h0[k];
  }
  DistanceReport r;
  r.u_distance_L2 = sobolev_norm(SpectralField(grid, diff), 0);
  r.vF_norm_H2 = coeff_h2_norm(pt.h_vF, p.L, static_cast<std::size_t>(split.k0));
  r.total = r.u_distance_L2 + r.vF_norm_H2;
  r.scale = (p.eps + (p.delta + p.eps) / (p.eps * split.gap)) * sobolev_norm(xi, 2);
  return r;
}

ResolventReport resolvent_bound_check(const ModelParams& p, const Grid& grid, double alpha,
                                      double beta) {
  if (alpha < 0 || alpha > 1 || beta < 0 || beta > 1) {
    throw ConfigError("resolvent check needs 0 <= alpha, beta <= 1");
  }
  ResolventReport r;
  const double D = p.eps * (p.d + p.delta);
  const double bound1 = alpha <= beta ? 1.0 : std::pow(p.eps, 2.0 * (beta - alpha));
  const double bound2 = std::pow(p.eps, 2.0 * (beta - alpha));
  const auto mu = grid.mu();
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double lam = mu[k];  // |lambda_k|
    if (k == 0 && alpha < beta) {
      r.skipped_mode0 = true;
      continue;
    }
    const double power = (k == 0 && alpha == beta) ? 1.0 : std::pow(lam, alpha - beta);
    const double denom = std::abs(-D * lam - 1.0);
    const double q1 = power / denom;
    const double q2 = D * lam * power / denom;
    if (q1 / bound1 > r.worst_ratio_first) {
      r.worst_ratio_first = q1 / bound1;
      r.worst_mode_first = k;
    }
    if (q2 / bound2 > r.worst_ratio_second) {
      r.worst_ratio_second = q2 / bound2;
      r.worst_mode_second = k;
    }
  }
  r.first_ok = r.worst_ratio_first <= 1.0;
  r.second_ok = r.worst_ratio_second <= 1.0;
  return r;
}

}  // namespace fastreact
