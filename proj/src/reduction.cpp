#include "fastreact/reduction.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fastreact/errors.hpp"
#include "fastreact/integrator.hpp"

namespace fastreact {

namespace {

constexpr double kSignSlack = 1e-12;

// 4 kappa v^2 / (1 + sqrt(1 + 4 kappa v))^2, the same root as v + (1 - sqrt(1 + 4 kappa v))/(2 kappa)
// without the cancellation for small kappa v; also well defined at kappa = 0.
double critical_u_unchecked(double v, double kappa) {
  const double s = std::sqrt(std::max(0.0, 1.0 + 4.0 * kappa * v));
  const double denom = 1.0 + s;
  return 4.0 * kappa * v * v / (denom * denom);
}

void require_nonnegative(const SpectralField& w, const char* what) {
  const auto vals = w.values();
  for (std::size_t j = 0; j < vals.size(); ++j) {
    if (vals[j] < -kSignSlack) {
      throw DomainError(std::string(what) + " is negative at node " + std::to_string(j) + " (" +
                        std::to_string(vals[j]) + ")");
    }
  }
}

}  // namespace

double critical_u(double v, double kappa) {
  if (v < -kSignSlack) throw DomainError("critical map needs v >= 0, got " + std::to_string(v));
  return critical_u_unchecked(v, kappa);
}

SpectralField critical_map(const SpectralField& v, double kappa) {
  require_nonnegative(v, "v");
  return nonlinear_eval(v, [kappa](double x) { return critical_u_unchecked(x, kappa); });
}

SpectralField critical_map(const SpectralField& v, const ModelParams& p) {
  if (p.kind == ModelKind::linear) return 0.5 * v;
  return critical_map(v, p.kappa);
}

InitialLayer initial_layer(const SpectralField& u_in, const SpectralField& v_in, double kappa) {
  if (!(u_in.grid() == v_in.grid())) throw ShapeError("initial_layer: fields on different grids");
  const auto u = u_in.values();
  const auto v = v_in.values();
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] < -kSignSlack || v[j] < u[j] - kSignSlack) {
      throw DomainError("initial data must satisfy v_in >= u_in >= 0; violated at node " +
                        std::to_string(j));
    }
  }
  const SpectralField residual =
      nonlinear_eval(u_in, v_in, [kappa](double x, double y) { return -x + kappa * (y - x) * (y - x); });
  InitialLayer out{sobolev_norm(residual, 2), critical_map(v_in, kappa), std::nullopt};
  if (out.eps_in > 0) out.ratio = sobolev_norm(u_in - out.u0, 2) / out.eps_in;
  return out;
}

double sharp_embedding_constant(double L) {
  if (!(L > 0)) throw ConfigError("L must be > 0");
  return std::sqrt(1.0 / std::tanh(L));
}

double smoothing_constant_lower_bound(const ModelParams& p, std::uint64_t seed) {
  constexpr int kTrials = 200;
  constexpr int kBand = 16;
  constexpr int kTimes = 48;
  const double L = p.L;
  const double lambda1 = std::pow(std::numbers::pi / L, 2);
  // The t^{1/2} factor grows without bound on mode 1 for large t, so the search
  // runs up to the characteristic time of the first mode.
  const double t_lo = 1e-4 / (p.d * lambda1);
  const double t_hi = 1.0 / (p.d * lambda1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> c(kBand + 1);
  double best = 0.0;
  for (int trial = 0; trial < kTrials; ++trial) {
    for (double& ck : c) ck = normal(rng);
    double w2 = L * c[0] * c[0];
    for (int k = 1; k <= kBand; ++k) w2 += 0.5 * L * c[k] * c[k];
    for (int i = 0; i < kTimes; ++i) {
      const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (kTimes - 1));
      double s2 = 0.0;
      for (int k = 1; k <= kBand; ++k) {
        const double mu = std::pow(k * std::numbers::pi / L, 2);
        s2 += 0.5 * L * mu * std::exp(-2.0 * t * p.d * mu) * c[k] * c[k];
      }
      best = std::max(best, std::sqrt(s2 / w2) * std::sqrt(t) * std::exp(lambda1 * t));
    }
  }
  return best;
}

ConstantsReport theoretical_constants(const ModelParams& p, double M, std::uint64_t seed) {
  if (!(M > 0)) throw ConfigError("radius M must be > 0");
  const bool linear = p.kind == ModelKind::linear;
  if (!linear && !(p.c > 0)) throw ConfigError("model.c: constants chain needs c > 0");
  ConstantsReport r;
  const double L = p.L;
  const double sqrtL = std::sqrt(L);
  r.C_star = sharp_embedding_constant(L);
  r.lambda_1 = std::pow(std::numbers::pi / L, 2);
  r.C_HS = 1.5 * smoothing_constant_lower_bound(p, seed);
  const double smoothing = r.C_HS * std::sqrt(std::numbers::pi) / std::sqrt(r.lambda_1);
  r.K0 = r.C_star * M + (linear ? 0.0 : p.a / p.c);
  r.K1 = r.C_star * M + smoothing * sup_abs_psi(p, r.K0);
  r.K2 = M + 3.0 * smoothing * sum_sup_abs_psi_partials(p, r.K0) * sqrtL * r.K1;
  r.K_M = (2.0 * r.K0 + 3.0 * r.K1) * sqrtL + 3.0 * r.K2 + 2.0 * sqrtL * r.K1 * r.K1;
  r.kappa_bound = 1.0 / (12.0 * r.C_star * r.K_M);
  r.kappa_ok = p.kappa < r.kappa_bound;
  return r;
}

Trajectory solve_limit_system(const SpectralField& v_in, const ModelParams& p, double T, double dt,
                              double sample_interval) {
  p.validate();
  if (p.kind == ModelKind::nonlinear) require_nonnegative(v_in, "v_in");
  const Grid& grid = v_in.grid();
  const bool linear = p.kind == ModelKind::linear;
  const double diffusion = linear ? p.d + 0.5 * p.delta : p.d;

  std::vector<double> rates;
  for (double m : grid.mu()) rates.push_back(-diffusion * m);

  FieldMap source;
  if (linear) {
    source = [&grid](const SpectralField&) { return SpectralField(grid); };
  } else {
    source = [&p](const SpectralField& v) {
      return nonlinear_eval(v, [&p](double y) {
        return eval_reaction(p, critical_u_unchecked(y, p.kappa), y).psi;
      });
    };
  }
  auto lift = [&](const SpectralField& v, double t) {
    SpectralField u = linear ? 0.5 * v
                             : nonlinear_eval(v, [&p](double y) { return critical_u_unchecked(y, p.kappa); });
    return FastSlowState{std::move(u), v, t};
  };

  Trajectory traj;
  double m1 = 0, m2 = 0;
  auto record = [&](const FastSlowState& s) {
    const auto u = s.u.values();
    const auto v = s.v.values();
    for (std::size_t j = 0; j < u.size(); ++j) {
      m1 = std::max(m1, std::abs(u[j]));
      m2 = std::max(m2, std::abs(v[j] - u[j]));
    }
    traj.samples.push_back(s);
    traj.linf_u1.push_back(m1);
    traj.linf_u2.push_back(m2);
  };
  record(lift(v_in, 0.0));
  if (T == 0) return traj;

  const StepPlan plan = plan_steps(T, dt, sample_interval);
  const ScalarPropagator prop = scalar_propagator(rates, dt);
  SpectralField v = v_in;
  std::size_t step = 0;
  for (std::size_t i = 0; i < plan.samples; ++i) {
    for (std::size_t j = 0; j < plan.steps_per_sample; ++j) {
      v = etd_step(v, prop, source);
      ++step;
      check_finite(v, static_cast<double>(step) * dt, "limit v");
    }
    record(lift(v, static_cast<double>(step) * dt));
  }
  return traj;
}

}  // namespace fastreact
