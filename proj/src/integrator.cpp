#include "fastreact/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastreact/errors.hpp"

namespace fastreact {

Mat2 mode_generator(const ModelParams& p, double mu) {
  const double fast = -(p.d + p.delta) * mu;
  if (p.kind == ModelKind::linear) return {fast - 2.0 / p.eps, 1.0 / p.eps, -p.delta * mu, -p.d * mu};
  return {fast - 1.0 / p.eps, 0.0, -p.delta * mu, -p.d * mu};
}

ModePropagator linear_propagator(const ModelParams& p, const Grid& grid, double dt) {
  if (!(dt >= 0) || !std::isfinite(dt)) throw ConfigError("time.dt: must be >= 0");
  ModePropagator prop;
  prop.dt = dt;
  const auto mu = grid.mu();
  for (double m : mu) {
    const Mat2 M = mode_generator(p, m);
    const Mat2 A = M * dt;
    prop.generator.push_back(M);
    prop.E.push_back(phi_matrix(0, A));
    prop.W1.push_back(phi_matrix(1, A) * dt);
    prop.W2.push_back(phi_matrix(2, A) * dt);
  }
  return prop;
}

ScalarPropagator scalar_propagator(std::span<const double> rates, double dt) {
  ScalarPropagator prop;
  prop.dt = dt;
  for (double r : rates) {
    const double z = r * dt;
    prop.E.push_back(std::exp(z));
    prop.W1.push_back(dt * phi_fn(1, z));
    prop.W2.push_back(dt * phi_fn(2, z));
  }
  return prop;
}

SpectralField etd_step(const SpectralField& w, const ScalarPropagator& prop, const FieldMap& N) {
  if (prop.E.size() != w.size()) throw ShapeError("scalar propagator size does not match field");
  const SpectralField nw = N(w);
  SpectralField a(w.grid());
  for (std::size_t k = 0; k < w.size(); ++k) a[k] = prop.E[k] * w[k] + prop.W1[k] * nw[k];
  const SpectralField na = N(a);
  for (std::size_t k = 0; k < w.size(); ++k) a[k] += prop.W2[k] * (na[k] - nw[k]);
  return a;
}

double default_dt(const ModelParams& p, double T) {
  return T > 0 ? std::min(0.5 * p.eps, T / 1000.0) : 0.5 * p.eps;
}

namespace {

struct Remainder {
  SpectralField u, v;
};

// Dealiased (kappa f~/eps + phi, psi), both components from one pair of padded transforms.
Remainder remainder(const FastSlowState& s, const ModelParams& p) {
  const Grid& grid = s.u.grid();
  const std::size_t m = grid.padded_size();
  std::vector<double> pu(m), pv(m);
  grid.inverse_padded(s.u.coeffs(), pu);
  grid.inverse_padded(s.v.coeffs(), pv);
  const double inv_eps = 1.0 / p.eps;
  for (std::size_t j = 0; j < m; ++j) {
    const ReactionEval r = eval_reaction(p, pu[j], pv[j]);
    pu[j] = p.kappa * r.f_tilde * inv_eps + r.phi;
    pv[j] = r.psi;
  }
  Remainder out{SpectralField(grid), SpectralField(grid)};
  grid.forward_padded(pu, out.u.coeffs());
  grid.forward_padded(pv, out.v.coeffs());
  return out;
}

void require_shape(const FastSlowState& s, const ModePropagator& prop) {
  if (!(s.u.grid() == s.v.grid())) throw ShapeError("state components live on different grids");
  if (prop.E.size() != s.u.size()) throw ShapeError("propagator size does not match state");
}

}  // namespace

void check_finite(const SpectralField& w, double t, const char* name) {
  for (double c : w.coeffs()) {
    if (!std::isfinite(c) || std::abs(c) > 1e8) {
      throw DivergenceError(std::string(name) + " diverged at t = " + std::to_string(t), t);
    }
  }
}

FastSlowState etd_step(const FastSlowState& s, const ModelParams& p, const ModePropagator& prop) {
  require_shape(s, prop);
  const std::size_t n = s.u.size();
  FastSlowState next{s.u, s.v, s.t + prop.dt};
  if (p.kind == ModelKind::linear) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto [u, v] = prop.E[k].apply(s.u[k], s.v[k]);
      next.u[k] = u;
      next.v[k] = v;
    }
  } else {
    const Remainder n0 = remainder(s, p);
    for (std::size_t k = 0; k < n; ++k) {
      const auto [eu, ev] = prop.E[k].apply(s.u[k], s.v[k]);
      const auto [wu, wv] = prop.W1[k].apply(n0.u[k], n0.v[k]);
      next.u[k] = eu + wu;
      next.v[k] = ev + wv;
    }
    const Remainder n1 = remainder(next, p);
    for (std::size_t k = 0; k < n; ++k) {
      const auto [cu, cv] = prop.W2[k].apply(n1.u[k] - n0.u[k], n1.v[k] - n0.v[k]);
      next.u[k] += cu;
      next.v[k] += cv;
    }
  }
  check_finite(next.u, next.t, "u");
  check_finite(next.v, next.t, "v");
  return next;
}

namespace {
void check_dt(const ModelParams& p, double dt, const StepOptions& opt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("time.dt: must be > 0");
  if (p.kind == ModelKind::nonlinear && dt > opt.dt_factor * p.eps * (1 + 1e-12)) {
    throw ConfigError("time.dt: nonlinear kind needs dt <= " + std::to_string(opt.dt_factor) +
                      " * eps, got dt = " + std::to_string(dt));
  }
}
}  // namespace

FastSlowState etd_step(const FastSlowState& s, const ModelParams& p, double dt,
                       const StepOptions& opt) {
  check_dt(p, dt, opt);
  return etd_step(s, p, linear_propagator(p, s.u.grid(), dt));
}

StepPlan plan_steps(double T, double dt, double sample_every) {
  if (!(T >= 0) || !std::isfinite(T)) throw ConfigError("time.T: must be >= 0");
  if (!(dt > 0)) throw ConfigError("time.dt: must be > 0");
  if (!(sample_every > 0)) throw ConfigError("time.sample_every: must be > 0");
  const double per = std::round(sample_every / dt);
  if (per < 1 || std::abs(per * dt - sample_every) > 1e-9 * sample_every) {
    throw ConfigError("time.dt: must divide time.sample_every");
  }
  const double samples = std::round(T / sample_every);
  if (std::abs(samples * sample_every - T) > 1e-9 * std::max(T, sample_every)) {
    throw ConfigError("time.sample_every: must divide time.T");
  }
  return {static_cast<std::size_t>(per), static_cast<std::size_t>(samples)};
}

namespace {
void track_bounds(const FastSlowState& s, double& m1, double& m2) {
  const auto u = s.u.values();
  const auto v = s.v.values();
  for (std::size_t j = 0; j < u.size(); ++j) {
    m1 = std::max(m1, std::abs(u[j]));
    m2 = std::max(m2, std::abs(v[j] - u[j]));
  }
}
}  // namespace

Trajectory simulate(const FastSlowState& s0, const ModelParams& p, double T, double dt,
                    double sample_every, const StepOptions& opt) {
  p.validate();
  if (!(s0.u.grid() == s0.v.grid())) throw ShapeError("state components live on different grids");
  Trajectory traj;
  double m1 = 0, m2 = 0;
  track_bounds(s0, m1, m2);
  traj.samples.push_back(s0);
  traj.linf_u1.push_back(m1);
  traj.linf_u2.push_back(m2);
  if (T == 0) return traj;
  check_dt(p, dt, opt);
  const StepPlan plan = plan_steps(T, dt, sample_every);
  const ModePropagator prop = linear_propagator(p, s0.u.grid(), dt);
  FastSlowState s = s0;
  const double t0 = s0.t;
  std::size_t step = 0;
  for (std::size_t i = 0; i < plan.samples; ++i) {
    for (std::size_t j = 0; j < plan.steps_per_sample; ++j) {
      s = etd_step(s, p, prop);
      ++step;
      s.t = t0 + static_cast<double>(step) * dt;
      track_bounds(s, m1, m2);
    }
    traj.samples.push_back(s);
    traj.linf_u1.push_back(m1);
    traj.linf_u2.push_back(m2);
  }
  return traj;
}

}  // namespace fastreact
