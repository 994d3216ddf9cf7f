#include "fastreact/rates.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "fastreact/errors.hpp"
#include "fastreact/integrator.hpp"
#include "fastreact/reduction.hpp"

namespace fastreact {

ErrorNorms trajectory_error_norms(const Trajectory& fast, const Trajectory& limit, double t_skip) {
  const auto& a = fast.samples;
  const auto& b = limit.samples;
  if (a.size() != b.size()) {
    throw ShapeError("trajectories have " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()) + " samples");
  }
  ErrorNorms e;
  if (a.empty()) return e;
  const double scale = std::max(1.0, std::abs(a.back().t));
  std::vector<double> h1sq(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].t - b[i].t) > 1e-12 * scale) throw ShapeError("sample times differ");
    if (!(a[i].u.grid() == b[i].u.grid())) throw ShapeError("trajectories live on different grids");
    const SpectralField U = a[i].u - b[i].u;
    const SpectralField V = a[i].v - b[i].v;
    const double l2 = sobolev_norm(U, 0) + sobolev_norm(V, 0);
    const double h2 = sobolev_norm(U, 2) + sobolev_norm(V, 2);
    h1sq[i] = std::pow(sobolev_norm(U, 1), 2) + std::pow(sobolev_norm(V, 1), 2);
    e.LinfL2 = std::max(e.LinfL2, l2);
    e.LinfH2 = std::max(e.LinfH2, h2);
    if (a[i].t >= t_skip - 1e-12 * scale) {
      e.LinfL2_post = std::max(e.LinfL2_post, l2);
      e.LinfH2_post = std::max(e.LinfH2_post, h2);
    }
  }
  double full = 0, post = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double dt = a[i + 1].t - a[i].t;
    const double piece = 0.5 * dt * (h1sq[i] + h1sq[i + 1]);
    full += piece;
    if (a[i].t >= t_skip - 1e-12 * scale) post += piece;
  }
  e.L2H1 = std::sqrt(full);
  e.L2H1_post = std::sqrt(post);
  return e;
}

OrderFit fit_order(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("fit_order: x and y differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0 && y[i] > 0 && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  OrderFit fit;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (lx.size() < 2) return {nan, nan, nan};
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0) return {nan, nan, nan};
  fit.order = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.order * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.order * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

double layer_residual(const ModelParams& p, const SpectralField& u, const SpectralField& v) {
  const SpectralField g =
      nonlinear_eval(u, v, [&p](double x, double y) { return eval_reaction(p, x, y).g; });
  return sobolev_norm(g, 2);
}

SpectralField perturbed_initial_u(const ModelParams& p, const SpectralField& v_in, double eps_in) {
  if (!(eps_in >= 0)) throw ConfigError("initial.eps_in: must be >= 0");
  const SpectralField h = critical_map(v_in, p);
  const Grid& grid = v_in.grid();
  const auto hv = h.values();
  const auto vv = v_in.values();
  double room = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < hv.size(); ++j) room = std::min(room, vv[j] - hv[j]);
  SpectralField one(grid);
  one[0] = 1.0;
  auto residual = [&](double s) { return layer_residual(p, h + s * one, v_in); };
  if (eps_in == 0) return h;
  if (!(room > 0) || residual(room) < eps_in) {
    throw ConfigError("initial.eps_in: " + std::to_string(eps_in) +
                      " is not reachable with a constant shift keeping u_in <= v_in");
  }
  double lo = 0, hi = room;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * room; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < eps_in ? lo : hi) = mid;
  }
  return h + 0.5 * (lo + hi) * one;
}

namespace {

ConvergenceRow run_one(const ConvergenceConfig& cfg, double eps) {
  ConvergenceRow row;
  row.eps = eps;
  row.delta = cfg.delta_fixed ? *cfg.delta_fixed : std::pow(eps, cfg.delta_exponent);
  const auto start = std::chrono::steady_clock::now();
  try {
    ModelParams p = cfg.base;
    p.eps = eps;
    p.delta = row.delta;
    p.validate();
    const Grid grid(p.L, cfg.N);
    const SpectralField v0 = SpectralField::from_function(grid, cfg.v_in);
    SpectralField u0(grid);
    switch (cfg.preparation) {
      case Preparation::well_prepared: u0 = critical_map(v0, p); break;
      case Preparation::perturbed: u0 = perturbed_initial_u(p, v0, cfg.eps_in_target); break;
      case Preparation::given: u0 = SpectralField::from_function(grid, cfg.u_in); break;
    }
    row.eps_in = layer_residual(p, u0, v0);

    const double interval = cfg.T / static_cast<double>(cfg.sample_intervals);
    const double dt0 = cfg.dt ? *cfg.dt : default_dt(p, cfg.T);
    const double dt = interval / std::ceil(interval / dt0 - 1e-12);
    const Trajectory fast = simulate(FastSlowState{u0, v0, 0.0}, p, cfg.T, dt, interval);
    const Trajectory limit = solve_limit_system(v0, p, cfg.T, dt, interval);
    row.errors = trajectory_error_norms(fast, limit, cfg.t_skip_factor * eps);
  } catch (const std::exception& e) {
    row.ok = false;
    row.failure = e.what();
  }
  if (cfg.timing) {
    row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

}  // namespace

ConvergenceReport convergence_study(const ConvergenceConfig& cfg) {
  if (cfg.eps_list.empty()) throw ConfigError("study.eps: list is empty");
  for (std::size_t i = 1; i < cfg.eps_list.size(); ++i) {
    if (!(cfg.eps_list[i] < cfg.eps_list[i - 1])) throw ConfigError("study.eps: must be decreasing");
  }
  if (!cfg.v_in) throw ConfigError("initial.v: missing");
  if (cfg.preparation == Preparation::given && !cfg.u_in) throw ConfigError("initial.u: missing");
  if (!(cfg.T > 0)) throw ConfigError("time.T: must be > 0");
  if (cfg.sample_intervals == 0) throw ConfigError("time.samples: must be >= 1");

  ConvergenceReport rep;
  rep.rows.resize(cfg.eps_list.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.eps_list.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.eps_list.size(); i = next++) {
      rep.rows[i] = run_one(cfg, cfg.eps_list[i]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<double> e, l2, h1, h2, l2p, h1p, h2p;
  for (const auto& r : rep.rows) {
    if (!r.ok) continue;
    e.push_back(r.eps);
    l2.push_back(r.errors.LinfL2);
    h1.push_back(r.errors.L2H1);
    h2.push_back(r.errors.LinfH2);
    l2p.push_back(r.errors.LinfL2_post);
    h1p.push_back(r.errors.L2H1_post);
    h2p.push_back(r.errors.LinfH2_post);
  }
  rep.order_LinfL2 = fit_order(e, l2);
  rep.order_L2H1 = fit_order(e, h1);
  rep.order_LinfH2 = fit_order(e, h2);
  rep.order_LinfL2_post = fit_order(e, l2p);
  rep.order_L2H1_post = fit_order(e, h1p);
  rep.order_LinfH2_post = fit_order(e, h2p);
  rep.fit_residual = std::max({rep.order_LinfL2.residual, rep.order_L2H1.residual,
                               rep.order_LinfH2.residual});
  if (l2.size() >= 2) rep.plateau = l2.back() >= 0.9 * l2[l2.size() - 2];
  return rep;
}

}  // namespace fastreact
