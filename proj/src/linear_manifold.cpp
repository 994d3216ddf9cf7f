#include "fastreact/linear_manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fastreact/errors.hpp"

namespace fastreact {

ModeSpectrum mode_spectrum(const ModelParams& p, std::size_t k) {
  if (p.kind != ModelKind::linear) throw ConfigError("model.kind: mode spectrum needs the linear kind");
  ModeSpectrum s;
  s.k = k;
  const double wave = static_cast<double>(k) * std::numbers::pi / p.L;
  s.mu = wave * wave;
  const double edm = p.eps * p.delta * s.mu;
  s.Omega = std::sqrt(edm * edm + 4.0);
  const double omega_minus_two = edm * edm / (s.Omega + 2.0);
  s.w_plus = omega_minus_two - p.eps * (2.0 * p.d + p.delta) * s.mu;
  s.w_minus = -s.Omega - p.eps * (2.0 * p.d + p.delta) * s.mu - 2.0;
  s.slow_rate = s.w_plus / (2.0 * p.eps);
  s.fast_rate = s.w_minus / (2.0 * p.eps);
  s.slope = 2.0 / (s.Omega + edm + 2.0);
  s.asymptotic_slow_rate =
      -(2.0 * p.d + p.delta) * s.mu / 2.0 + p.eps * p.delta * p.delta * s.mu * s.mu / 8.0;
  s.regime_ok = edm <= 0.1;
  return s;
}

ModeSolution closed_form_solution(double u0, double v0, const ModelParams& p, std::size_t k,
                                  double t) {
  if (t < 0) throw ConfigError("closed form needs t >= 0");
  const ModeSpectrum s = mode_spectrum(p, k);
  const double edm = p.eps * p.delta * s.mu;
  const double Om = s.Omega;
  const double ep = std::exp(t * s.w_plus / (2.0 * p.eps));
  const double em = std::exp(t * s.w_minus / (2.0 * p.eps));
  ModeSolution out;
  out.u = 0.5 / Om * ((Om - edm - 2.0) * ep + (Om + edm + 2.0) * em) * u0 + (ep - em) / Om * v0;
  out.v = edm / Om * (em - ep) * u0 + 0.5 / Om * ((Om + edm + 2.0) * ep - (-Om + edm + 2.0) * em) * v0;
  out.v_limit = std::exp(-t * (2.0 * p.d + p.delta) * s.mu / 2.0) * v0;
  return out;
}

std::vector<ModeInvariance> invariance_and_distance(const ModelParams& p,
                                                    std::span<const std::size_t> modes, double T,
                                                    std::size_t time_points) {
  if (!(T >= 0)) throw ConfigError("T must be >= 0");
  if (time_points < 2) throw ConfigError("need at least two time points");
  std::vector<ModeInvariance> report;
  for (std::size_t k : modes) {
    const ModeSpectrum s = mode_spectrum(p, k);
    ModeInvariance r;
    r.k = k;
    r.slope = s.slope;
    r.regime_ok = s.regime_ok;
    r.fast_rate = s.fast_rate;

    for (std::size_t i = 0; i < time_points; ++i) {
      const double t = T * static_cast<double>(i) / static_cast<double>(time_points - 1);
      const ModeSolution sol = closed_form_solution(s.slope, 1.0, p, k, t);
      double defect;
      if (std::abs(sol.v) < 1e-8) {
        defect = std::abs(sol.u - s.slope * sol.v);
        r.used_affine = true;
      } else {
        defect = std::abs(sol.u / sol.v - s.slope);
      }
      r.invariance_defect = std::max(r.invariance_defect, defect);
    }

    const double edm = p.eps * p.delta * s.mu;
    r.slope_distance = std::abs(s.slope - 0.5);
    r.distance_bound = edm / 4.0;
    r.bound_applies = edm <= 1.0;

    // Least-squares slope of log|u - slope v| against t.
    const double t_fit = 5.0 * p.eps;
    constexpr int kFit = 51;
    double st = 0, sy = 0, stt = 0, sty = 0;
    int used = 0;
    for (int i = 0; i < kFit; ++i) {
      const double t = t_fit * i / (kFit - 1);
      const ModeSolution sol = closed_form_solution(s.slope + 1.0, 1.0, p, k, t);
      const double d = std::abs(sol.u - s.slope * sol.v);
      if (!(d > 1e-280)) continue;
      const double y = std::log(d);
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
      ++used;
    }
    if (used >= 2) {
      r.fitted_attraction_rate = (used * sty - st * sy) / (used * stt - st * st);
      r.attraction_rel_error = std::abs(r.fitted_attraction_rate - s.fast_rate) / std::abs(s.fast_rate);
    }
    report.push_back(r);
  }
  return report;
}

}  // namespace fastreact
