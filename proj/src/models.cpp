#include "fastreact/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fastreact/errors.hpp"
#include "fastreact/reduction.hpp"

namespace fastreact {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::linear ? "linear" : "nonlinear";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "nonlinear") return ModelKind::nonlinear;
  if (name == "linear") return ModelKind::linear;
  throw ConfigError("model.kind: expected 'nonlinear' or 'linear', got '" + std::string(name) + "'");
}

void ModelParams::validate() const {
  auto check = [](bool ok, const char* field, const char* rule, double value) {
    if (!ok) {
      throw ConfigError(std::string("model.") + field + ": " + rule + ", got " +
                        std::to_string(value));
    }
  };
  for (auto [name, value] : std::array<std::pair<const char*, double>, 8>{
           {{"d", d}, {"delta", delta}, {"eps", eps}, {"kappa", kappa}, {"a", a}, {"b", b},
            {"c", c}, {"L", L}}}) {
    check(std::isfinite(value), name, "must be finite", value);
  }
  check(d > 0, "d", "must be > 0", d);
  check(delta >= 0, "delta", "must be >= 0", delta);
  check(eps > 0, "eps", "must be > 0", eps);
  check(L > 0, "L", "must be > 0", L);
  if (kind == ModelKind::nonlinear) {
    // Zero values switch individual terms off (used for conservation and logistic checks).
    check(kappa >= 0, "kappa", "must be >= 0", kappa);
    check(a >= 0, "a", "must be >= 0", a);
    check(b >= 0, "b", "must be >= 0", b);
    check(c >= 0, "c", "must be >= 0", c);
  }
}

ReactionEval eval_reaction(const ModelParams& p, double x, double y) noexcept {
  ReactionEval r;
  if (p.kind == ModelKind::linear) {
    r.g = y - 2.0 * x;
    r.g1 = -2.0;
    r.g2 = 1.0;
    return r;
  }
  const double gap = y - x;
  const double logistic = p.a - p.b * x - p.c * y;
  r.f_tilde = gap * gap;
  r.g = -x + p.kappa * r.f_tilde;
  r.g1 = -1.0 - 2.0 * p.kappa * gap;
  r.g2 = 2.0 * p.kappa * gap;
  r.phi = logistic * x;
  r.psi = logistic * y;
  r.phi1 = p.a - 2.0 * p.b * x - p.c * y;
  r.phi2 = -p.c * x;
  r.psi1 = -p.b * y;
  r.psi2 = p.a - p.b * x - 2.0 * p.c * y;
  return r;
}

namespace {

// Gradient sup-norm of an affine-gradient map over [0, box]^2: attained at a corner.
template <class Grad>
double corner_sup(double box, Grad grad) {
  double best = 0.0;
  for (double x : {0.0, box}) {
    for (double y : {0.0, box}) {
      const auto [gx, gy] = grad(x, y);
      best = std::max(best, std::max(std::abs(gx), std::abs(gy)));
    }
  }
  return best;
}

}  // namespace

LipschitzConstants lipschitz_from_constants(const ModelParams& p, double c_star, double k_m,
                                            double k0) {
  LipschitzConstants lips;
  if (p.kind == ModelKind::linear) {
    lips.f = 0.5;
    return lips;
  }
  lips.f = p.kappa * 12.0 * c_star * k_m;
  lips.phi = corner_sup(k0, [&](double x, double y) {
    const auto r = eval_reaction(p, x, y);
    return std::pair{r.phi1, r.phi2};
  });
  lips.psi = corner_sup(k0, [&](double x, double y) {
    const auto r = eval_reaction(p, x, y);
    return std::pair{r.psi1, r.psi2};
  });
  return lips;
}

LipschitzConstants lipschitz_estimates(const ModelParams& p, double radius, std::uint64_t seed) {
  if (!(radius > 0)) throw ConfigError("radius M must be > 0");
  if (p.kind == ModelKind::linear) return lipschitz_from_constants(p, 0, 0, 0);
  const ConstantsReport constants = theoretical_constants(p, radius, seed);
  return lipschitz_from_constants(p, constants.C_star, constants.K_M, constants.K0);
}

double sup_abs_psi(const ModelParams& p, double box) {
  // psi = a y - b x y - c y^2 has no interior extremum away from y = 0; on the
  // edges x = 0 and x = box it is a downward parabola in y, and linear on y = box.
  std::vector<std::pair<double, double>> candidates = {{0, 0}, {0, box}, {box, 0}, {box, box}};
  if (p.c > 0) {
    for (double x : {0.0, box}) {
      const double y = (p.a - p.b * x) / (2.0 * p.c);
      if (y > 0 && y < box) candidates.emplace_back(x, y);
    }
  }
  double best = 0;
  for (auto [x, y] : candidates) best = std::max(best, std::abs(eval_reaction(p, x, y).psi));
  return best;
}

double sum_sup_abs_psi_partials(const ModelParams& p, double box) {
  double s1 = 0, s2 = 0;
  for (double x : {0.0, box}) {
    for (double y : {0.0, box}) {
      const auto r = eval_reaction(p, x, y);
      s1 = std::max(s1, std::abs(r.psi1));
      s2 = std::max(s2, std::abs(r.psi2));
    }
  }
  return s1 + s2;
}

}  // namespace fastreact
