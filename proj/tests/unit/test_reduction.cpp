#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fastreact/errors.hpp"
#include "fastreact/rates.hpp"
#include "fastreact/reduction.hpp"

using namespace fastreact;
using std::numbers::pi;

TEST_CASE("critical map values") {
  CHECK(critical_u(2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(critical_u(0.0, 1.0) == 0.0);
  CHECK(critical_u(3.0, 0.25) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(critical_u(5.0, 0.0) == 0.0);
  CHECK_THROWS_AS(critical_u(-1e-6, 1.0), DomainError);
  CHECK_NOTHROW(critical_u(-1e-13, 1.0));
}

TEST_CASE("critical map is a monotone root of g") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.0, 10.0);
  for (double kappa : {0.1, 1.0, 4.0}) {
    double prev_v = -1, prev_u = -1;
    std::vector<double> vs(200);
    for (auto& v : vs) v = U(rng);
    std::sort(vs.begin(), vs.end());
    for (double v : vs) {
      const double u = critical_u(v, kappa);
      CHECK(std::abs(-u + kappa * (v - u) * (v - u)) < 1e-12 * std::max(1.0, v));
      if (prev_v >= 0) CHECK(u >= prev_u);
      prev_v = v;
      prev_u = u;
    }
  }
}

TEST_CASE("field critical map and sign check") {
  const Grid g(pi, 32);
  const SpectralField v = SpectralField::from_function(g, [](double x) { return 1.0 + 0.5 * std::cos(x); });
  const SpectralField u = critical_map(v, 1.0);
  const auto uv = u.values(), vv = v.values();
  for (std::size_t j = 0; j < uv.size(); ++j) CHECK(uv[j] == doctest::Approx(critical_u(vv[j], 1.0)).epsilon(1e-6));
  const SpectralField neg = SpectralField::from_function(g, [](double x) { return std::cos(x); });
  CHECK_THROWS_AS(critical_map(neg, 1.0), DomainError);
  ModelParams lin;
  lin.kind = ModelKind::linear;
  const SpectralField half = critical_map(neg, lin);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(half[k] == doctest::Approx(0.5 * neg[k]));
}

TEST_CASE("initial layer examples") {
  const Grid g(pi, 32);
  const SpectralField v = SpectralField::from_function(g, [](double x) { return 0.8 + 0.3 * std::cos(2 * x); });
  CHECK(initial_layer(critical_map(v, 1.0), v, 1.0).eps_in <= 1e-10);

  const SpectralField zero(g);
  const SpectralField one = SpectralField::from_function(g, [](double) { return 1.0; });
  const InitialLayer l = initial_layer(zero, one, 1.0);
  CHECK(l.eps_in == doctest::Approx(std::sqrt(pi)).epsilon(1e-12));
  REQUIRE(l.ratio.has_value());

  const SpectralField two = SpectralField::from_function(g, [](double) { return 2.0; });
  CHECK(initial_layer(one, two, 1.0).eps_in <= 1e-10);
  CHECK_THROWS_AS(initial_layer(two, one, 1.0), DomainError);
}

TEST_CASE("initial layer ratio stays bounded") {
  const Grid g(pi, 32);
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  ModelParams p;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const double m = 0.3 + 0.1 * U(rng), a1 = 0.1 * U(rng), a2 = 0.05 * U(rng);
    const SpectralField v = SpectralField::from_function(
        g, [&](double x) { return m + a1 * std::cos(x) + a2 * std::cos(2 * x); });
    const SpectralField u = perturbed_initial_u(p, v, 0.05 + 0.02 * std::abs(U(rng)));
    const InitialLayer l = initial_layer(u, v, p.kappa);
    REQUIRE(l.ratio.has_value());
    worst = std::max(worst, *l.ratio);
  }
  MESSAGE("max ratio " << worst);
  CHECK(worst <= 10.0);
}

TEST_CASE("theoretical constants") {
  CHECK(sharp_embedding_constant(pi) == doctest::Approx(1.00187).epsilon(1e-5));
  ModelParams p;
  const ConstantsReport c = theoretical_constants(p, 1.0, 3);
  CHECK(c.C_star == doctest::Approx(std::sqrt(1.0 / std::tanh(pi))));
  CHECK(c.K0 == doctest::Approx(2.00187).epsilon(1e-5));
  CHECK(c.lambda_1 == doctest::Approx(1.0));
  CHECK(c.C_HS > 0);
  CHECK(c.kappa_bound == doctest::Approx(1.0 / (12 * c.C_star * c.K_M)));
  CHECK(c.kappa_ok == (p.kappa < c.kappa_bound));
  CHECK_FALSE(c.kappa_ok);
  p.kappa = 0.5 * c.kappa_bound;
  CHECK(theoretical_constants(p, 1.0, 3).kappa_ok);
  // Same seed, same estimate.
  CHECK(theoretical_constants(p, 1.0, 3).C_HS == c.C_HS);
  CHECK_THROWS_AS(theoretical_constants(p, 0.0, 3), ConfigError);
}

TEST_CASE("smoothing constant lower bound respects the modal ceiling") {
  ModelParams p;
  // Per mode the ratio is sqrt(mu_k t) e^{-(mu_k - lambda_1) t}; on t <= 1 its max is 1,
  // reached by mode 1 at t = 1, so any mixture stays at or below 1.
  const double lb = smoothing_constant_lower_bound(p, 5);
  CHECK(lb > 0.3);
  CHECK(lb <= 1.0 + 1e-12);
}

TEST_CASE("limit system") {
  ModelParams p;
  const Grid g(pi, 32);
  const SpectralField zero(g);
  const Trajectory tr = solve_limit_system(zero, p, 1.0, 1e-3, 0.1);
  CHECK(tr.samples.size() == 11);
  for (const auto& s : tr.samples) {
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(s.v[k] == 0.0);
  }

  p.b = 0.0;
  const double c0 = 0.2;
  const SpectralField cst = SpectralField::from_function(g, [c0](double) { return c0; });
  const Trajectory lg = solve_limit_system(cst, p, 1.0, 1e-4, 1.0);
  const double exact = c0 * std::exp(1.0) / (1 - c0 + c0 * std::exp(1.0));
  CHECK(std::abs(lg.samples.back().v[0] - exact) < 1e-8);

  ModelParams q;
  const SpectralField v = SpectralField::from_function(g, [](double x) { return 0.5 + 0.5 * std::cos(x); });
  const Trajectory b = solve_limit_system(v, q, 1.0, 1e-3, 0.05);
  for (const auto& s : b.samples) {
    const auto vals = s.v.values();
    const auto uvals = s.u.values();
    for (std::size_t j = 0; j < vals.size(); ++j) {
      CHECK(vals[j] <= 1.0 + q.a / q.c + 1e-8);
      CHECK(vals[j] >= -1e-8);
      CHECK(uvals[j] <= vals[j] + 1e-8);
    }
  }

  ModelParams lin;
  lin.kind = ModelKind::linear;
  lin.delta = 0.2;
  const SpectralField w = SpectralField::from_function(g, [](double x) { return std::cos(2 * x); });
  const Trajectory l = solve_limit_system(w, lin, 0.5, 0.01, 0.5);
  CHECK(l.samples.back().v[2] == doctest::Approx(std::exp(-0.5 * (1 + 0.1) * 4)).epsilon(1e-12));
  CHECK(l.samples.back().u[2] == doctest::Approx(0.5 * l.samples.back().v[2]));
}
