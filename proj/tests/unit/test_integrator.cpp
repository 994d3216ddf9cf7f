#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <numbers>
#include <random>

#include "fastreact/errors.hpp"
#include "fastreact/expm.hpp"
#include "fastreact/integrator.hpp"
#include "fastreact/linear_manifold.hpp"

using namespace fastreact;
using std::numbers::pi;

namespace {

Eigen::Matrix2d to_eigen(const Mat2& m) {
  Eigen::Matrix2d e;
  e << m.a11, m.a12, m.a21, m.a22;
  return e;
}

// phi_j(A) from the exponential of the augmented block matrix [[A, I, 0], [0, 0, I], [0, 0, 0]].
Eigen::Matrix2d phi_oracle(int j, const Eigen::Matrix2d& A) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 6);
  B.block<2, 2>(0, 0) = A;
  B.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
  B.block<2, 2>(2, 4) = Eigen::Matrix2d::Identity();
  const Eigen::MatrixXd E = B.exp();
  if (j == 0) return E.block<2, 2>(0, 0);
  if (j == 1) return E.block<2, 2>(0, 2);
  return E.block<2, 2>(0, 4);
}

double max_diff(const Mat2& a, const Eigen::Matrix2d& b) {
  return (to_eigen(a) - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("scalar phi functions") {
  for (double z : {-30.0, -1.0, -0.3, -1e-9, 0.0, 1e-7, 0.4, 2.0}) {
    const double e1 = z == 0 ? 1.0 : std::expm1(z) / z;
    const double e2 = z == 0 ? 0.5 : (std::expm1(z) - z) / (z * z);
    CHECK(phi_fn(0, z) == doctest::Approx(std::exp(z)).epsilon(1e-14));
    if (std::abs(z) > 1e-3) {
      CHECK(phi_fn(1, z) == doctest::Approx(e1).epsilon(1e-13));
      CHECK(phi_fn(2, z) == doctest::Approx(e2).epsilon(1e-10));
    }
  }
  CHECK(phi_fn(1, 0.0) == 1.0);
  CHECK(phi_fn(2, 0.0) == 0.5);
  CHECK(phi_fn(2, 1e-8) == doctest::Approx(0.5 + 1e-8 / 6).epsilon(1e-15));
  const double h = 1e-5;
  for (double z : {-2.0, -0.2, 0.1}) {
    for (int j = 0; j <= 2; ++j) {
      CHECK(phi_fn_derivative(j, z) == doctest::Approx((phi_fn(j, z + h) - phi_fn(j, z - h)) / (2 * h)).epsilon(1e-7));
    }
  }
}

TEST_CASE("matrix phi functions against the Eigen exponential") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-3.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    // Lower-triangular (nonlinear kind) and coupled (linear kind) shapes, both with real spectra.
    Mat2 A{U(rng), 0.0, U(rng), U(rng)};
    if (t % 2) {
      ModelParams p;
      p.kind = ModelKind::linear;
      p.eps = 0.5 + 0.1 * U(rng);
      p.delta = std::abs(U(rng));
      A = mode_generator(p, 2.0 + U(rng)) * 0.3;
    }
    for (int j = 0; j <= 2; ++j) CHECK(max_diff(phi_matrix(j, A), phi_oracle(j, to_eigen(A))) < 1e-11);
  }
  // Repeated eigenvalue, defective.
  const Mat2 D{-1.0, 0.0, 1.0, -1.0};
  for (int j = 0; j <= 2; ++j) CHECK(max_diff(phi_matrix(j, D), phi_oracle(j, to_eigen(D))) < 1e-7);
  CHECK_THROWS_AS(real_eigenvalues(Mat2{0.0, 1.0, -1.0, 0.0}), DomainError);
}

TEST_CASE("mode propagators") {
  ModelParams p;
  p.kind = ModelKind::linear;
  p.eps = 0.1;
  p.delta = 0.1;
  const Grid g(pi, 16);
  const ModePropagator z = linear_propagator(p, g, 0.0);
  for (const auto& E : z.E) {
    CHECK(E.a11 == 1.0);
    CHECK(E.a12 == 0.0);
    CHECK(E.a21 == 0.0);
    CHECK(E.a22 == 1.0);
  }
  const auto ev = real_eigenvalues(mode_generator(p, 4.0));
  const ModeSpectrum s = mode_spectrum(p, 2);
  CHECK(s.Omega == doctest::Approx(2.000400).epsilon(1e-6));
  CHECK(ev[0] == doctest::Approx(s.slow_rate).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(s.fast_rate).epsilon(1e-12));

  ModelParams q = p;
  q.delta = 0.0;
  const ModePropagator pr = linear_propagator(q, g, 0.37);
  CHECK(pr.E[0].a21 == 0.0);
  CHECK(pr.E[0].a22 == 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Eigen::Matrix2d oracle = (0.37 * to_eigen(pr.generator[k])).exp();
    CHECK(max_diff(pr.E[k], oracle) < 1e-12);
  }
}

TEST_CASE("linear eigenvalues match the closed-form rates") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    ModelParams p;
    p.kind = ModelKind::linear;
    p.eps = 0.005 + 0.2 * U(rng);
    p.delta = 0.3 * U(rng);
    p.d = 0.2 + U(rng);
    const std::size_t k = 1 + static_cast<std::size_t>(10 * U(rng));
    const ModeSpectrum s = mode_spectrum(p, k);
    const auto ev = real_eigenvalues(mode_generator(p, s.mu));
    CHECK(ev[0] == doctest::Approx(s.slow_rate).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(s.fast_rate).epsilon(1e-12));
  }
}

TEST_CASE("one linear step is exact") {
  ModelParams p;
  p.kind = ModelKind::linear;
  p.eps = 0.05;
  p.delta = 0.02;
  const Grid g(pi, 16);
  SpectralField u(g), v(g);
  for (std::size_t k = 0; k < 8; ++k) {
    u[k] = std::sin(1.0 + k);
    v[k] = std::cos(2.0 + k);
  }
  for (double dt : {0.001, 0.3, 2.0}) {
    const FastSlowState s = etd_step({u, v, 0.0}, p, dt);
    CHECK(s.t == doctest::Approx(dt));
    for (std::size_t k = 0; k < g.size(); ++k) {
      const ModeSolution ex = closed_form_solution(u[k], v[k], p, k, dt);
      CHECK(std::abs(s.u[k] - ex.u) < 1e-12);
      CHECK(std::abs(s.v[k] - ex.v) < 1e-12);
    }
  }
}

TEST_CASE("zero state stays zero") {
  ModelParams p;
  p.a = 2.0;
  p.b = 0.5;
  p.c = 3.0;
  const Grid g(pi, 16);
  const FastSlowState s = etd_step({SpectralField(g), SpectralField(g), 0.0}, p, 0.004);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(s.u[k] == 0.0);
    CHECK(s.v[k] == 0.0);
  }
}

TEST_CASE("second-order self-convergence on the nonlinear kind") {
  ModelParams p;
  p.eps = 0.05;
  p.delta = 0.01;
  const Grid g(pi, 32);
  const SpectralField u0 = SpectralField::from_function(g, [](double x) { return 0.2 + 0.1 * std::cos(x); });
  const SpectralField v0 = SpectralField::from_function(g, [](double x) { return 0.8 + 0.3 * std::cos(x); });
  const double T = 0.2;
  auto run = [&](double dt) { return simulate({u0, v0, 0.0}, p, T, dt, T).samples.back(); };
  const double dt = 0.01;
  const FastSlowState ref = run(dt / 16);
  auto err = [&](const FastSlowState& s) { return sobolev_norm(s.u - ref.u, 0) + sobolev_norm(s.v - ref.v, 0); };
  const double e1 = err(run(dt)), e2 = err(run(dt / 2));
  const double order = std::log2(e1 / e2);
  MESSAGE("error ratio " << e1 / e2 << ", order " << order);
  CHECK(order >= 1.7);
  CHECK(order <= 2.3);
}

TEST_CASE("simulation bookkeeping") {
  ModelParams p;
  const Grid g(pi, 16);
  const SpectralField u0 = SpectralField::from_function(g, [](double) { return 0.1; });
  const SpectralField v0 = SpectralField::from_function(g, [](double) { return 0.5; });
  const Trajectory zero = simulate({u0, v0, 0.0}, p, 0.0, 0.001, 0.1);
  CHECK(zero.samples.size() == 1);
  const Trajectory tr = simulate({u0, v0, 0.0}, p, 0.1, 0.001, 0.02);
  CHECK(tr.samples.size() == 6);
  CHECK(tr.times().back() == doctest::Approx(0.1));
  CHECK(tr.linf_u1.size() == tr.samples.size());
  for (std::size_t i = 1; i < tr.linf_u1.size(); ++i) CHECK(tr.linf_u1[i] >= tr.linf_u1[i - 1]);
  CHECK_THROWS_AS(simulate({u0, v0, 0.0}, p, 0.1, 0.003, 0.02), ConfigError);
  CHECK_THROWS_AS(etd_step({u0, v0, 0.0}, p, 0.02), ConfigError);
  CHECK(default_dt(p, 1.0) == doctest::Approx(0.001));
  CHECK(default_dt(p, 100.0) == doctest::Approx(0.005));
}

TEST_CASE("divergence carries the failure time") {
  SpectralField w(Grid(pi, 8));
  w[1] = std::nan("");
  try {
    check_finite(w, 0.25, "u");
    FAIL("expected a divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time() == 0.25);
  }
  w[1] = 1e9;
  CHECK_THROWS_AS(check_finite(w, 0.0, "u"), DivergenceError);
}
