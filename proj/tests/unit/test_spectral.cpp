#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fastreact/errors.hpp"
#include "fastreact/spectral.hpp"

using namespace fastreact;
using std::numbers::pi;

TEST_CASE("grid nodes and eigenvalues") {
  const Grid g = build_grid(pi, 8);
  for (std::size_t j = 0; j < 8; ++j) CHECK(g.nodes()[j] == doctest::Approx(pi * (j + 0.5) / 8).epsilon(1e-15));
  for (std::size_t k = 0; k < 8; ++k) CHECK(g.mu(k) == doctest::Approx(double(k * k)).epsilon(1e-14));
  const Grid g2(2 * pi, 8);
  for (std::size_t k = 0; k < 8; ++k) CHECK(g2.mu(k) == doctest::Approx(k * k / 4.0).epsilon(1e-14));
  CHECK(g.max_mode() == 7);
  CHECK(g.padded_size() == 12);
}

TEST_CASE("grid rejects bad sizes") {
  CHECK_THROWS_AS(Grid(pi, 7), ConfigError);
  CHECK_THROWS_AS(Grid(pi, 4), ConfigError);
  CHECK_THROWS_AS(Grid(0.0, 8), ConfigError);
  CHECK_THROWS_AS(Grid(-1.0, 16), ConfigError);
}

TEST_CASE("laplacian symbol") {
  const Grid g(pi, 8);
  CHECK(laplacian_symbol(g, 3) == doctest::Approx(-9.0));
  CHECK(laplacian_symbol(g, 0) == 0.0);
  const Grid g2(2 * pi, 8);
  CHECK(laplacian_symbol(g2, 4) == doctest::Approx(-4.0));
  CHECK_THROWS(laplacian_symbol(g, 8));
}

TEST_CASE("forward transform of basis functions") {
  const Grid g(pi, 16);
  auto check_coeffs = [&](const std::function<double(double)>& f, std::vector<std::pair<std::size_t, double>> expect) {
    const SpectralField w = SpectralField::from_function(g, f);
    for (std::size_t k = 0; k < g.size(); ++k) {
      double e = 0;
      for (auto [m, v] : expect) if (m == k) e = v;
      CHECK(std::abs(w[k] - e) < 1e-13);
    }
  };
  check_coeffs([](double x) { return std::cos(2 * x); }, {{2, 1.0}});
  check_coeffs([](double) { return 1.0; }, {{0, 1.0}});
  check_coeffs([](double x) { return std::cos(x) * std::cos(x); }, {{0, 0.5}, {2, 0.5}});
}

TEST_CASE("transform round trip and length checks") {
  const Grid g(1.7, 32);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> vals(32);
  for (auto& x : vals) x = n(rng);
  const auto c = cosine_transform(g, vals, Direction::forward);
  const auto back = cosine_transform(g, c, Direction::inverse);
  for (std::size_t j = 0; j < 32; ++j) CHECK(std::abs(back[j] - vals[j]) < 1e-13);
  std::vector<double> wrong(31);
  CHECK_THROWS_AS(cosine_transform(g, wrong, Direction::forward), ShapeError);
}

TEST_CASE("point evaluation matches node values") {
  const Grid g(pi, 16);
  const SpectralField w = SpectralField::from_function(g, [](double x) { return 0.3 + std::cos(3 * x); });
  for (double x : {0.0, 0.4, 2.9, pi}) CHECK(w.evaluate(x) == doctest::Approx(0.3 + std::cos(3 * x)).epsilon(1e-12));
}

TEST_CASE("sobolev norms") {
  const Grid g(pi, 16);
  const SpectralField one = SpectralField::from_function(g, [](double) { return 1.0; });
  CHECK(sobolev_norm(one, 0) == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
  const SpectralField c = SpectralField::from_function(g, [](double x) { return std::cos(x); });
  CHECK(sobolev_norm(c, 2) == doctest::Approx(std::sqrt(1.5 * pi)).epsilon(1e-13));
  const SpectralField zero(g);
  for (int o = 0; o <= 2; ++o) CHECK(sobolev_norm(zero, o) == 0.0);
  CHECK_THROWS_AS(sobolev_norm(c, 3), ConfigError);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    SpectralField w(g);
    for (std::size_t k = 0; k < g.size(); ++k) w[k] = n(rng);
    CHECK(sobolev_norm(w, 0) <= sobolev_norm(w, 1));
    CHECK(sobolev_norm(w, 1) <= sobolev_norm(w, 2));
  }
}

TEST_CASE("dealiased products") {
  const Grid g(pi, 32);
  const SpectralField c = SpectralField::from_function(g, [](double x) { return std::cos(x); });
  const SpectralField sq = nonlinear_eval(c, [](double x) { return x * x; });
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(sq[k] - ((k == 0 || k == 2) ? 0.5 : 0.0)) < 1e-13);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  SpectralField w(g);
  for (std::size_t k = 0; k < g.size(); ++k) w[k] = n(rng);
  const SpectralField id = nonlinear_eval(w, [](double x) { return x; });
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(id[k] - w[k]) < 1e-13);

  const SpectralField z = nonlinear_eval(w, w, [](double u, double v) { return 2.0 * (v - u) * (v - u); });
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(z[k] == 0.0);

  // Product of two band-limited fields with total degree < N is exact.
  const SpectralField a = SpectralField::from_function(g, [](double x) { return std::cos(5 * x); });
  const SpectralField b = SpectralField::from_function(g, [](double x) { return std::cos(9 * x); });
  const SpectralField ab = nonlinear_eval(a, b, [](double x, double y) { return x * y; });
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(ab[k] - ((k == 4 || k == 14) ? 0.5 : 0.0)) < 1e-13);
}

TEST_CASE("nonlinear_eval rejects mixed grids") {
  const SpectralField a(Grid(pi, 16)), b(Grid(pi, 32));
  CHECK_THROWS_AS(nonlinear_eval(a, b, [](double x, double y) { return x + y; }), ShapeError);
  CHECK_THROWS_AS(a + b, ShapeError);
}
