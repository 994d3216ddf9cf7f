#include <doctest.h>

#include <cmath>
#include <random>

#include "fastreact/errors.hpp"
#include "fastreact/models.hpp"
#include "fastreact/reduction.hpp"

using namespace fastreact;

TEST_CASE("reaction values at sample points") {
  ModelParams p;
  const ReactionEval e = eval_reaction(p, 1.0, 2.0);
  CHECK(e.g == doctest::Approx(0.0));
  CHECK(e.g1 == doctest::Approx(-3.0));
  CHECK(e.g2 == doctest::Approx(2.0));
  const ReactionEval z = eval_reaction(p, 0.0, 0.0);
  CHECK(z.g == 0.0);
  CHECK(z.phi == 0.0);
  CHECK(z.psi == 0.0);
  CHECK(eval_reaction(p, 1.0, 1.0).psi == doctest::Approx(-1.0));
}

TEST_CASE("linear kind reaction") {
  ModelParams p;
  p.kind = ModelKind::linear;
  const ReactionEval e = eval_reaction(p, 0.3, 1.1);
  CHECK(e.g == doctest::Approx(1.1 - 0.6));
  CHECK(e.g1 == -2.0);
  CHECK(e.g2 == 1.0);
  CHECK(e.phi == 0.0);
  CHECK(e.psi == 0.0);
  CHECK(e.psi1 == 0.0);
}

TEST_CASE("partial derivatives match central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 3.0);
  ModelParams p;
  p.kappa = 0.7;
  p.a = 1.3;
  p.b = 0.6;
  p.c = 0.9;
  const double h = 1e-6;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
  for (int i = 0; i < 100; ++i) {
    const double x = U(rng), y = U(rng);
    const ReactionEval e = eval_reaction(p, x, y);
    const ReactionEval xp = eval_reaction(p, x + h, y), xm = eval_reaction(p, x - h, y);
    const ReactionEval yp = eval_reaction(p, x, y + h), ym = eval_reaction(p, x, y - h);
    CHECK(close(e.g1, (xp.g - xm.g) / (2 * h)));
    CHECK(close(e.g2, (yp.g - ym.g) / (2 * h)));
    CHECK(close(e.phi1, (xp.phi - xm.phi) / (2 * h)));
    CHECK(close(e.phi2, (yp.phi - ym.phi) / (2 * h)));
    CHECK(close(e.psi1, (xp.psi - xm.psi) / (2 * h)));
    CHECK(close(e.psi2, (yp.psi - ym.psi) / (2 * h)));
  }
}

TEST_CASE("g1 <= -1 on the admissible region") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.0, 5.0);
  ModelParams p;
  p.kappa = 2.0;
  for (int i = 0; i < 500; ++i) {
    double x = U(rng), y = U(rng);
    if (y < x) std::swap(x, y);
    CHECK(eval_reaction(p, x, y).g1 <= -1.0);
  }
}

TEST_CASE("roots of g coincide with the critical map") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.0, 4.0);
  for (double kappa : {0.25, 1.0, 3.0}) {
    ModelParams p;
    p.kappa = kappa;
    for (int i = 0; i < 50; ++i) {
      const double v = U(rng);
      const double u = critical_u(v, kappa);
      CHECK(std::abs(eval_reaction(p, u, v).g) < 1e-12);
      CHECK(u >= 0.0);
      CHECK(u <= v);
    }
  }
}

TEST_CASE("lipschitz constants") {
  ModelParams p;
  p.kappa = 0.01;
  const LipschitzConstants l = lipschitz_from_constants(p, 1.1, 10.0, 2.0);
  CHECK(l.f == doctest::Approx(1.32));
  // Outer corner (2, 2): |psi_1| = 2, |psi_2| = |1 - 2 - 4| = 5.
  CHECK(l.psi == doctest::Approx(5.0));
  p.kappa = 0.0;
  CHECK(lipschitz_from_constants(p, 1.1, 10.0, 2.0).f == 0.0);
  ModelParams q;
  q.kind = ModelKind::linear;
  const LipschitzConstants lin = lipschitz_estimates(q, 1.0);
  CHECK(lin.f == doctest::Approx(0.5));
  CHECK(lin.phi == 0.0);
  CHECK(lin.psi == 0.0);
  CHECK_THROWS_AS(lipschitz_estimates(ModelParams{}, 0.0), ConfigError);
}

TEST_CASE("sup of psi over a box") {
  ModelParams p;
  // psi = (1 - x - y) y on [0, 2]^2: sup over corners and edges is |(1-2-2)*2| = 6.
  CHECK(sup_abs_psi(p, 2.0) == doctest::Approx(6.0));
  // |psi_1| = y <= 2, |psi_2| = |1 - x - 2y| <= 5.
  CHECK(sum_sup_abs_psi_partials(p, 2.0) == doctest::Approx(7.0));
}

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.eps = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ModelParams{};
  p.d = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ModelParams{};
  p.delta = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK(parse_model_kind("linear") == ModelKind::linear);
  CHECK_THROWS_AS(parse_model_kind("cubic"), ConfigError);
}
