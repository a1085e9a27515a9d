#include <cmath>
#include <random>

#include "doctest.h"
#include "tocs/errors.hpp"
#include "tocs/numerics.hpp"

using namespace tocs;
using doctest::Approx;

namespace {
const double kSqrtPi = std::sqrt(3.14159265358979323846);
}

TEST_CASE("hermite values") {
  CHECK(hermite_phys(0, 0.7) == 1.0);
  CHECK(hermite_phys(1, 2.0) == 4.0);
  CHECK(hermite_phys(3, 1.0) == -4.0);
  // 8x³ - 12x
  for (double x : {-1.7, 0.3, 2.2}) CHECK(hermite_phys(3, x) == Approx(8 * x * x * x - 12 * x).epsilon(1e-14));
}

TEST_CASE("hermite log form agrees with the recurrence and survives large arguments") {
  for (int n : {0, 1, 7, 30})
    for (double x : {-3.0, 0.4, 5.5}) {
      const SignedLog l = hermite_phys_log(n, x);
      CHECK(l.sign * std::exp(l.log_abs) == Approx(hermite_phys(n, x)).epsilon(1e-12));
    }
  const SignedLog big = hermite_phys_log(400, 30.0);
  CHECK(std::isfinite(big.log_abs));
  CHECK(big.sign == 1);
}

TEST_CASE("hermite derivative identity at random points") {
  std::mt19937_64 rng(20261017);
  std::uniform_int_distribution<int> nd(1, 20);
  std::uniform_real_distribution<double> xd(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const int n = nd(rng);
    const double x = xd(rng);
    const double h = 1e-4 * std::max(1.0, std::abs(x));
    const double fd = (8.0 * (hermite_phys(n, x + h) - hermite_phys(n, x - h)) -
                       (hermite_phys(n, x + 2 * h) - hermite_phys(n, x - 2 * h))) / (12 * h);
    const double an = 2.0 * n * hermite_phys(n - 1, x);
    CHECK(std::abs(fd - an) / std::max(1.0, std::abs(an)) < 1e-8);
  }
}

TEST_CASE("kummer function") {
  CHECK(hyp1f1(-1, 1.5, 0.0) == 1.0);
  CHECK(hyp1f1(1, 1, 2.0) == Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK(hyp1f1(-1, 1.5, 4.0) == Approx(-5.0 / 3.0).epsilon(1e-14));
  CHECK(hyp1f1(-0.25, 0.5, 3.0) == Approx(-3.264922152877955).epsilon(1e-12));
}

TEST_CASE("kummer terminating series matches the explicit polynomial") {
  for (int k = 0; k <= 10; ++k)
    for (double x : {0.0, 0.7, 1.9, 3.1, 4.0}) {
      // 1F1(-k; 3/2; y) = Σ_j (-k)_j y^j / ((3/2)_j j!)
      const double y = x * x;
      double term = 1.0, sum = 1.0, mag = 1.0;
      for (int j = 0; j < k; ++j) {
        term *= (j - k) * y / ((1.5 + j) * (j + 1));
        sum += term;
        mag += std::abs(term);
      }
      CHECK(std::abs(hyp1f1(-k, 1.5, y) - sum) < 1e-14 * mag);
    }
}

TEST_CASE("kummer budget exhaustion raises") {
  SpecialFunctionConfig cfg;
  cfg.max_terms = 64;
  CHECK_THROWS_AS(hyp1f1(0.5, 1.5, 400.0, cfg), DivergenceError);
}

TEST_CASE("terminating gauss function") {
  CHECK(hyp2f1_terminating(0, -0.5, 1.0, 2.0) == 1.0);
  CHECK(hyp2f1_terminating(-1, -0.5, 1.0, 2.0) == Approx(2.0));
  // 1 + 2/3 - 1/12
  CHECK(hyp2f1_terminating(-2, -0.5, 3.0, 2.0) == Approx(19.0 / 12.0).epsilon(1e-15));
  CHECK_THROWS_AS(hyp2f1_terminating(-3, 1.0, -1.0, 2.0), PoleError);
}

TEST_CASE("2F2 series") {
  CHECK(hyp2f2(1, 3, 3, 3, 0.0) == 1.0);
  CHECK(hyp2f2(1, 1, 1, 1, 0.5) == Approx(std::exp(0.5)).epsilon(1e-14));
  CHECK(hyp2f2(1, 3, 3, 3, 0.5) == Approx(1.189770165601025).epsilon(1e-14));
}

TEST_CASE("signed log gamma") {
  const SignedLog a = log_gamma_signed(5.0);
  CHECK(a.log_abs == Approx(std::log(24.0)).epsilon(1e-14));
  CHECK(a.sign == 1);
  const SignedLog b = log_gamma_signed(0.5);
  CHECK(b.log_abs == Approx(std::log(kSqrtPi)).epsilon(1e-14));
  const SignedLog c = log_gamma_signed(-2.5);
  CHECK(c.sign == -1);
  CHECK(c.log_abs == Approx(-0.05624371649767405).epsilon(1e-13));
  CHECK_THROWS_AS(log_gamma_signed(-3.0), PoleError);
  CHECK_THROWS_AS(log_gamma_signed(0.0), PoleError);
}

TEST_CASE("pochhammer products") {
  CHECK(pochhammer_ratio(-3.0, 0) == 1.0);
  CHECK(pochhammer_ratio(-3.0, 1) == -3.0);
  CHECK(pochhammer_ratio(-3.0, 4) == 0.0);
}

TEST_CASE("pochhammer associativity on random triples") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> ad(-12, 12), jd(0, 8);
  for (int i = 0; i < 100; ++i) {
    const double a = ad(rng) * 0.5;
    const int j = jd(rng), m = jd(rng);
    // half-integer products are exact in binary floating point at these sizes
    CHECK(pochhammer_ratio(a, j) * pochhammer_ratio(a + j, m) == pochhammer_ratio(a, j + m));
  }
}

TEST_CASE("gauss half-line rule") {
  const QuadratureRule& r = default_rule();
  CHECK(r.degree == 200);
  for (int i = 0; i < r.nodes.size(); ++i) {
    CHECK(r.nodes(i) > 0.0);
    CHECK(r.weights(i) > 0.0);
    if (i > 0) CHECK(r.nodes(i) > r.nodes(i - 1));
  }
  CHECK(integrate_halfline([](double) { return 1.0; }, r) == Approx(kSqrtPi / 2).epsilon(1e-12));
  CHECK(integrate_plain([](double x) { return x * std::exp(-x * x); }, r) == Approx(0.5).epsilon(1e-12));
  for (int n = 0; n <= 10; ++n)
    CHECK(integrate_halfline([n](double x) { return std::pow(x, 2 * n); }, r) ==
          Approx(0.5 * std::tgamma(n + 0.5)).epsilon(1e-10));
}

TEST_CASE("adaptive integration") {
  CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, 3.14159265358979323846) ==
        Approx(2.0).epsilon(1e-12));
  CHECK(integrate_adaptive_to_inf([](double x) { return std::exp(-x); }, 0.0) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("meijer G values") {
  CHECK(meijer_g_2012(-4.0, 2.0) == Approx(1.0826822658929015).epsilon(1e-9));
  CHECK(meijer_g_2012(2.5, 0.7) == Approx(0.07245777427290216).epsilon(1e-9));
}

TEST_CASE("meijer G mellin moments") {
  for (double a1 : {-4.0, 2.5})
    for (int s = 1; s <= 3; ++s) {
      auto f = [&](double x) { return x <= 0.0 ? 0.0 : std::pow(x, s - 1) * meijer_g_2012(a1, x); };
      const double m = integrate_adaptive_to_inf(f, 0.0, 1e-10, 1e-13);
      // 1/Γ(a1 + s) vanishes at the poles a1 + s = -3, -2, -1
      const double exact = a1 < 0 ? 0.0 : std::tgamma(s) * std::tgamma(s) / std::tgamma(a1 + s);
      CHECK(std::abs(m - exact) < 1e-6 * std::max(1.0, exact));
    }
}

TEST_CASE("meijer G decays") {
  double prev = meijer_g_2012(-4.0, 30.0);
  for (double x : {35.0, 40.0, 50.0}) {
    const double g = std::abs(meijer_g_2012(-4.0, x));
    CHECK(g < std::abs(prev));
    prev = g;
  }
}

TEST_CASE("special function config validation") {
  SpecialFunctionConfig c;
  CHECK_NOTHROW(c.validate());
  c.series_tolerance = 1e-3;
  CHECK_THROWS(c.validate());
  c = {};
  c.max_terms = 10;
  CHECK_THROWS(c.validate());
}
