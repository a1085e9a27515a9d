#include <cmath>
#include <random>

#include "doctest.h"
#include "tocs/errors.hpp"
#include "tocs/coherent.hpp"
#include "tocs/observables.hpp"

using namespace tocs;
using doctest::Approx;

namespace {
const LadderSpec kTrunc = trunc_oscillator_spec();
}

TEST_CASE("l-minus state at z = 0 is the ground state") {
  const CoherentState cs = build_cs(Family::LMinus, kTrunc, 0.0);
  CHECK(cs.norm_constant == 1.0);
  CHECK(std::abs(cs.vector.amplitudes(0)) == 1.0);
  CHECK(cs.vector.amplitudes.tail(63).norm() == 0.0);
  CHECK(eigen_residual(cs) == 0.0);
}

TEST_CASE("normalisation constants") {
  CHECK(build_cs(Family::LMinus, kTrunc, 1.0).norm_constant == Approx(0.9224522362915717).epsilon(1e-12));
  for (double r : {0.1, 1.0, 2.0})
    CHECK(build_cs(Family::LMinus, kTrunc, r).norm_constant == Approx(closed_form_cz(r)).epsilon(1e-10));
  CHECK(closed_form_cz_tilde(0.3) == Approx(std::pow(0.64, 0.75)));
  for (double r : {0.1, 0.3, 0.45}) {
    const int t = required_truncation(Family::Displacement, kTrunc, 2.0, r, 64);
    CHECK(build_cs(Family::Displacement, kTrunc, r, 2.0, t).norm_constant ==
          Approx(closed_form_cz_tilde(r)).epsilon(1e-8));
  }
}

TEST_CASE("displacement family has radius 1/2") {
  CHECK_THROWS_AS(build_cs(Family::Displacement, kTrunc, 0.5), NotNormalizable);
  const auto sums = displacement_partial_sums(kTrunc, 0.6, 200);
  for (size_t i = 1; i < sums.size(); ++i) CHECK(sums[i] > sums[i - 1]);
  CHECK(sums.back() > 1e6);
}

TEST_CASE("eigenrelation") {
  for (double r : {0.3, 1.0, 2.0})
    CHECK(eigen_residual(build_cs(Family::LMinus, kTrunc, std::polar(r, -1.2))) < 1e-10);
  CHECK(eigen_residual(build_cs(Family::LinLMinus, kTrunc, 1.5)) < 1e-10);
  CHECK_THROWS_AS(eigen_residual(build_cs(Family::Displacement, kTrunc, 0.2)), FamilyMismatch);
}

TEST_CASE("probabilities") {
  const CoherentState cs = build_cs(Family::LMinus, kTrunc, 1.0);
  CHECK(state_probability(cs, 0) == Approx(1.0 / std::sinh(1.0)).epsilon(1e-12));
  CHECK(state_probability(build_cs(Family::LMinus, kTrunc, 0.0), 0) == 1.0);
  const CoherentState c2 = build_cs(Family::LMinus, kTrunc, 2.0);
  double s = 0.0;
  for (int n = 0; n < c2.truncation(); ++n) s += state_probability(c2, n);
  CHECK(s == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(state_probability(cs, 64), IndexOutOfRange);
  // C_z² |z|^{2n}/(2n+1)!
  CHECK(state_probability(c2, 3) == Approx(std::pow(closed_form_cz(2.0), 2) * std::pow(4.0, 3) / 5040.0).epsilon(1e-12));
}

TEST_CASE("energy expectation") {
  CHECK(energy_expectation(build_cs(Family::LMinus, kTrunc, 1e-4)) == Approx(1.5).epsilon(1e-8));
  CHECK(energy_expectation(build_cs(Family::LMinus, kTrunc, 1.0, 2.0, 60)) == Approx(1.8130352854993312).epsilon(1e-10));
  CHECK(energy_expectation(build_cs(Family::LMinus, kTrunc, 2.0, 2.0, 60)) == Approx(2.574629441455096).epsilon(1e-10));
  for (double r : {0.2, 0.9, 1.6, 2.4, 3.0})
    CHECK(energy_expectation(build_cs(Family::LMinus, kTrunc, r, 2.0, 60)) == Approx(closed_form_energy(r)).epsilon(1e-8));
}

TEST_CASE("temporal stability") {
  const cplx z = std::polar(1.3, 0.2);
  const CoherentState cs = build_cs(Family::LMinus, kTrunc, z);
  CHECK((evolve(cs, 0.0).amplitudes - cs.vector.amplitudes).norm() == 0.0);
  for (double t : {0.3, 1.0, 2.7}) {
    const auto ev = evolve(cs, t);
    const auto ref = build_cs(Family::LMinus, kTrunc, z * std::polar(1.0, -2.0 * t));
    CHECK((ev.amplitudes - std::polar(1.0, -1.5 * t) * ref.vector.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(ref.vector.amplitudes.dot(ev.amplitudes)) == Approx(1.0).epsilon(1e-10));
  }
  const auto pi = evolve(cs, 3.14159265358979323846);
  for (int n = 0; n < 10; ++n) CHECK(std::norm(pi.amplitudes(n)) == Approx(state_probability(cs, n)));
}

TEST_CASE("doubling the truncation leaves amplitudes alone") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> rd(0.0, 2.0), pd(-3.0, 3.0);
  for (int i = 0; i < 10; ++i) {
    const cplx z = std::polar(rd(rng), pd(rng));
    for (Family f : {Family::LMinus, Family::LinLMinus, Family::LinDisplacement}) {
      const CoherentState a = build_cs(f, kTrunc, z, 2.0, 64), b = build_cs(f, kTrunc, z, 2.0, 128);
      CHECK((a.vector.amplitudes - b.vector.amplitudes.head(64)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("linearised families at alpha = 1 reduce to Glauber states") {
  const LadderSpec ho = harmonic_spec();
  const double r = 1.7;
  const CoherentState a = build_cs(Family::LinLMinus, ho, r, 1.0), b = build_cs(Family::LinDisplacement, ho, r, 1.0);
  CHECK((a.vector.amplitudes - b.vector.amplitudes).cwiseAbs().maxCoeff() == 0.0);
  for (int n = 0; n < 15; ++n)
    CHECK(state_probability(a, n) == Approx(std::exp(-r * r) * std::pow(r, 2 * n) / std::tgamma(n + 1.0)).epsilon(1e-12));
}

TEST_CASE("truncation guard") {
  CHECK_THROWS_AS(build_cs(Family::LMinus, kTrunc, 20.0, 2.0, 8), TruncationTooSmall);
  CHECK_THROWS(build_cs(Family::LMinus, kTrunc, 1.0, 2.0, 4));
}

TEST_CASE("resolution of the identity") {
  CHECK(identity_resolution_check(mu_iso(), 10).max_deviation < 1e-6);
  CHECK(identity_resolution_check(mu_trunc_corrected(), 10, 120.0).max_deviation < 1e-6);
  const IdentityCheck reference = identity_resolution_check(mu_trunc_reference(), 10, 120.0);
  for (int k = 0; k <= 10; ++k) CHECK(reference.diagonal(k) == Approx((2.0 * k + 3) * (2.0 * k + 2) / 4.0).epsilon(1e-8));
  CHECK_THROWS_AS(identity_resolution_check(mu_trunc_reference(), 10, 40.0), TailTooFat);
}

TEST_CASE("measure densities are nonnegative") {
  for (const Measure& m : {mu_iso(), mu_trunc_corrected(), mu_trunc_reference()})
    for (double r : {0.01, 0.5, 2.0, 5.0}) CHECK(m.radial_density(r, 200) >= 0.0);
  CHECK(mu_iso().radial_density(1.3) == Approx(2.0 / 3.14159265358979323846).epsilon(1e-10));
}
