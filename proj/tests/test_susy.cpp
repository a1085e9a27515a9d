#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "tocs/errors.hpp"
#include "tocs/susy.hpp"

using namespace tocs;
using doctest::Approx;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

const SusyModel& model() {
  static const SusyModel m = q4_example_model();
  return m;
}

Eigen::VectorXd grid(double a, double b, int n) { return Eigen::VectorXd::LinSpaced(n, a, b); }
}  // namespace

TEST_CASE("seed solutions solve the oscillator equation") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> ed(-7.0, -0.6), nd(-2.0, 2.0), xd(0.05, 6.0);
  for (int i = 0; i < 30; ++i) {
    const SeedSolution u = seed_solution(ed(rng), i % 5 == 0 ? kInf : nd(rng));
    for (int j = 0; j < 5; ++j) CHECK(u.residual(xd(rng)) < 1e-8);
  }
}

TEST_CASE("odd seed at 3/2 is the ground state up to scale") {
  const SeedSolution u = seed_solution(1.5, kInf);
  const double q0 = u.jet(1.0, 0)(0) / trunc_eigenfunction(0, 1.0);
  for (double x : {0.3, 2.0, 3.5}) CHECK(u.jet(x, 0)(0) / trunc_eigenfunction(0, x) == Approx(q0).epsilon(1e-10));
}

TEST_CASE("seed jets against finite differences") {
  const SeedSolution u = seed_solution(-2.5, 0.7);
  const double x = 1.3, h = 1e-4;
  const Eigen::VectorXd j = u.jet(x, 3);
  for (int d = 1; d <= 3; ++d) {
    const double fd = (u.jet(x + h, d - 1)(d - 1) - u.jet(x - h, d - 1)(d - 1)) / (2 * h);
    CHECK(j(d) == Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("no seeds leaves the oscillator") {
  for (double x : {0.2, 1.0, 3.0}) CHECK(wronskian_potential_at({}, x) == Approx(0.5 * x * x).epsilon(1e-15));
}

TEST_CASE("fourth-order potential against an independent wronskian") {
  const auto seeds = q4_example_seeds();
  CHECK(wronskian_potential_at(seeds, 0.5) == Approx(-7.897984756657484).epsilon(1e-9));
  CHECK(wronskian_potential_at(seeds, 1.0) == Approx(-3.390130761925634).epsilon(1e-9));
  CHECK(wronskian_potential_at(seeds, 2.0) == Approx(-2.169496468089790).epsilon(1e-9));
  CHECK(wronskian_potential_at(seeds, 4.0) == Approx(4.588109301744378).epsilon(1e-9));
  for (double x : {0.5, 1.0, 2.0, 4.0}) CHECK(q4_example_potential(x) == Approx(wronskian_potential_at(seeds, x)).epsilon(1e-9));
  const Eigen::VectorXd g = grid(0.1, 6.0, 241);
  const Eigen::VectorXd v = wronskian_potential(seeds, g);
  for (int i = 0; i < g.size(); ++i) CHECK(std::abs(v(i) - q4_example_potential(g(i))) < 1e-6);
}

TEST_CASE("potential tends to the shifted oscillator") {
  // W grows like e^{2x²}, so V - x²/2 -> -4
  for (double x : {8.0, 12.0}) CHECK(std::abs(q4_example_potential(x) - 0.5 * x * x + 4.0) < 10.0 / (x * x));
}

TEST_CASE("nu is recovered from the closed-form potential") {
  const NuFit fit = fit_nu({-5.5, -4.5, -3.5, -2.5}, q4_example_potential, grid(0.1, 6.0, 60));
  CHECK(std::isinf(fit.nu[0]));
  CHECK(std::abs(fit.nu[1]) < 1e-9);
  CHECK(std::isinf(fit.nu[2]));
  CHECK(std::abs(fit.nu[3]) < 1e-9);
  CHECK(fit.max_deviation < 1e-6);
}

TEST_CASE("a perturbed seed set gives a different potential") {
  auto seeds = q4_example_seeds();
  seeds[3] = seed_solution(-2.4, 0.0);
  CHECK(std::abs(wronskian_potential_at(seeds, 1.0) - q4_example_potential(1.0)) > 1e-3);
}

TEST_CASE("model parameters") {
  const SusyModel& m = model();
  CHECK(m.q == 4);
  CHECK(m.kappa == 2);
  CHECK(m.delta1 == 6.0);
  CHECK(m.explicit_intertwiner);
  CHECK(m.new_energies.size() == 2);
  CHECK(m.new_energies[1] - m.new_energies[0] == Approx(2.0));
}

TEST_CASE("isospectral and new eigenfunctions") {
  const SusyModel& m = model();
  for (int n = 0; n <= 5; ++n) {
    auto jet = [&](double x) { return Eigen::Vector3d(iso_jets(m, n + 1, x, 2).row(n).transpose()); };
    CHECK(eigen_residual_sup(jet, m.potential, energy(n), 0.1, 6.0) < 1e-6);
  }
  for (int j = 0; j < 2; ++j) {
    auto jet = [&](double x) { return Eigen::Vector3d(new_jets(m, 2, x, 2).row(j).transpose()); };
    CHECK(eigen_residual_sup(jet, m.potential, m.new_energies[j], 0.1, 6.0) < 1e-6);
  }
  CHECK(iso_eigenfunction(m, 2, 1.1) == Approx(iso_jets(m, 3, 1.1, 0)(2, 0)).epsilon(1e-14));
  CHECK(new_eigenfunction(m, 1, 1.1) == Approx(new_jets(m, 2, 1.1, 0)(1, 0)).epsilon(1e-14));
}

TEST_CASE("eight functions are orthonormal") {
  const SusyIsoBasis ib(model());
  const SusyNewBasis nb(model());
  CHECK(nb.max_size() == 2);
  const QuadratureRule& r = default_rule();
  Eigen::MatrixXd V(r.nodes.size(), 8);
  for (int i = 0; i < r.nodes.size(); ++i) {
    V.block(i, 0, 1, 2) = nb.jets(r.nodes(i), 2, 0).transpose();
    V.block(i, 2, 1, 6) = ib.jets(r.nodes(i), 6, 0).transpose();
  }
  const Eigen::MatrixXd G = V.transpose() * r.plain_weights.asDiagonal() * V;
  CHECK((G - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("second-order chain from seeds") {
  const SusyModel m2 = model_from_seeds({seed_solution(-4.5, kInf), seed_solution(-3.5, 0.0)});
  CHECK(m2.q == 2);
  CHECK(!m2.explicit_intertwiner);
  for (int n = 0; n <= 3; ++n) {
    auto jet = [&](double x) {
      const Eigen::VectorXd pj = trunc_jets(n, x, m2.q + 2).row(n).transpose();
      return crum_state_jet(m2.seeds, x, pj, energy(n));
    };
    CHECK(eigen_residual_sup(jet, m2.potential, energy(n), 0.1, 6.0) < 1e-6);
  }
}

TEST_CASE("nodal seed makes the wronskian vanish") {
  // odd seed above the ground level has a zero on the half line
  CHECK_THROWS_AS(wronskian_potential({seed_solution(3.5, kInf)}, grid(0.1, 6.0, 200)), SingularWronskian);
}

TEST_CASE("ladder on the isospectral part") {
  const SusyLadder L = susy_ladder(model());
  for (int n = 1; n <= 20; ++n) {
    const auto dn = susy_ladder_action(L, Subspace::Iso, Direction::Lower, n, false);
    CHECK(dn.index == n - 1);
    const auto up = susy_ladder_action(L, Subspace::Iso, Direction::Raise, n - 1, false);
    CHECK(std::abs(up.coefficient * dn.coefficient - L.six_factor(energy(n))) < 1e-12 * L.six_factor(energy(n)));
  }
  CHECK(std::abs(susy_ladder_action(L, Subspace::Iso, Direction::Lower, 1, false).coefficient - std::sqrt(8640.0)) < 1e-10);
  for (int n = 0; n <= 20; ++n) {
    const cplx c = susy_ladder_action(L, Subspace::Iso, Direction::Raise, n, true).coefficient;
    CHECK(std::abs(c - std::sqrt(2.0 * (n + 1))) < 1e-12);
  }
  CHECK(susy_ladder_action(L, Subspace::Iso, Direction::Lower, 0, false).index == -1);
}

TEST_CASE("ladder on the new part") {
  const SusyLadder L = susy_ladder(model());
  CHECK(susy_ladder_action(L, Subspace::New, Direction::Lower, 0, true).index == -1);
  CHECK(susy_ladder_action(L, Subspace::New, Direction::Raise, 1, false).index == -1);
  const auto n1 = susy_ladder_action(L, Subspace::New, Direction::Lower, 1, true);
  CHECK(n1.index == 0);
  CHECK(std::abs(n1.coefficient - cplx(0.0, 2.0)) < 1e-14);
  for (double e : L.product_roots()) CHECK(std::abs(L.six_factor(e)) < 1e-9 * std::max(1.0, std::abs(e)));
}

TEST_CASE("isospectral coherent states") {
  for (double r : {0.3, 1.0, 2.0}) {
    const CoherentState cs = susy_cs(model(), Subspace::Iso, std::polar(r, 0.5), 64);
    CHECK(energy_expectation(cs) == Approx(1.5 + 4.0 * r * r).epsilon(1e-10));
    CHECK(state_probability(cs, 0) == Approx(std::exp(-2.0 * r * r)).epsilon(1e-10));
  }
}

TEST_CASE("new coherent states") {
  for (double r : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const CoherentState cs = susy_cs(model(), Subspace::New, r);
    CHECK(cs.truncation() == 2);
    CHECK(state_probability(cs, 1) == Approx(6 * r * r / (1 + 6 * r * r)).epsilon(1e-12));
    CHECK(state_probability(cs, 0) + state_probability(cs, 1) == Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("new measure on the regular branch") {
  const NewMeasureCheck c = new_measure_check(-1.0, 3, 2);
  CHECK(!c.pole_limit);
  CHECK(c.max_deviation < 1e-6);
  CHECK(c.moment_deviation < 1e-6);
}

TEST_CASE("new measure for the model sits on a pole") {
  const NewMeasureCheck c = new_measure_check(model(), 1);
  CHECK(c.pole_limit);
  CHECK(c.diagonal(0) == Approx(1.0).epsilon(1e-6));
  CHECK(c.diagonal(1) == Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("models from seeds validate their input") {
  CHECK_THROWS(model_from_seeds({seed_solution(-2.5, 0.0), seed_solution(-2.5, 0.0)}));
}
