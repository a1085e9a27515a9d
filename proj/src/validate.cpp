#include "tocs/validate.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "tocs/entangle.hpp"
#include "tocs/observables.hpp"

namespace tocs {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kSqrtPi = std::sqrt(kPi);
const double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  Outcome(double v, double tol, std::string d = {}, bool report = false, bool least = false)
      : value(v), tolerance(tol), detail(std::move(d)), report_only(report), at_least(least) {}

  double value;
  double tolerance;
  std::string detail;
  bool report_only;
  bool at_least;  // pass when value >= tolerance
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Eigen::VectorXd grid(double a, double b, int n) { return Eigen::VectorXd::LinSpaced(n, a, b); }

class Suite {
 public:
  explicit Suite(const ValidateOptions& opt) : opt_(opt) {}

  void add(const char* module, const char* name, int min_basis, const std::function<Outcome()>& fn) {
    CheckResult r;
    r.module = module;
    r.name = name;
    if (opt_.basis < min_basis) {
      r.status = CheckStatus::Skip;
      r.detail = "needs basis >= " + std::to_string(min_basis);
      results_.push_back(r);
      return;
    }
    try {
      const Outcome o = fn();
      r.value = o.value;
      r.tolerance = o.tolerance;
      r.detail = o.detail;
      const bool ok = o.at_least ? o.value >= o.tolerance : o.value <= o.tolerance;
      r.status = ok ? CheckStatus::Pass : (o.report_only ? CheckStatus::Report : CheckStatus::Fail);
      if (o.report_only && ok) r.status = CheckStatus::Report;
    } catch (const std::exception& e) {
      r.status = CheckStatus::Fail;
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.detail = e.what();
    }
    results_.push_back(r);
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  const ValidateOptions& opt_;
  std::vector<CheckResult> results_;
};

// ---- numerics ----

void numerics_checks(Suite& s) {
  s.add("numerics", "hermite_spot_values", 0, [] {
    const double d = std::max({std::abs(hermite_phys(0, 0.7) - 1.0), std::abs(hermite_phys(1, 2.0) - 4.0),
                               std::abs(hermite_phys(3, 1.0) + 4.0)});
    return Outcome{d, 1e-14};
  });
  s.add("numerics", "hermite_derivative_identity", 0, [] {
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n)
      for (double x : {-4.1, -1.3, 0.2, 2.7, 4.9}) {
        const double h = 1e-4 * std::max(1.0, std::abs(x));
        const double fd = (8.0 * (hermite_phys(n, x + h) - hermite_phys(n, x - h)) -
                           (hermite_phys(n, x + 2 * h) - hermite_phys(n, x - 2 * h))) / (12 * h);
        const double an = 2.0 * n * hermite_phys(n - 1, x);
        worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
    return Outcome{worst, 1e-8};
  });
  s.add("numerics", "hyp1f1_spot_values", 0, [] {
    const double d = std::max({rel(hyp1f1(1, 1, 2.0), std::exp(2.0)), std::abs(hyp1f1(-1, 1.5, 0.0) - 1.0),
                               rel(hyp1f1(-1, 1.5, 4.0), -5.0 / 3.0)});
    return Outcome{d, 1e-12};
  });
  s.add("numerics", "hyp2f1_terminating_spot_values", 0, [] {
    const double d = std::max({std::abs(hyp2f1_terminating(0, -0.5, 1.0, 2.0) - 1.0),
                               std::abs(hyp2f1_terminating(-1, -0.5, 1.0, 2.0) - 2.0),
                               std::abs(hyp2f1_terminating(-2, -0.5, 3.0, 2.0) - 19.0 / 12.0)});
    return Outcome{d, 1e-14};
  });
  s.add("numerics", "hyp2f2_spot_values", 0, [] {
    const double d = std::max(std::abs(hyp2f2(1, 3, 3, 3, 0.0) - 1.0), rel(hyp2f2(1, 1, 1, 1, 0.5), std::exp(0.5)));
    return Outcome{d, 1e-13};
  });
  s.add("numerics", "log_gamma_spot_values", 0, [] {
    const SignedLog a = log_gamma_signed(5.0), b = log_gamma_signed(0.5), c = log_gamma_signed(-2.5);
    double d = std::max({std::abs(a.log_abs - std::log(24.0)), std::abs(b.log_abs - std::log(kSqrtPi)),
                         std::abs(c.log_abs - std::log(8.0 * kSqrtPi / 15.0))});
    if (a.sign != 1 || b.sign != 1 || c.sign != -1) d = kInf;
    return Outcome{d, 1e-13};
  });
  s.add("numerics", "pochhammer_spot_values", 0, [] {
    const double d = std::abs(pochhammer_ratio(-3.0, 0) - 1.0) + std::abs(pochhammer_ratio(-3.0, 1) + 3.0) +
                     std::abs(pochhammer_ratio(-3.0, 4));
    return Outcome{d, 0.0};
  });
  s.add("numerics", "gauss_rule_unit_integral", 0, [] {
    const double v = integrate_halfline([](double) { return 1.0; }, default_rule());
    return Outcome{std::abs(v - kSqrtPi / 2.0), 1e-12};
  });
  s.add("numerics", "gaussian_moments", 0, [] {
    double worst = 0.0;
    for (int n = 0; n <= 10; ++n) {
      const double v = integrate_halfline([n](double x) { return std::pow(x, 2 * n); }, default_rule());
      worst = std::max(worst, rel(v, 0.5 * std::tgamma(n + 0.5)));
    }
    return Outcome{worst, 1e-10};
  });
  s.add("numerics", "meijer_mellin_moments", 0, [] {
    // a1 = -4: Γ(s)²/Γ(a1 + s) vanishes for s = 1, 2, 3
    double worst = 0.0;
    for (int sv = 1; sv <= 3; ++sv) {
      auto f = [sv](double x) { return x <= 0.0 ? 0.0 : std::pow(x, sv - 1) * meijer_g_2012(-4.0, x); };
      worst = std::max(worst, std::abs(integrate_adaptive_to_inf(f, 0.0, 1e-9, 1e-11)));
    }
    return Outcome{worst, 1e-6, "absolute, exact moments are 0"};
  });
  s.add("numerics", "meijer_mellin_moments_regular", 0, [] {
    double worst = 0.0;
    const double a1 = 2.5;
    for (int sv = 1; sv <= 3; ++sv) {
      auto f = [sv, a1](double x) { return x <= 0.0 ? 0.0 : std::pow(x, sv - 1) * meijer_g_2012(a1, x); };
      const double exact = std::tgamma(sv) * std::tgamma(sv) / std::tgamma(a1 + sv);
      worst = std::max(worst, rel(integrate_adaptive_to_inf(f, 0.0, 1e-10, 1e-13), exact));
    }
    return Outcome{worst, 1e-6};
  });
}

// ---- fock ----

void fock_checks(Suite& s) {
  s.add("fock", "commutator_truncated_oscillator", 0, [] {
    return Outcome{commutator_check(trunc_oscillator_spec(), 20), 1e-12};
  });
  s.add("fock", "commutator_harmonic", 0, [] {
    return Outcome{commutator_check(harmonic_spec(), 20, [](int) { return 1.0; }), 1e-12};
  });
  s.add("fock", "energy_spacing", 0, [] {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) worst = std::max(worst, std::abs(energy(k + 1) - energy(k) - 2.0));
    return Outcome{worst, 0.0};
  });
  s.add("fock", "orthonormality", 0, [] {
    const QuadratureRule& r = default_rule();
    Eigen::MatrixXd V(r.nodes.size(), 21);
    for (int i = 0; i < r.nodes.size(); ++i) V.row(i) = trunc_jets(20, r.nodes(i), 0).col(0).transpose();
    const Eigen::MatrixXd G = V.transpose() * r.plain_weights.asDiagonal() * V;
    return Outcome{(G - Eigen::MatrixXd::Identity(21, 21)).cwiseAbs().maxCoeff(), 1e-10};
  });
  s.add("fock", "eigenrelation_residual", 0, [] {
    double worst = 0.0;
    for (int k = 0; k <= 10; ++k)
      for (double x : grid(0.05, 8.0, 300)) {
        const double psi = trunc_eigenfunction(k, x);
        worst = std::max(worst, std::abs(-0.5 * trunc_eigenfunction_d2(k, x) + (0.5 * x * x - energy(k)) * psi));
      }
    return Outcome{worst, 1e-8};
  });
  s.add("fock", "odd_fullline_relation", 0, [] {
    double worst = 0.0;
    for (double x : grid(0.01, 7.0, 200)) {
      const Eigen::MatrixXd ho = ho_jets(21, x, 0);
      for (int k = 0; k <= 10; ++k)
        worst = std::max(worst, std::abs(trunc_eigenfunction(k, x) - std::sqrt(2.0) * ho(2 * k + 1, 0)));
    }
    return Outcome{worst, 1e-12};
  });
}

// ---- coherent ----

void coherent_checks(Suite& s, int basis) {
  const LadderSpec spec = trunc_oscillator_spec();
  s.add("coherent", "cz_closed_form", 32, [=] {
    double worst = 0.0;
    for (double r : {0.1, 1.0, 2.0}) {
      const CoherentState cs = build_cs(Family::LMinus, spec, r, 2.0, basis);
      worst = std::max(worst, rel(cs.norm_constant, closed_form_cz(r)));
    }
    return Outcome{worst, 1e-10};
  });
  s.add("coherent", "cz_tilde_closed_form", 0, [=] {
    double worst = 0.0;
    for (double r : {0.1, 0.3, 0.45}) {
      const int t = required_truncation(Family::Displacement, spec, 2.0, r, 64);
      const CoherentState cs = build_cs(Family::Displacement, spec, r, 2.0, t);
      worst = std::max(worst, rel(cs.norm_constant, closed_form_cz_tilde(r)));
    }
    return Outcome{worst, 1e-8};
  });
  s.add("coherent", "displacement_divergence", 0, [=] {
    const auto sums = displacement_partial_sums(spec, 0.6, 200);
    bool monotone = true;
    for (size_t i = 1; i < sums.size(); ++i) monotone = monotone && sums[i] > sums[i - 1];
    return Outcome{monotone ? sums.back() : 0.0, 1e6, "last partial sum at |z| = 0.6", false, true};
  });
  s.add("coherent", "energy_closed_form", 32, [=] {
    double worst = 0.0;
    for (double r : {0.2, 0.7, 1.0, 2.0, 3.0}) {
      const CoherentState cs = build_cs(Family::LMinus, spec, r, 2.0, std::max(basis, 60));
      worst = std::max(worst, rel(energy_expectation(cs), closed_form_energy(r)));
    }
    return Outcome{worst, 1e-8};
  });
  s.add("coherent", "eigen_residual", 32, [=] {
    double worst = 0.0;
    for (double r : {0.0, 0.5, 1.0, 1.5, 2.0})
      worst = std::max(worst, eigen_residual(build_cs(Family::LMinus, spec, std::polar(r, 0.7), 2.0, basis)));
    return Outcome{worst, 1e-10};
  });
  s.add("coherent", "probability_spot_value", 32, [=] {
    const CoherentState cs = build_cs(Family::LMinus, spec, 1.0, 2.0, basis);
    return Outcome{std::abs(state_probability(cs, 0) - 1.0 / std::sinh(1.0)), 1e-12};
  });
  s.add("coherent", "temporal_stability", 32, [=] {
    const cplx z = std::polar(1.2, 0.4);
    const CoherentState cs = build_cs(Family::LMinus, spec, z, 2.0, basis);
    double worst = 0.0;
    for (double t : {0.3, 1.0, 2.7}) {
      const auto ev = evolve(cs, t);
      const auto ref = build_cs(Family::LMinus, spec, z * std::polar(1.0, -2.0 * t), 2.0, basis);
      const Vec<cplx> diff = ev.amplitudes - std::polar(1.0, -energy(0) * t) * ref.vector.amplitudes;
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return Outcome{worst, 1e-10};
  });
  s.add("coherent", "linearised_alpha1_poisson", 32, [=] {
    const LadderSpec ho = harmonic_spec();
    const double r = 1.4;
    const CoherentState cs = build_cs(Family::LinLMinus, ho, r, 1.0, basis);
    const CoherentState cd = build_cs(Family::LinDisplacement, ho, r, 1.0, basis);
    double worst = (cs.vector.amplitudes - cd.vector.amplitudes).cwiseAbs().maxCoeff();
    for (int n = 0; n < 20; ++n)
      worst = std::max(worst, std::abs(state_probability(cs, n) -
                                       std::exp(-r * r + 2 * n * std::log(r) - log_factorial(n))));
    return Outcome{worst, 1e-12};
  });
  s.add("coherent", "mu_iso_identity", 0, [] {
    return Outcome{identity_resolution_check(mu_iso(), 10).max_deviation, 1e-6};
  });
  s.add("coherent", "mu_trunc_reference_identity", 0, [] {
    const IdentityCheck c = identity_resolution_check(mu_trunc_reference(), 10, 120.0);
    return Outcome{c.max_deviation, 1e-6, fmt("M_00 = %.6g, M_11 = %.6g", c.diagonal(0), c.diagonal(1)), true};
  });
  s.add("coherent", "mu_trunc_reference_moment_law", 0, [] {
    // the diagonal comes out as (2k+3)(2k+2)/4
    const IdentityCheck c = identity_resolution_check(mu_trunc_reference(), 10, 120.0);
    double worst = 0.0;
    for (int k = 0; k <= 10; ++k) worst = std::max(worst, rel(c.diagonal(k), (2.0 * k + 3) * (2.0 * k + 2) / 4.0));
    return Outcome{worst, 1e-8};
  });
  s.add("coherent", "mu_trunc_corrected_identity", 0, [] {
    return Outcome{identity_resolution_check(mu_trunc_corrected(), 10, 120.0).max_deviation, 1e-6};
  });
}

// ---- observables ----

void observables_checks(Suite& s, int basis) {
  const TruncBasis tb;
  s.add("observables", "closed_vs_quadrature_x_p", 0, [&tb] {
    const ObservableTables t = build_tables(tb, 9);
    const auto d = closed_form_discrepancies(t, 8, 1e-8, {ObsKind::X, ObsKind::P});
    double worst = 0.0;
    for (int n = 0; n <= 8; ++n)
      for (int m = 0; m <= 8; ++m) {
        worst = std::max(worst, std::abs(matrix_element_closed(ObsKind::X, n, m) - t.x.entries(n, m)));
        worst = std::max(worst, std::abs(matrix_element_closed(ObsKind::P, n, m) - t.p.entries(n, m)));
      }
    return Outcome{worst, 1e-8, std::to_string(d.size()) + " entries off"};
  });
  s.add("observables", "closed_vs_quadrature_x2_p2", 0, [&tb] {
    const ObservableTables t = build_tables(tb, 9);
    const auto d = closed_form_discrepancies(t, 8, 1e-8, {ObsKind::X2, ObsKind::P2});
    double worst = 0.0;
    std::string first;
    for (const auto& e : d) {
      if (e.abs_diff > worst) {
        worst = e.abs_diff;
        first = std::string(obs_name(e.kind)) + "(" + std::to_string(e.n) + "," + std::to_string(e.m) + ")";
      }
    }
    return Outcome{worst, 1e-8, std::to_string(d.size()) + " entries off, largest at " + first, true};
  });
  s.add("observables", "spot_values", 0, [&tb] {
    const ObservableTables t = build_tables(tb, 9);
    double d = std::max({std::abs(t.x.entries(0, 0).real() - 2.0 / kSqrtPi), std::abs(t.x2.entries(0, 0).real() - 1.5),
                         std::abs(t.p2.entries(0, 0).real() - 1.5)});
    for (int n = 0; n < 9; ++n) d = std::max(d, std::abs(t.p.entries(n, n)));
    return Outcome{d, 1e-10};
  });
  s.add("observables", "x2_selection_rule", 0, [&tb] {
    const ObservableTables t = build_tables(tb, 12);
    double worst = 0.0;
    for (int n = 0; n < 12; ++n)
      for (int m = 0; m + 2 <= n; ++m) worst = std::max(worst, std::abs(t.x2.entries(n, m)));
    return Outcome{worst, 1e-10};
  });
  s.add("observables", "p_table_hermitian", 0, [&tb] {
    const ObservableTables t = build_tables(tb, 12);
    const double h = (t.p.entries - t.p.entries.adjoint()).cwiseAbs().maxCoeff();
    const double re = t.p.entries.real().cwiseAbs().maxCoeff();
    return Outcome{std::max(h, re), 1e-10, "purely imaginary and Hermitian"};
  });
  s.add("observables", "p2_second_derivative_form", 0, [&tb] {
    const ObservableTables t = build_tables(tb, 12);
    const MatrixElementTable d2 = p2_second_derivative_table(tb, 12, default_rule());
    return Outcome{(d2.entries - t.p2.entries).cwiseAbs().maxCoeff(), 1e-6};
  });
  s.add("observables", "rule_doubling_shift", 0, [&tb] { return Outcome{build_tables(tb, 30).doubling_shift, 1e-10}; });
  s.add("observables", "expectation_matches_energy", 32, [=] {
    const CoherentState cs = build_cs(Family::LMinus, trunc_oscillator_spec(), std::polar(1.0, 0.3), 2.0, basis);
    MatrixElementTable h{ObsKind::X, Mat<cplx>::Zero(basis, basis), ElementSource::ClosedForm, Basis::Trunc};
    for (int n = 0; n < basis; ++n) h.entries(n, n) = energy(n);
    const double a = expectation(h, cs, basis);
    return Outcome{std::max(std::abs(a - closed_form_energy(1.0)), std::abs(a - energy_expectation(cs))), 1e-10};
  });
  s.add("observables", "expectation_real", 32, [=] {
    const TruncBasis b;
    const ObservableTables t = build_tables(b, basis);
    const CoherentState cs = build_cs(Family::LMinus, trunc_oscillator_spec(), std::polar(1.5, 1.1), 2.0, basis);
    double worst = 0.0;
    for (const MatrixElementTable* m : {&t.x, &t.x2, &t.p, &t.p2})
      worst = std::max(worst, std::abs(expectation_unfolded(*m, cs, basis).imag()));
    return Outcome{worst, 1e-12};
  });
  s.add("observables", "uncertainty_bound", 30, [=] {
    std::vector<double> zs;
    for (int i = 1; i <= 20; ++i) zs.push_back(0.25 * i);
    double lowest = kInf;
    for (const auto& rec : uncertainty_scan(Family::LMinus, trunc_oscillator_spec(), zs, basis))
      lowest = std::min(lowest, rec.product);
    return Outcome{lowest, 0.5 - 5e-3, "smallest product on (0, 5]", false, true};
  });
  s.add("observables", "uncertainty_limit", 30, [=] {
    const auto rec = uncertainty_scan(Family::LMinus, trunc_oscillator_spec(), {5.0}, basis);
    return Outcome{std::abs(rec[0].product - 0.5), 0.05};
  });
  s.add("observables", "position_squeezed", 30, [=] {
    std::vector<double> zs;
    for (int i = 1; i <= 12; ++i) zs.push_back(0.25 * i);
    double worst = -kInf;
    for (const auto& rec : uncertainty_scan(Family::LMinus, trunc_oscillator_spec(), zs, basis))
      worst = std::max(worst, rec.sigma_x - rec.sigma_p);
    return Outcome{worst, 0.0, "max sigma_x - sigma_p on (0, 3]"};
  });
  s.add("observables", "iso_squeezing", 30, [=] {
    const SusyModel m = q4_example_model();
    auto make = [&](double r, int min_t) {
      return susy_cs(m, Subspace::Iso, r, required_truncation(Family::SusyIso, iso_ladder_spec(), 2.0, r, min_t));
    };
    const auto rec = uncertainty_scan(make, SusyIsoBasis(m), {0.25, 0.5, 1.5, 2.0}, basis);
    // position squeezed below |z| = 1, momentum above
    const double d = std::max({rec[0].sigma_x - rec[0].sigma_p, rec[1].sigma_x - rec[1].sigma_p,
                               rec[2].sigma_p - rec[2].sigma_x, rec[3].sigma_p - rec[3].sigma_x});
    return Outcome{d, 0.0, "worst wrong-way gap"};
  });
  s.add("observables", "linearised_crossing", 30, [=] {
    const auto rec = uncertainty_scan(Family::LinLMinus, trunc_oscillator_spec(), {0.5, 1.0, 2.0}, basis);
    double d = std::abs(rec[1].sigma_x - rec[1].sigma_p);
    if (!(rec[0].sigma_p > rec[0].sigma_x && rec[2].sigma_x > rec[2].sigma_p)) d = kInf;
    return Outcome{d, 0.02};
  });
}

// ---- susy ----

void susy_checks(Suite& s, const ValidateOptions& opt) {
  const SusyModel model = q4_example_model();
  s.add("susy", "seed_residual", 0, [] {
    double worst = 0.0;
    for (const SeedSolution& u : {seed_solution(-2.5, 0.0), seed_solution(-2.5, 0.7), seed_solution(-5.5, kInf)})
      for (double x : grid(0.1, 6.0, 120)) worst = std::max(worst, u.residual(x));
    return Outcome{worst, 1e-8};
  });
  s.add("susy", "seed_ground_state", 0, [] {
    const SeedSolution u = seed_solution(1.5, kInf);
    double lo = kInf, hi = -kInf;
    for (double x : grid(0.5, 3.0, 60)) {
      const double q = u.jet(x, 0)(0) / trunc_eigenfunction(0, x);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    return Outcome{(hi - lo) / std::abs(hi), 1e-10};
  });
  s.add("susy", "wronskian_potential", 0, [&opt] {
    const std::vector<SeedSolution> seeds = opt.seeds ? *opt.seeds : q4_example_seeds();
    const Eigen::VectorXd g = grid(0.1, 6.0, 241);
    const Eigen::VectorXd v = wronskian_potential(seeds, g);
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(v(i) - q4_example_potential(g(i))));
    return Outcome{worst, 1e-6, opt.seeds ? "seeds from config" : "built-in seeds"};
  });
  s.add("susy", "nu_recovery", 0, [] {
    const NuFit fit = fit_nu({-5.5, -4.5, -3.5, -2.5}, q4_example_potential, grid(0.1, 6.0, 60));
    const std::vector<double> want = {kInf, 0.0, kInf, 0.0};
    double d = fit.max_deviation;
    for (int i = 0; i < 4; ++i)
      if (std::isinf(want[i]) ? !std::isinf(fit.nu[i]) : std::abs(fit.nu[i]) > 1e-9) d = kInf;
    return Outcome{d, 1e-6};
  });
  s.add("susy", "q0_potential", 0, [] {
    double worst = 0.0;
    for (double x : {0.3, 1.0, 4.0}) worst = std::max(worst, std::abs(wronskian_potential_at({}, x) - 0.5 * x * x));
    return Outcome{worst, 1e-14};
  });
  s.add("susy", "iso_eigen_residual", 0, [model] {
    double worst = 0.0;
    for (int n = 0; n <= 5; ++n) {
      auto jet = [&](double x) { return Eigen::Vector3d(iso_jets(model, n + 1, x, 2).row(n).transpose()); };
      worst = std::max(worst, eigen_residual_sup(jet, model.potential, energy(n), 0.1, 6.0));
    }
    return Outcome{worst, 1e-6};
  });
  s.add("susy", "new_eigen_residual", 0, [model] {
    double worst = 0.0;
    for (int j = 0; j < 2; ++j) {
      auto jet = [&](double x) { return Eigen::Vector3d(new_jets(model, 2, x, 2).row(j).transpose()); };
      worst = std::max(worst, eigen_residual_sup(jet, model.potential, model.new_energies[j], 0.1, 6.0));
    }
    return Outcome{worst, 1e-6};
  });
  s.add("susy", "eight_function_gram", 0, [model] {
    const SusyIsoBasis ib(model);
    const SusyNewBasis nb(model);
    const QuadratureRule& r = default_rule();
    Eigen::MatrixXd V(r.nodes.size(), 8);
    for (int i = 0; i < r.nodes.size(); ++i) {
      V.block(i, 0, 1, 2) = nb.jets(r.nodes(i), 2, 0).transpose();
      V.block(i, 2, 1, 6) = ib.jets(r.nodes(i), 6, 0).transpose();
    }
    const Eigen::MatrixXd G = V.transpose() * r.plain_weights.asDiagonal() * V;
    return Outcome{(G - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-8};
  });
  s.add("susy", "q2_transformed_states", 0, [] {
    const SusyModel m2 = model_from_seeds({seed_solution(-4.5, kInf), seed_solution(-3.5, 0.0)});
    double worst = 0.0;
    for (int n = 0; n <= 3; ++n) {
      auto jet = [&](double x) {
        const Eigen::VectorXd pj = trunc_jets(n, x, m2.q + 2).row(n).transpose();
        return crum_state_jet(m2.seeds, x, pj, energy(n));
      };
      worst = std::max(worst, eigen_residual_sup(jet, m2.potential, energy(n), 0.1, 6.0));
    }
    return Outcome{worst, 1e-6};
  });
  s.add("susy", "iso_heisenberg_weyl", 0, [model] {
    const SusyLadder L = susy_ladder(model);
    double worst = 0.0;
    for (int n = 0; n <= 20; ++n) {
      const auto up = susy_ladder_action(L, Subspace::Iso, Direction::Raise, n, true);
      const auto back = susy_ladder_action(L, Subspace::Iso, Direction::Lower, up.index, true);
      cplx rl = 0.0;
      if (n > 0) {
        const auto dn = susy_ladder_action(L, Subspace::Iso, Direction::Lower, n, true);
        rl = dn.coefficient * susy_ladder_action(L, Subspace::Iso, Direction::Raise, dn.index, true).coefficient;
      }
      worst = std::max(worst, std::abs(back.coefficient * up.coefficient - rl - 2.0));
    }
    return Outcome{worst, 1e-12};
  });
  s.add("susy", "six_factor_on_E1", 0, [model] {
    const auto a = susy_ladder_action(susy_ladder(model), Subspace::Iso, Direction::Lower, 1, false);
    return Outcome{std::abs(a.coefficient - std::sqrt(8640.0)) + (a.index == 0 ? 0.0 : kInf), 1e-10};
  });
  s.add("susy", "product_identity", 0, [model] {
    const SusyLadder L = susy_ladder(model);
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
      const auto dn = susy_ladder_action(L, Subspace::Iso, Direction::Lower, n, false);
      const auto up = susy_ladder_action(L, Subspace::Iso, Direction::Raise, dn.index, false);
      const double six = L.six_factor(energy(n));
      worst = std::max(worst, std::abs(up.coefficient * dn.coefficient - six) / std::abs(six));
    }
    return Outcome{worst, 1e-12};
  });
  s.add("susy", "annihilation_and_branch", 0, [model] {
    const SusyLadder L = susy_ladder(model);
    const auto e1 = susy_ladder_action(L, Subspace::Iso, Direction::Lower, 1, true);
    const auto e0 = susy_ladder_action(L, Subspace::Iso, Direction::Lower, 0, false);
    const auto n0 = susy_ladder_action(L, Subspace::New, Direction::Lower, 0, true);
    const auto nt = susy_ladder_action(L, Subspace::New, Direction::Raise, L.kappa - 1, false);
    const auto n1 = susy_ladder_action(L, Subspace::New, Direction::Lower, 1, true);
    const double d = std::abs(e1.coefficient - std::sqrt(2.0)) + std::abs(e0.coefficient) + std::abs(n0.coefficient) +
                     std::abs(nt.coefficient) + std::abs(n1.coefficient - cplx(0.0, 2.0));
    const bool idx = e0.index == -1 && n0.index == -1 && nt.index == -1 && n1.index == 0;
    return Outcome{idx ? d : kInf, 1e-14};
  });
  s.add("susy", "iso_energy", 32, [model, b = opt.basis] {
    double worst = 0.0;
    for (double r : {0.3, 1.0, 1.3, 2.0}) {
      const CoherentState cs = susy_cs(model, Subspace::Iso, std::polar(r, 0.5), b);
      worst = std::max(worst, std::abs(energy_expectation(cs) - (1.5 + 4.0 * r * r)));
    }
    return Outcome{worst, 1e-8};
  });
  s.add("susy", "iso_temporal_stability", 32, [model, b = opt.basis] {
    const cplx z = std::polar(0.9, -0.3);
    const CoherentState cs = susy_cs(model, Subspace::Iso, z, b);
    const double t = 0.8;
    const auto ev = evolve(cs, t);
    const auto ref = susy_cs(model, Subspace::Iso, z * std::polar(1.0, -2.0 * t), b);
    return Outcome{(ev.amplitudes - std::polar(1.0, -1.5 * t) * ref.vector.amplitudes).cwiseAbs().maxCoeff(), 1e-10};
  });
  s.add("susy", "new_probabilities", 0, [model] {
    double worst = 0.0;
    for (double r : {0.1, 0.5, 1.0, 2.0}) {
      const CoherentState cs = susy_cs(model, Subspace::New, r);
      worst = std::max(worst, std::abs(state_probability(cs, 1) - 6 * r * r / (1 + 6 * r * r)));
    }
    return Outcome{worst, 1e-12};
  });
  s.add("susy", "c_hat_closed_form", 0, [model] {
    double worst = 0.0;
    for (double r : {0.3, 1.0}) {
      const CoherentState cs = susy_cs(model, Subspace::New, r);
      worst = std::max(worst, std::abs(closed_form_c_hat(model.delta1, model.kappa, r) -
                                       1.0 / (cs.norm_constant * cs.norm_constant)));
    }
    return Outcome{worst, 1e-8, "against 1/C^2 of the direct sum", true};
  });
  s.add("susy", "new_energy_closed_form", 0, [model] {
    double worst = 0.0;
    for (double r : {0.3, 1.0}) {
      const CoherentState cs = susy_cs(model, Subspace::New, r);
      worst = std::max(worst, std::abs(closed_form_energy_new(model.new_energies[0], model.delta1, model.kappa, r) -
                                       energy_expectation(cs)));
    }
    return Outcome{worst, 1e-8, "", true};
  });
  s.add("susy", "new_probability_closed_form", 0, [model] {
    double worst = 0.0;
    for (double r : {0.3, 1.0}) {
      const CoherentState cs = susy_cs(model, Subspace::New, r);
      worst = std::max(worst, std::abs(closed_form_probability_new(model.delta1, model.kappa, 1, r) -
                                       state_probability(cs, 1)));
    }
    return Outcome{worst, 1e-8, "j = 1", true};
  });
  s.add("susy", "mu_new_identity", 0, [model] {
    const NewMeasureCheck c = new_measure_check(model, 1);
    return Outcome{c.max_deviation, 1e-4,
                   fmt("moment deviation %.3g, diagonal %.6g %.6g", c.moment_deviation, c.diagonal(0), c.diagonal(1)),
                   true};
  });
  s.add("susy", "mu_new_regular_branch", 0, [] {
    const NewMeasureCheck c = new_measure_check(-1.0, 3, 2);
    return Outcome{std::max(c.max_deviation, c.moment_deviation), 1e-6};
  });
}

// ---- entangle ----

void entangle_checks(Suite& s, const ValidateOptions& opt) {
  s.add("entangle", "overlap_spot_values", 0, [] {
    const double d = std::max({std::abs(halfline_overlap(0, 1) - 1.0), std::abs(halfline_overlap(1, 1) - kSqrtPi),
                               std::abs(halfline_overlap(0, 0) - kSqrtPi / 2)});
    return Outcome{d, 1e-12};
  });
  s.add("entangle", "overlap_closed_vs_quadrature", 0, [] {
    double worst = 0.0;
    for (int a = 0; a <= 20; ++a)
      for (int b = 0; a + b <= 20; ++b) {
        if (!halfline_overlap_regular(a, b)) continue;
        const double q = halfline_overlap_quadrature(a, b);
        worst = std::max(worst, std::abs(halfline_overlap(a, b) - q) / std::max(1.0, std::abs(q)));
      }
    return Outcome{worst, 1e-10, "relative to max(1, |value|)"};
  });
  s.add("entangle", "gram_odd_levels", 0, [] {
    const Eigen::MatrixXd G = halfline_gram(40);
    double worst = 0.0;
    for (int a = 1; a <= 40; a += 2)
      for (int b = 1; b <= 40; b += 2) worst = std::max(worst, std::abs(2.0 * G(a, b) - (a == b ? 1.0 : 0.0)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    worst = std::max(worst, std::max(0.0, -es.eigenvalues().minCoeff() - 1e-10));
    return Outcome{worst, 1e-10};
  });
  s.add("entangle", "splitter_amplitudes", 0, [] {
    double worst = 0.0;
    for (double th : {0.0, 0.4, kPi / 2, 2.9}) {
      const BeamSplitterSetting b{th, 0.6};
      worst = std::max(worst, std::abs(std::norm(b.r()) + b.t() * b.t() - 1.0));
    }
    return Outcome{worst, 1e-15};
  });
  s.add("entangle", "bch_vs_expm", 0, [] {
    double worst = 0.0;
    for (BeamSplitterSetting b : {BeamSplitterSetting{kPi / 2, 0.0}, BeamSplitterSetting{1.1, -0.7}})
      for (int n = 0; n <= 10; ++n) worst = std::max(worst, (bs_block(n, b) - bs_block_expm(n, b)).cwiseAbs().maxCoeff());
    return Outcome{worst, 1e-8};
  });
  s.add("entangle", "hong_ou_mandel", 0, [] {
    const Mat<cplx> U = bs_block(2, {kPi / 2, 0.0});
    const double d = std::abs(U(1, 1)) + std::abs(std::abs(U(2, 1)) - std::sqrt(0.5)) +
                     std::abs(std::abs(U(0, 1)) - std::sqrt(0.5)) + std::abs(U(2, 1) + U(0, 1));
    return Outcome{d, 1e-12};
  });
  s.add("entangle", "expansion_q1_q2", 0, [] {
    // |1, 2n+1> through the splitter against the two-series expansion, n = 1
    const int n = 1, N = 2 * n + 2;
    const double th = 1.1, ph = 0.4;
    const Mat<cplx> U = bs_block_expm(N, {th, ph});
    const cplx zeta = std::polar(std::tan(th / 2), ph);
    const double c = std::cos(th / 2);
    auto lf = [](int k) { return log_factorial(k); };
    Vec<cplx> want = Vec<cplx>::Zero(N + 1);
    for (int k = 0; k <= 2 * n + 1; ++k)
      want(k + 1) += std::pow(zeta, k) / std::exp(lf(k)) * std::pow(c, 2 * n) *
                     std::exp(0.5 * (lf(k + 1) + lf(2 * n + 1) - lf(2 * n + 1 - k)));
    for (int k = 0; k <= 2 * n + 2; ++k)
      want(k) -= std::pow(zeta, k) / std::exp(lf(k)) * std::tan(th / 2) * std::polar(1.0, -ph) *
                 std::sqrt(2.0 * n + 2) * std::pow(c, 2 * n + 2) * std::exp(0.5 * (lf(k) + lf(2 * n + 2) - lf(2 * n + 2 - k)));
    return Outcome{(U.col(1) - want).cwiseAbs().maxCoeff(), 1e-10};
  });
  s.add("entangle", "splitter_norm_and_number", 0, [] {
    Vec<cplx> a = Vec<cplx>::Zero(8), b = Vec<cplx>::Zero(8);
    a << 0.3, cplx(0.1, 0.4), 0.5, 0, 0.2, 0, 0, 0.1;
    b << 0.6, 0, cplx(0.2, -0.3), 0.1, 0, 0.4, 0, 0;
    const TwoModeState in = product_state(a, b, 14);
    BeamSplitter bs({1.3, 0.9});
    const TwoModeState out = bs.apply(in);
    double leak = 0.0;
    for (int m = 0; m < out.amplitudes.rows(); ++m)
      for (int k = 0; k < out.amplitudes.cols(); ++k)
        if (m + k > 14) leak += std::abs(out.amplitudes(m, k));
    return Outcome{std::abs(out.norm() - in.norm()) + leak, 1e-10};
  });
  s.add("entangle", "reduced_density_properties", 0, [] {
    const Eigen::MatrixXd G = halfline_gram(20);
    Vec<cplx> a = Vec<cplx>::Zero(6), b = Vec<cplx>::Zero(6);
    a(1) = 1.0;
    b << 0.2, 0.5, cplx(0.1, 0.3), 0.4, 0.0, 0.3;
    const Mat<cplx> rho = reduced_density(product_state(a, b, 10), G);
    const double pure = std::abs(linear_entropy(rho));
    const double tr = std::abs(rho.trace() - 1.0);
    // HOM output: mixed under the half-line metric
    Vec<cplx> one = Vec<cplx>::Zero(2);
    one(1) = 1.0;
    BeamSplitter bs({kPi / 2, 0.0});
    const Mat<cplx> rh = reduced_density(bs.apply(product_state(one, one, 4)), G);
    Eigen::SelfAdjointEigenSolver<Mat<cplx>> es(rh);
    const double s_hom = linear_entropy(rh);
    const double d = std::max({pure, tr, std::abs(rh.trace() - 1.0), std::max(0.0, -es.eigenvalues().minCoeff() - 1e-10),
                               s_hom > 1e-3 ? 0.0 : 1.0});
    return Outcome{d, 1e-10, fmt("HOM entropy %.6g", s_hom)};
  });
  s.add("entangle", "global_phase_invariance", 0, [] {
    const Eigen::MatrixXd G = halfline_gram(30);
    Vec<cplx> a = Vec<cplx>::Zero(2), b = Vec<cplx>::Zero(12);
    a(1) = 1.0;
    for (int k = 0; k < 12; ++k) b(k) = std::polar(std::pow(0.6, k), 0.3 * k);
    BeamSplitter bs({kPi / 2, 0.2});
    const double s0 = linear_entropy(reduced_density(bs.apply(product_state(a, b, 14)), G));
    double worst = 0.0;
    for (double p : {0.7, 2.1, -1.4}) {
      const Vec<cplx> bp = std::polar(1.0, p) * b;
      worst = std::max(worst, std::abs(linear_entropy(reduced_density(bs.apply(product_state(a, bp, 14)), G)) - s0));
    }
    return Outcome{worst, 1e-12};
  });
  s.add("entangle", "susy_state_expansion", 0, [] {
    const SusyNewBasis nb(q4_example_model());
    Vec<cplx> c = Vec<cplx>::Zero(2);
    c(0) = 1.0;
    const Expansion e = expand_halfline(nb, c, 45);
    return Outcome{1.0 - e.recovered_norm, 1e-6, "45 odd levels"};
  });
  if (!opt.include_entropy) return;
  s.add("entangle", "entropy_no_mixing", 0, [] {
    EntropyOptions o;
    o.check_convergence = false;
    double worst = 0.0;
    for (const auto& r : entropy_scan(Family::LMinus, {0.5, 1.5}, {0.0, 0.0}, o)) worst = std::max(worst, std::abs(r.entropy));
    return Outcome{worst, 1e-8};
  });
  s.add("entangle", "entropy_trunc_flat", 0, [] {
    const auto recs = entropy_scan(Family::LMinus, {0.0, 0.5, 1.0, 1.5, 2.0}, {kPi / 2, 0.0});
    double lo = kInf, hi = -kInf;
    bool ok = true;
    for (const auto& r : recs) {
      lo = std::min(lo, r.entropy);
      hi = std::max(hi, r.entropy);
      ok = ok && r.converged && r.entropy >= 0.0 && r.entropy < 1.0;
    }
    return Outcome{ok ? hi - lo : kInf, 0.15, fmt("S in [%.4f, %.4f]", lo, hi)};
  });
  s.add("entangle", "entropy_susy_new_band", 0, [] {
    const auto recs = entropy_scan(Family::SusyNew, {0.5, 1.5}, {kPi / 2, 0.0});
    double worst = 0.0;
    bool ok = true;
    for (const auto& r : recs) {
      worst = std::max(worst, std::abs(r.entropy - 0.5));
      ok = ok && r.converged;
    }
    return Outcome{ok ? worst : kInf, 0.2, "max |S - 0.5|"};
  });
}

}  // namespace

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Report: return "REPORT";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

std::vector<CheckResult> run_validation(const ValidateOptions& opt) {
  Suite s(opt);
  numerics_checks(s);
  fock_checks(s);
  coherent_checks(s, opt.basis);
  observables_checks(s, opt.basis);
  susy_checks(s, opt);
  entangle_checks(s, opt);
  return s.take();
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (r.status == CheckStatus::Fail) return false;
  return true;
}

}  // namespace tocs
