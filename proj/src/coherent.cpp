#include "tocs/coherent.hpp"

#include <cmath>

namespace tocs {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::LMinus: return "L_MINUS";
    case Family::Displacement: return "DISPLACEMENT";
    case Family::LinLMinus: return "LIN_L_MINUS";
    case Family::LinDisplacement: return "LIN_DISPLACEMENT";
    case Family::SusyIso: return "SUSY_ISO";
    case Family::SusyNew: return "SUSY_NEW";
  }
  return "?";
}

double log_unnormalized_amplitude(Family family, const LadderSpec& spec, double alpha, int k, double r) {
  const double lr = k == 0 ? 0.0 : (r == 0.0 ? kNegInf : k * std::log(r));
  switch (family) {
    case Family::LMinus: {
      double lf = 0.0;  // log [f(k)]!
      for (int i = 1; i <= k; ++i) lf += std::log(spec.f(i));
      return lr - 0.5 * lf;
    }
    case Family::Displacement: {
      double lg = 0.0;
      for (int i = 1; i <= k; ++i) lg += std::log(spec.g(i));
      return lr + 0.5 * lg - log_factorial(k);
    }
    case Family::LinLMinus:
      return lr - 0.5 * k * std::log(alpha) - 0.5 * log_factorial(k);
    case Family::LinDisplacement:
      return lr + 0.5 * k * std::log(alpha) - 0.5 * log_factorial(k);
    case Family::SusyIso:
      return lr + 0.5 * k * std::log(2.0) - 0.5 * log_factorial(k);
    case Family::SusyNew: break;
  }
  throw FamilyMismatch("no real ladder series for this family");
}

CoherentState build_cs(Family family, const LadderSpec& spec, cplx z, double alpha, int truncation) {
  if (truncation < 8) throw std::invalid_argument("build_cs: truncation must be at least 8");
  if (family == Family::SusyNew) throw FamilyMismatch("use susy_cs for the new-level subspace");
  const double r = std::abs(z);
  if (family == Family::Displacement && spec.displacement_radius && r >= *spec.displacement_radius)
    throw NotNormalizable("displacement series diverges for |z| >= " +
                          std::to_string(*spec.displacement_radius));
  const int n = spec.dim ? std::min(truncation, *spec.dim) : truncation;

  // generalized factorials accumulate with the amplitude recurrence
  Eigen::VectorXd logc(n);
  double lf = 0.0, lg = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      if (family == Family::LMinus) lf += std::log(spec.f(k));
      if (family == Family::Displacement) lg += std::log(spec.g(k));
    }
    const double lr = k == 0 ? 0.0 : (r == 0.0 ? kNegInf : k * std::log(r));
    switch (family) {
      case Family::LMinus: logc(k) = lr - 0.5 * lf; break;
      case Family::Displacement: logc(k) = lr + 0.5 * lg - log_factorial(k); break;
      default: logc(k) = log_unnormalized_amplitude(family, spec, alpha, k, r);
    }
  }
  const double top = logc.maxCoeff();
  Eigen::VectorXd mag = (logc.array() - top).exp();
  const double norm = mag.norm();
  mag /= norm;

  const bool finite_complete = spec.dim && n == *spec.dim;
  if (!finite_complete && mag(n - 1) > 1e-12)
    throw TruncationTooSmall("last amplitude " + std::to_string(mag(n - 1)) + " at truncation " +
                             std::to_string(n));

  CoherentState cs;
  cs.family = family;
  cs.z = z;
  cs.alpha = alpha;
  cs.spec = spec;
  cs.vector.basis = family == Family::SusyIso ? Basis::SusyIso : spec.basis;
  cs.vector.amplitudes.resize(n);
  const double phase = std::arg(z);
  for (int k = 0; k < n; ++k) cs.vector.amplitudes(k) = std::polar(mag(k), k * phase);
  // C_z = (Σ|c_k|²)^{-1/2} in unnormalised units
  cs.norm_constant = std::exp(-top) / norm;
  return cs;
}

double eigen_residual(const CoherentState& cs) {
  const int n = cs.truncation();
  const auto& a = cs.vector.amplitudes;
  std::function<double(int)> step;
  if (cs.family == Family::LMinus)
    step = [&](int k) { return std::sqrt(cs.spec.f(k)); };
  else if (cs.family == Family::LinLMinus)
    step = [&](int k) { return std::sqrt(cs.alpha * k); };
  else
    throw FamilyMismatch("eigen_residual applies to annihilation-type families only");
  Vec<cplx> res = -cs.z * a;
  for (int k = 1; k < n; ++k) res(k - 1) += step(k) * a(k);
  return res.norm();
}

double state_probability(const CoherentState& cs, int n) {
  if (n < 0 || n >= cs.truncation()) throw IndexOutOfRange("state_probability index " + std::to_string(n));
  return std::norm(cs.vector.amplitudes(n));
}

double energy_expectation(const CoherentState& cs) {
  double e = 0.0;
  for (int n = 0; n < cs.truncation(); ++n) e += std::norm(cs.vector.amplitudes(n)) * cs.spec.xi(n);
  return e;
}

FockVector<cplx> evolve(const CoherentState& cs, double t) {
  FockVector<cplx> out = cs.vector;
  for (int n = 0; n < out.truncation(); ++n) out.amplitudes(n) *= std::polar(1.0, -cs.spec.xi(n) * t);
  return out;
}

double closed_form_cz(double r) {
  if (r == 0.0) return 1.0;
  return std::pow(std::sinh(r) / r, -0.5);
}

double closed_form_cz_tilde(double r) { return std::pow(1.0 - 4.0 * r * r, 0.75); }

double closed_form_energy(double r) {
  if (r < 1e-6) return 1.5 + r * r / 3.0;
  return 0.5 + r / std::tanh(r);
}

std::vector<double> displacement_partial_sums(const LadderSpec& spec, double r, int terms) {
  std::vector<double> sums;
  sums.reserve(terms);
  double s = 0.0;
  for (int k = 0; k < terms; ++k) {
    s += std::exp(2.0 * log_unnormalized_amplitude(Family::Displacement, spec, 1.0, k, r));
    sums.push_back(s);
  }
  return sums;
}

const char* measure_name(MeasureId id) {
  switch (id) {
    case MeasureId::MuTruncReference: return "MU_TRUNC";
    case MeasureId::MuTruncCorrected: return "MU_TRUNC_CORRECTED";
    case MeasureId::MuIso: return "MU_ISO";
  }
  return "?";
}

double Measure::radial_density(double r, int truncation) const {
  const CoherentState cs = build_cs(family, spec, r, alpha, truncation);
  return weight(r) / (cs.norm_constant * cs.norm_constant);
}

Measure mu_trunc_reference() {
  return {Family::LMinus, MeasureId::MuTruncReference,
          [](double r) { return r * r * std::exp(-r) / (8.0 * kPi); }, 2.0, trunc_oscillator_spec()};
}

Measure mu_trunc_corrected() {
  // moment problem ∫ r^{2k+1} h(r) dr = (2k+1)!/(2π) is solved by h = e^{-r}/(2π)
  return {Family::LMinus, MeasureId::MuTruncCorrected, [](double r) { return std::exp(-r) / (2.0 * kPi); },
          2.0, trunc_oscillator_spec()};
}

Measure mu_iso() {
  // C(r)^2 = e^{-2r^2} for the iso family
  return {Family::SusyIso, MeasureId::MuIso, [](double r) { return 2.0 / kPi * std::exp(-2.0 * r * r); },
          2.0, harmonic_spec(Basis::SusyIso)};
}

IdentityCheck identity_resolution_check(const Measure& measure, int n_max, double r_max) {
  IdentityCheck out;
  out.diagonal.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    auto integrand = [&](double r) {
      if (r == 0.0) return 0.0;
      const double la = log_unnormalized_amplitude(measure.family, measure.spec, measure.alpha, n, r);
      return 2.0 * kPi * r * measure.weight(r) * std::exp(2.0 * la);
    };
    if (std::abs(integrand(r_max)) > 1e-8)
      throw TailTooFat("moment integrand at r_max = " + std::to_string(r_max) + " is " +
                       std::to_string(integrand(r_max)));
    out.diagonal(n) = integrate_adaptive(integrand, 0.0, r_max, 1e-12, 1e-15);
    out.max_deviation = std::max(out.max_deviation, std::abs(out.diagonal(n) - 1.0));
  }
  return out;
}

}  // namespace tocs
