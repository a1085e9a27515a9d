#include "tocs/fock.hpp"

#include <cmath>

namespace tocs {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* basis_name(Basis b) {
  switch (b) {
    case Basis::Trunc: return "TRUNC";
    case Basis::SusyIso: return "SUSY_ISO";
    case Basis::SusyNew: return "SUSY_NEW";
    case Basis::FullHO: return "FULL_HO";
  }
  return "?";
}

void LadderSpec::validate(int k_check) const {
  if (f(0) != 0.0) throw std::invalid_argument(name + ": f(0) must vanish");
  if (dim && g(*dim) != 0.0) throw std::invalid_argument(name + ": g(dim) must vanish");
  const int top = dim ? std::min(*dim, k_check) : k_check;
  for (int k = 0; k + 1 < top; ++k)
    if (!(xi(k + 1) > xi(k))) throw std::invalid_argument(name + ": xi must increase");
}

LadderSpec trunc_oscillator_spec() {
  LadderSpec s;
  s.name = "truncated-oscillator";
  s.basis = Basis::Trunc;
  s.f = [](int k) { return 2.0 * k * (2.0 * k + 1.0); };
  s.g = s.f;
  s.xi = [](int k) { return energy(k); };
  s.displacement_radius = 0.5;
  return s;
}

LadderSpec harmonic_spec(Basis basis) {
  LadderSpec s;
  s.name = "harmonic";
  s.basis = basis;
  s.f = [](int k) { return double(k); };
  s.g = s.f;
  s.xi = [](int k) { return k + 0.5; };
  return s;
}

double commutator_check(const LadderSpec& spec, int n_max, const std::function<double(int)>& target) {
  const int n = n_max + 3;
  double worst = 0.0;
  for (int k = 0; k <= n_max; ++k) {
    FockVector<double> e{spec.basis, Vec<double>::Zero(n)};
    e.amplitudes(k) = 1.0;
    const auto lr = ladder_apply(spec, Direction::Lower, ladder_apply(spec, Direction::Raise, e));
    const auto rl = ladder_apply(spec, Direction::Raise, ladder_apply(spec, Direction::Lower, e));
    const double c = lr.amplitudes(k) - rl.amplitudes(k);
    worst = std::max(worst, std::abs(c - target(k)));
  }
  return worst;
}

double commutator_check(const LadderSpec& spec, int n_max) {
  return commutator_check(spec, n_max, [&](int k) { return 4.0 * spec.xi(k); });
}

double energy(int k) { return 2.0 * k + 1.5; }

double trunc_log_norm(int k) {
  return -0.5 * (0.5 * std::log(kPi) + k * std::log(4.0) + log_factorial(2 * k + 1));
}

double trunc_eigenfunction(int k, double x) {
  const SignedLog h = hermite_phys_log(2 * k + 1, x);
  return h.sign * std::exp(trunc_log_norm(k) + h.log_abs - 0.5 * x * x);
}

double trunc_eigenfunction_d2(int k, double x) {
  // (e^{-x²/2} H_n)'' = e^{-x²/2} (H_n'' - 2x H_n' + (x² - 1) H_n),
  // with H_n' = 2n H_{n-1} and H_n'' = 4n(n-1) H_{n-2}
  const int n = 2 * k + 1;
  const double lb = trunc_log_norm(k) - 0.5 * x * x;
  auto term = [&](int m, double coeff) {
    if (m < 0 || coeff == 0.0) return 0.0;
    const SignedLog h = hermite_phys_log(m, x);
    const double mag = std::exp(lb + h.log_abs + std::log(std::abs(coeff)));
    return (coeff > 0 ? 1 : -1) * h.sign * mag;
  };
  return term(n - 2, 4.0 * n * (n - 1)) + term(n - 1, -2.0 * x * 2.0 * n) + term(n, x * x - 1.0);
}

Eigen::MatrixXd ho_jets(int nmax, double x, int order) {
  const int top = nmax + order;
  Eigen::VectorXd psi(top + 1);
  psi(0) = std::exp(-0.5 * x * x) / std::pow(kPi, 0.25);
  if (top >= 1) psi(1) = std::sqrt(2.0) * x * psi(0);
  for (int n = 1; n < top; ++n)
    psi(n + 1) = std::sqrt(2.0 / (n + 1)) * x * psi(n) - std::sqrt(double(n) / (n + 1)) * psi(n - 1);

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nmax + 1, order + 1);
  Eigen::VectorXd cur = psi;
  J.col(0) = cur.head(nmax + 1);
  for (int d = 1; d <= order; ++d) {
    // D psi_m = sqrt(m/2) psi_{m-1} - sqrt((m+1)/2) psi_{m+1}
    const int len = top - d + 1;
    Eigen::VectorXd next(len);
    for (int m = 0; m < len; ++m) {
      double v = -std::sqrt((m + 1) / 2.0) * cur(m + 1);
      if (m > 0) v += std::sqrt(m / 2.0) * cur(m - 1);
      next(m) = v;
    }
    cur = next;
    J.col(d) = cur.head(nmax + 1);
  }
  return J;
}

Eigen::MatrixXd trunc_jets(int kmax, double x, int order) {
  const Eigen::MatrixXd H = ho_jets(2 * kmax + 1, x, order);
  Eigen::MatrixXd J(kmax + 1, order + 1);
  for (int k = 0; k <= kmax; ++k) J.row(k) = std::sqrt(2.0) * H.row(2 * k + 1);
  return J;
}

}  // namespace tocs
