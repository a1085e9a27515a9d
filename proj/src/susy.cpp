#include "tocs/susy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tocs {

namespace {

constexpr double kPi = 3.14159265358979323846;

double binom(int n, int k) {
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return b;
}

// The Wronskian of growing seeds cancels heavily, so seeds and determinants run in long double.
using ld = long double;
using VecL = Eigen::Matrix<ld, Eigen::Dynamic, 1>;

// d^k/dx^k e^{-x²/2} = (-1)^k He_k(x) e^{-x²/2}
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, 1> gauss_jet(T x, int order) {
  Eigen::Matrix<T, Eigen::Dynamic, 1> g(order + 1);
  const T e = std::exp(-x * x / 2);
  T h0 = 1, h1 = x;
  for (int k = 0; k <= order; ++k) {
    T he;
    if (k == 0) he = 1;
    else if (k == 1) he = x;
    else {
      he = x * h1 - T(k - 1) * h0;
      h0 = h1;
      h1 = he;
    }
    g(k) = ((k % 2) ? -he : he) * e;
  }
  return g;
}

ld kummer_ld(ld a, ld b, ld x) {
  ld term = 1, sum = 1;
  for (int k = 0; k < 20000; ++k) {
    if (a + k == 0) return sum;
    if (b + k == 0) throw PoleError("1F1 with b at a nonpositive integer");
    term *= (a + k) / (b + k) * x / (k + 1);
    sum += term;
    if (std::abs(term) <= 1e-21L * std::abs(sum) && k > std::abs(a) + std::abs(x)) return sum;
  }
  throw DivergenceError("1F1 series did not settle");
}

// derivatives of x^{p0} 1F1(a; b; x²), expanded into terms c x^p 1F1(a+j; b+j; x²)
VecL kummer_part_jet(ld a, ld b, int p0, ld x, int order) {
  std::map<std::pair<int, int>, ld> terms{{{p0, 0}, 1.0L}};
  VecL g(order + 1);
  for (int j = 0; j <= order; ++j) g(j) = kummer_ld(a + j, b + j, x * x);
  VecL out(order + 1);
  for (int d = 0; d <= order; ++d) {
    ld s = 0;
    for (const auto& [key, c] : terms) s += c * std::pow(x, key.first) * g(key.second);
    out(d) = s;
    if (d == order) break;
    std::map<std::pair<int, int>, ld> next;
    for (const auto& [key, c] : terms) {
      const auto [p, j] = key;
      if (p > 0) next[{p - 1, j}] += c * p;
      next[{p + 1, j + 1}] += c * 2 * (a + j) / (b + j);
    }
    terms.swap(next);
  }
  return out;
}

template <class V>
V leibniz(const V& f, const V& g, int order) {
  V out(order + 1);
  for (int n = 0; n <= order; ++n) {
    typename V::Scalar s = 0;
    for (int k = 0; k <= n; ++k) s += binom(n, k) * f(k) * g(n - k);
    out(n) = s;
  }
  return out;
}

VecL even_jet_ld(double eps, ld x, int order) {
  return leibniz(gauss_jet<ld>(x, order), kummer_part_jet((1.0L - 2.0L * eps) / 4, 0.5L, 0, x, order), order);
}

VecL odd_jet_ld(double eps, ld x, int order) {
  return leibniz(gauss_jet<ld>(x, order), kummer_part_jet((3.0L - 2.0L * eps) / 4, 1.5L, 1, x, order), order);
}

VecL seed_jet_ld(const SeedSolution& s, ld x, int order) {
  VecL u = VecL::Zero(order + 1);
  if (!s.pure_odd()) u += even_jet_ld(s.epsilon, x, order);
  if (s.odd_weight != 0.0) u += ld(s.odd_weight) * odd_jet_ld(s.epsilon, x, order);
  return u;
}

struct DetTerm {
  double c;
  std::vector<int> orders;
};

std::vector<DetTerm> differentiate(const std::vector<DetTerm>& in) {
  std::vector<DetTerm> out;
  for (const DetTerm& t : in) {
    for (size_t i = 0; i < t.orders.size(); ++i) {
      std::vector<int> o = t.orders;
      ++o[i];
      bool dup = false;
      for (size_t k = 0; k < o.size(); ++k)
        if (k != i && o[k] == o[i]) dup = true;
      if (dup) continue;
      auto it = std::find_if(out.begin(), out.end(), [&](const DetTerm& e) { return e.orders == o; });
      if (it == out.end()) out.push_back({t.c, o});
      else it->c += t.c;
    }
  }
  return out;
}

template <class V>
typename V::Scalar det_of(const std::vector<V>& jets, const std::vector<DetTerm>& terms) {
  using T = typename V::Scalar;
  const int q = int(jets.size());
  T s = 0;
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> M(q, q);
  for (const DetTerm& t : terms) {
    for (int r = 0; r < q; ++r)
      for (int c = 0; c < q; ++c) M(r, c) = jets[c](t.orders[r]);
    s += T(t.c) * M.determinant();
  }
  return s;
}

struct WJetL {
  ld w = 0, w1 = 0, w2 = 0;
};

template <class V>
WJetL wronskian_jet_t(const std::vector<V>& jets) {
  const int q = int(jets.size());
  WJetL out;
  if (q == 0) {
    out.w = 1;
    return out;
  }
  std::vector<DetTerm> base{{1.0, {}}};
  for (int i = 0; i < q; ++i) base[0].orders.push_back(i);
  const auto d1 = differentiate(base);
  const auto d2 = differentiate(d1);
  out.w = det_of(jets, base);
  out.w1 = det_of(jets, d1);
  out.w2 = det_of(jets, d2);
  return out;
}

// x²/2 - (ln W)''
double potential_from(const WJetL& w, double x) {
  return double(ld(x) * x / 2 - (w.w2 * w.w - w.w1 * w.w1) / (w.w * w.w));
}

Polynomial poly(std::initializer_list<std::pair<int, double>> entries) {
  int top = 0;
  for (const auto& e : entries) top = std::max(top, e.first);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(top + 1);
  for (const auto& e : entries) c(e.first) += e.second;
  return Polynomial(c);
}

const Polynomial& q4_denominator() {
  static const Polynomial p = poly({{8, 16}, {6, -64}, {4, 120}, {0, 45}});
  return p;
}

double recip_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  const SignedLog g = log_gamma_signed(x);
  return g.sign * std::exp(-g.log_abs);
}

}  // namespace

Eigen::VectorXd seed_even_jet(double epsilon, double x, int order) {
  return even_jet_ld(epsilon, x, order).cast<double>();
}

Eigen::VectorXd seed_odd_jet(double epsilon, double x, int order) {
  return odd_jet_ld(epsilon, x, order).cast<double>();
}

Eigen::VectorXd SeedSolution::jet(double x, int order) const { return seed_jet_ld(*this, x, order).cast<double>(); }

double SeedSolution::residual(double x) const {
  const Eigen::VectorXd j = jet(x, 2);
  const double res = -0.5 * j(2) + 0.5 * x * x * j(0) - epsilon * j(0);
  const double scale = 0.5 * std::abs(j(2)) + 0.5 * x * x * std::abs(j(0)) + std::abs(epsilon * j(0));
  return scale == 0.0 ? 0.0 : std::abs(res) / scale;
}

SeedSolution seed_solution(double epsilon, double nu) {
  SeedSolution s;
  s.epsilon = epsilon;
  s.nu = nu;
  if (std::isinf(nu)) {
    s.odd_weight = 1.0;
  } else if (nu != 0.0) {
    const double a_o = (3.0 - 2.0 * epsilon) / 4.0, a_e = (1.0 - 2.0 * epsilon) / 4.0;
    auto pole = [](double v) { return v <= 0.0 && v == std::floor(v); };
    if (pole(a_o) || pole(a_e)) throw GammaPole("seed at epsilon = " + std::to_string(epsilon));
    const SignedLog go = log_gamma_signed(a_o), ge = log_gamma_signed(a_e);
    s.odd_weight = 2.0 * nu * go.sign * ge.sign * std::exp(go.log_abs - ge.log_abs);
  }
  return s;
}

WronskianJet wronskian_jet(const std::vector<Eigen::VectorXd>& jets) {
  const WJetL w = wronskian_jet_t(jets);
  return {double(w.w), double(w.w1), double(w.w2)};
}

double wronskian_potential_at(const std::vector<SeedSolution>& seeds, double x) {
  const int q = int(seeds.size());
  if (q == 0) return 0.5 * x * x;
  std::vector<VecL> jets;
  for (const auto& s : seeds) jets.push_back(seed_jet_ld(s, x, q + 1));
  const WJetL w = wronskian_jet_t(jets);
  if (w.w == 0) throw SingularWronskian("W = 0 at x = " + std::to_string(x));
  return potential_from(w, x);
}

Eigen::VectorXd wronskian_potential(const std::vector<SeedSolution>& seeds, const Eigen::VectorXd& grid) {
  const int q = int(seeds.size());
  Eigen::VectorXd V(grid.size());
  int sign = 0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid(i);
    std::vector<VecL> jets;
    for (const auto& s : seeds) jets.push_back(seed_jet_ld(s, x, q + 1));
    const WJetL w = wronskian_jet_t(jets);
    const int sg = w.w > 0 ? 1 : (w.w < 0 ? -1 : 0);
    if (sg == 0 || (sign != 0 && sg != sign))
      throw SingularWronskian("Wronskian vanishes near grid point x = " + std::to_string(x));
    sign = sg;
    V(i) = q == 0 ? 0.5 * x * x : potential_from(w, x);
  }
  return V;
}

const Rational& q4_example_potential_rational() {
  static const Rational v = [] {
    const Polynomial& P = q4_denominator();
    const Polynomial N = poly({{16, 256}, {14, -2560}, {12, 10496}, {10, -19584}, {8, 27360}, {6, -10080},
                               {4, -10800}, {2, 16200}, {0, 2025}});
    const Polynomial P2 = P * P;
    return Rational(Polynomial::monomial(2, 0.5) * P2 - 4.0 * N, P2);
  }();
  return v;
}

double q4_example_potential(double x) { return q4_example_potential_rational()(x); }

const std::array<Rational, 4>& q4_example_eta() {
  static const std::array<Rational, 4> eta = [] {
    const Polynomial& P = q4_denominator();
    return std::array<Rational, 4>{
        Rational(poly({{12, 16}, {10, -32}, {8, 360}, {6, 240}, {4, -795}, {2, -7110}, {0, 1935}}), P),
        Rational(4.0 * poly({{11, -16}, {9, 16}, {7, -216}, {5, 48}, {3, 915}, {1, 315}}), P),
        Rational(6.0 * poly({{10, 16}, {8, -16}, {6, 88}, {4, -120}, {2, 165}, {0, -105}}), P),
        Rational(-4.0 * poly({{9, 16}, {7, -32}, {5, 24}, {3, 120}, {1, 45}}), P)};
  }();
  return eta;
}

std::vector<SeedSolution> q4_example_seeds() {
  const double inf = std::numeric_limits<double>::infinity();
  return {seed_solution(-5.5, inf), seed_solution(-4.5, 0.0), seed_solution(-3.5, inf),
          seed_solution(-2.5, 0.0)};
}

SusyModel q4_example_model() {
  SusyModel m;
  m.q = 4;
  m.seeds = q4_example_seeds();
  m.kappa = 2;
  m.new_energies = {-4.5, -2.5};
  m.delta1 = 1.5 - m.new_energies[0];
  m.explicit_intertwiner = true;
  m.potential = q4_example_potential;
  return m;
}

SusyModel model_from_seeds(std::vector<SeedSolution> seeds) {
  SusyModel m;
  m.q = int(seeds.size());
  for (int i = 0; i + 1 < m.q; ++i)
    if (!(seeds[i].epsilon < seeds[i + 1].epsilon))
      throw std::invalid_argument("seed energies must increase strictly");
  if (m.q > 0 && !(seeds.back().epsilon < 0.5)) throw std::invalid_argument("seed energies must stay below 1/2");
  m.kappa = m.q / 2;
  for (int j = 0; j < m.kappa; ++j) m.new_energies.push_back(seeds[2 * j + 1].epsilon);
  for (int j = 1; j < m.kappa; ++j)
    if (std::abs(m.new_energies[j] - m.new_energies[0] - 2.0 * j) > 1e-12)
      throw std::invalid_argument("new levels must be spaced by 2");
  m.delta1 = m.kappa > 0 ? 1.5 - m.new_energies[0] : 0.0;
  m.seeds = std::move(seeds);
  const auto s = m.seeds;
  m.potential = [s](double x) { return wronskian_potential_at(s, x); };
  return m;
}

Eigen::MatrixXd iso_jets(const SusyModel& model, int count, double x, int order) {
  if (!model.explicit_intertwiner) throw UnsupportedModel("iso eigenfunctions need the explicit q = 4 intertwiner");
  const Eigen::MatrixXd psi = trunc_jets(count - 1, x, 4 + order);
  const auto& eta = q4_example_eta();
  std::array<Eigen::VectorXd, 5> ej;
  for (int k = 0; k < 4; ++k) ej[k] = eta[k].jet(x, order);
  ej[4] = Eigen::VectorXd::Zero(order + 1);
  ej[4](0) = 1.0;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(count, order + 1);
  for (int d = 0; d <= order; ++d)
    for (int k = 0; k <= 4; ++k)
      for (int j = 0; j <= d; ++j) out.col(d) += binom(d, j) * ej[k](j) * psi.col(k + d - j);
  for (int n = 0; n < count; ++n) {
    double prod = 1.0;
    for (const auto& s : model.seeds) prod *= energy(n) - s.epsilon;
    out.row(n) *= 0.25 / std::sqrt(prod);
  }
  return out;
}

double iso_eigenfunction(const SusyModel& model, int n, double x) { return iso_jets(model, n + 1, x, 0)(n, 0); }

Eigen::MatrixXd new_jets(const SusyModel& model, int count, double x, int order) {
  if (!model.explicit_intertwiner) throw UnsupportedModel("new-level closed forms exist only for the q = 4 example");
  if (count > 2) throw IndexOutOfRange("only two new levels");
  static const std::array<Rational, 2> R = [] {
    const double c = std::pow(kPi, -0.25);
    return std::array<Rational, 2>{
        Rational(4.0 * std::sqrt(3.0) * c * poly({{7, 8}, {5, -4}, {3, 10}, {1, 15}}), q4_denominator()),
        Rational(2.0 / std::sqrt(3.0) * c * poly({{9, 16}, {5, 72}, {1, -135}}), q4_denominator())};
  }();
  const Eigen::VectorXd g = gauss_jet<double>(x, order);
  Eigen::MatrixXd out(count, order + 1);
  for (int j = 0; j < count; ++j) out.row(j) = leibniz(g, R[j].jet(x, order), order).transpose();
  return out;
}

double new_eigenfunction(const SusyModel& model, int j, double x) { return new_jets(model, j + 1, x, 0)(j, 0); }

SusyIsoBasis::SusyIsoBasis(SusyModel model) : model_(std::move(model)) {}
Eigen::MatrixXd SusyIsoBasis::jets(double x, int count, int order) const { return iso_jets(model_, count, x, order); }

SusyNewBasis::SusyNewBasis(SusyModel model) : model_(std::move(model)) {}
Eigen::MatrixXd SusyNewBasis::jets(double x, int count, int order) const { return new_jets(model_, count, x, order); }

double eigen_residual_sup(const std::function<Eigen::Vector3d(double)>& phi_jet,
                          const std::function<double(double)>& potential, double e, double a, double b, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a + (b - a) * i / (n - 1);
    const Eigen::Vector3d p = phi_jet(x);
    worst = std::max(worst, std::abs(-0.5 * p(2) + (potential(x) - e) * p(0)));
  }
  return worst;
}

Eigen::Vector3d crum_state_jet(const std::vector<SeedSolution>& seeds, double x, const Eigen::VectorXd& psi_jet,
                               double e) {
  const int q = int(seeds.size());
  std::vector<VecL> jets;
  for (const auto& s : seeds) jets.push_back(seed_jet_ld(s, x, q + 2));
  const WJetL B = wronskian_jet_t(jets);
  jets.push_back(psi_jet.head(q + 3).cast<ld>());
  const WJetL A = wronskian_jet_t(jets);
  ld prod = std::pow(2.0L, q);
  for (const auto& s : seeds) prod *= e - s.epsilon;
  const ld nrm = 1 / std::sqrt(prod);
  const ld b = B.w;
  Eigen::Vector3d phi;
  phi(0) = double(nrm * A.w / b);
  phi(1) = double(nrm * (A.w1 * b - A.w * B.w1) / (b * b));
  phi(2) = double(nrm * (A.w2 / b - 2 * A.w1 * B.w1 / (b * b) - A.w * B.w2 / (b * b) +
                         2 * A.w * B.w1 * B.w1 / (b * b * b)));
  return phi;
}

NuFit fit_nu(const std::vector<double>& epsilons, const std::function<double(double)>& target,
             const Eigen::VectorXd& grid) {
  const int q = int(epsilons.size());
  const int npts = int(grid.size());
  std::vector<std::vector<VecL>> even(q), odd(q);
  Eigen::VectorXd tv(npts);
  for (int i = 0; i < q; ++i)
    for (int p = 0; p < npts; ++p) {
      even[i].push_back(even_jet_ld(epsilons[i], grid(p), q + 1));
      odd[i].push_back(odd_jet_ld(epsilons[i], grid(p), q + 1));
    }
  for (int p = 0; p < npts; ++p) tv(p) = target(grid(p));

  auto objective = [&](const std::vector<double>& beta, int stride = 1) {
    double worst = 0.0;
    int sign = 0;
    std::vector<VecL> jets(q);
    for (int p = 0; p < npts; p += stride) {
      for (int i = 0; i < q; ++i) jets[i] = ld(std::cos(beta[i])) * even[i][p] + ld(std::sin(beta[i])) * odd[i][p];
      const WJetL w = wronskian_jet_t(jets);
      const int sg = w.w > 0 ? 1 : (w.w < 0 ? -1 : 0);
      if (sg == 0 || (sign != 0 && sg != sign)) return 1e300;  // singular partner
      sign = sg;
      const double v = potential_from(w, grid(p));
      worst = std::max(worst, std::abs(v - tv(p)));
    }
    return worst;
  };

  // coarse lattice including 0 and π/2
  const int steps = 12;
  std::vector<double> lattice;
  for (int k = 1; k <= steps; ++k) lattice.push_back(-kPi / 2 + k * kPi / steps);
  std::vector<double> best(q, 0.0), cur(q, 0.0);
  double best_val = 1e308;
  std::vector<int> idx(q, 0);
  while (true) {
    for (int i = 0; i < q; ++i) cur[i] = lattice[idx[i]];
    const double v = objective(cur, 4);
    if (v < best_val) {
      best_val = v;
      best = cur;
    }
    int i = 0;
    while (i < q && ++idx[i] == steps) idx[i++] = 0;
    if (i == q) break;
  }

  best_val = objective(best);
  // golden-section coordinate refinement
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double h = kPi / steps;
  for (int sweep = 0; sweep < 6 && best_val > 1e-12; ++sweep, h *= 0.5) {
    for (int i = 0; i < q; ++i) {
      std::vector<double> b = best;
      double lo = best[i] - h, hi = best[i] + h;
      double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
      b[i] = c1;
      double f1 = objective(b);
      b[i] = c2;
      double f2 = objective(b);
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          hi = c2; c2 = c1; f2 = f1; c1 = hi - gr * (hi - lo); b[i] = c1; f1 = objective(b);
        } else {
          lo = c1; c1 = c2; f1 = f2; c2 = lo + gr * (hi - lo); b[i] = c2; f2 = objective(b);
        }
      }
      b[i] = f1 < f2 ? c1 : c2;
      const double v = std::min(f1, f2);
      if (v < best_val) {
        best_val = v;
        best = b;
      }
    }
  }

  // snap onto the pure even / pure odd seeds when that costs nothing
  for (int i = 0; i < q; ++i) {
    for (double target_beta : {0.0, kPi / 2}) {
      if (std::abs(std::remainder(best[i] - target_beta, kPi)) > 1e-3) continue;
      std::vector<double> b = best;
      b[i] = target_beta;
      const double v = objective(b);
      if (v <= 1.01 * best_val + 1e-9) {
        best = b;
        best_val = std::min(best_val, v);
      }
    }
  }

  NuFit fit;
  fit.beta = best;
  fit.max_deviation = best_val;
  for (int i = 0; i < q; ++i) {
    const double eps = epsilons[i];
    const double c = std::cos(best[i]), s = std::sin(best[i]);
    if (std::abs(c) < 1e-10) {
      fit.nu.push_back(std::numeric_limits<double>::infinity());
    } else if (std::abs(s) < 1e-10) {
      fit.nu.push_back(0.0);
    } else {
      const SignedLog go = log_gamma_signed((3.0 - 2.0 * eps) / 4.0), ge = log_gamma_signed((1.0 - 2.0 * eps) / 4.0);
      const double R = go.sign * ge.sign * std::exp(go.log_abs - ge.log_abs);
      fit.nu.push_back(s / c / (2.0 * R));
    }
  }
  return fit;
}

std::array<double, 6> SusyLadder::product_roots() const {
  const int q = int(eps.size());
  return {0.5, 1.5, eps[0], eps[1], eps[q - 2] + 2.0, eps[q - 1] + 2.0};
}

std::array<double, 5> SusyLadder::gamma_roots() const {
  const int q = int(eps.size());
  return {0.5, eps[0], eps[1], eps[q - 2] + 2.0, eps[q - 1] + 2.0};
}

double SusyLadder::six_factor(double e) const {
  double p = 1.0;
  for (double r : product_roots()) p *= e - r;
  return p;
}

double SusyLadder::five_factor(double e) const {
  double p = 1.0;
  for (double r : gamma_roots()) p *= e - r;
  return p;
}

SusyLadder susy_ladder(const SusyModel& model) {
  if (model.q < 2) throw UnsupportedModel("ladder operators need q >= 2");
  SusyLadder l;
  for (const auto& s : model.seeds) l.eps.push_back(s.epsilon);
  l.kappa = model.kappa;
  l.new_energies = model.new_energies;
  l.delta1 = model.delta1;
  return l;
}

LadderAction susy_ladder_action(const SusyLadder& L, Subspace sub, Direction dir, int index, bool linearised) {
  const LadderAction zero{0.0, -1};
  auto csqrt = [](double v) { return std::sqrt(cplx(v, 0.0)); };
  if (sub == Subspace::Iso) {
    if (index < 0) throw IndexOutOfRange("negative iso index");
    if (dir == Direction::Lower) {
      if (index == 0) return zero;
      const cplx c = linearised ? csqrt(2.0 * index) : csqrt(L.six_factor(energy(index)));
      return {c, index - 1};
    }
    const cplx c = linearised ? csqrt(2.0 * index + 2.0) : csqrt(L.six_factor(energy(index + 1)));
    return {c, index + 1};
  }
  if (index < 0 || index >= L.kappa) throw IndexOutOfRange("new-subspace index " + std::to_string(index));
  if (dir == Direction::Lower) {
    if (index == 0) return zero;
    const cplx c = linearised ? csqrt(2.0 * index - L.delta1) : csqrt(L.six_factor(L.new_energies[index]));
    return {c, index - 1};
  }
  if (index == L.kappa - 1) return zero;
  const cplx c = linearised ? csqrt(2.0 * index + 2.0 - L.delta1) : csqrt(L.six_factor(L.new_energies[index + 1]));
  return {c, index + 1};
}

LadderSpec iso_ladder_spec() {
  LadderSpec s;
  s.name = "susy-iso-linearised";
  s.basis = Basis::SusyIso;
  s.f = [](int n) { return 2.0 * n; };
  s.g = s.f;
  s.xi = [](int n) { return energy(n); };
  return s;
}

LadderSpec new_ladder_spec(const SusyModel& model) {
  LadderSpec s;
  s.name = "susy-new-linearised";
  s.basis = Basis::SusyNew;
  const double d1 = model.delta1;
  // 2j - Δ1 is negative for the worked example; recorded raw
  s.f = [d1](int j) { return j == 0 ? 0.0 : 2.0 * j - d1; };
  s.g = s.f;
  const auto e = model.new_energies;
  s.xi = [e](int j) { return e.at(j); };
  s.dim = model.kappa;
  return s;
}

CoherentState susy_cs(const SusyModel& model, Subspace sub, cplx z, int truncation) {
  if (sub == Subspace::Iso)
    return build_cs(Family::SusyIso, iso_ladder_spec(), z, 2.0, truncation > 0 ? truncation : 64);
  if (truncation > 0 && truncation != model.kappa)
    throw std::invalid_argument("new-subspace coherent states have exactly kappa terms");
  const int k = model.kappa;
  const double a = -model.delta1 / 2.0;
  CoherentState cs;
  cs.family = Family::SusyNew;
  cs.z = z;
  cs.alpha = 2.0;
  cs.spec = new_ladder_spec(model);
  cs.vector.basis = Basis::SusyNew;
  cs.vector.amplitudes.resize(k);
  const cplx w = std::sqrt(2.0) * z;
  cplx pw = 1.0;
  for (int j = 0; j < k; ++j) {
    cs.vector.amplitudes(j) = pw / std::exp(log_factorial(j)) * std::sqrt(cplx(pochhammer_ratio(a, j), 0.0));
    pw *= w;
  }
  const double norm = cs.vector.amplitudes.norm();
  cs.vector.amplitudes /= norm;
  cs.norm_constant = 1.0 / norm;
  return cs;
}

double closed_form_c_hat(double delta1, int kappa, double r) {
  const double x = 2.0 * r * r;
  const double a = -delta1 / 2.0;
  // Γ((2κ-Δ1)/2)/Γ(-Δ1/2) taken as the product (a)_κ
  const double second = std::pow(r, 2 * kappa) * std::pow(2.0, kappa) * pochhammer_ratio(a, kappa) /
                        std::exp(2.0 * log_factorial(kappa)) * hyp2f2(1.0, kappa + a, kappa + 1.0, kappa + 1.0, x);
  return hyp1f1(a, 1.0, x) - second;
}

double closed_form_energy_new(double e0, double delta1, int kappa, double r) {
  const double x = 2.0 * r * r;
  const double c = closed_form_c_hat(delta1, kappa, r);
  double s = 0.0;
  for (int j = 0; j < kappa; ++j)
    s += j * std::pow(x, j) / std::exp(2.0 * log_factorial(j)) * recip_gamma(delta1 / 2.0 - j);
  return e0 + 2.0 * c * c * s;
}

double closed_form_probability_new(double delta1, int kappa, int j, double r) {
  if (j < 1) throw IndexOutOfRange("closed-form P_j is defined for j >= 1 only");
  const double x = 2.0 * r * r;
  const double c = closed_form_c_hat(delta1, kappa, r);
  return std::pow(x, j - 1) / std::exp(2.0 * log_factorial(j - 1)) * c * c * recip_gamma(delta1 / 2.0 + 1.0 - j);
}

NewMeasureCheck new_measure_check(double delta1, int kappa, int n_max) {
  const double a = -delta1 / 2.0;
  const double a1 = -(delta1 + 2.0) / 2.0;
  const int top = std::min(n_max, kappa - 1);
  NewMeasureCheck out;
  out.pole_limit = a <= 0.0 && a == std::floor(a);
  out.moment_numeric.resize(top + 1);
  out.moment_exact.resize(top + 1);
  out.diagonal.resize(top + 1);
  for (int j = 0; j <= top; ++j) {
    auto f = [&](double u) { return u <= 0.0 ? 0.0 : std::pow(u, j) * meijer_g_2012(a1, u); };
    out.moment_numeric(j) = integrate_adaptive_to_inf(f, 0.0, 1e-9, 1e-11);
    out.moment_exact(j) = std::exp(2.0 * log_factorial(j)) * recip_gamma(a + j);
    out.moment_deviation = std::max(out.moment_deviation, std::abs(out.moment_numeric(j) - out.moment_exact(j)));
    const double poch = pochhammer_ratio(a, j);
    if (out.pole_limit) {
      // Γ(a) G diverges; Γ(a) ∫u^j G = (j!)² Γ(a)/Γ(a+j) → (j!)²/(a)_j
      out.diagonal(j) = poch == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::abs(poch) / poch;
    } else {
      const SignedLog g = log_gamma_signed(a);
      out.diagonal(j) = g.sign * std::exp(g.log_abs - 2.0 * log_factorial(j)) * std::abs(poch) * out.moment_numeric(j);
    }
    out.max_deviation = std::max(out.max_deviation, std::abs(out.diagonal(j) - 1.0));
  }
  return out;
}

NewMeasureCheck new_measure_check(const SusyModel& model, int n_max) {
  return new_measure_check(model.delta1, model.kappa, n_max);
}

}  // namespace tocs
