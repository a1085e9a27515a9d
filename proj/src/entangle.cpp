#include "tocs/entangle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace tocs {

namespace {

constexpr double kPi = 3.14159265358979323846;

const QuadratureRule& rule_with(int nodes) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  if (nodes <= 200) return default_rule();
  const std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(nodes);
  if (it == cache.end()) it = cache.emplace(nodes, gauss_halfline_rule(nodes)).first;
  return it->second;
}

// exp(t (K+ - K-)) on |k, N-k>, from e^{ζK+} e^{λK0} e^{-ζK-}, ζ = tan t, λ = -2 ln cos t
Eigen::MatrixXd disentangled_real(int total, double t) {
  const int n = total + 1;
  const double z = std::tan(t);
  const double lam = -2.0 * std::log(std::cos(t));
  Eigen::MatrixXd up = Eigen::MatrixXd::Zero(n, n), down = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const int b = total - a;
    for (int k = 0; a + k < n; ++k) {
      // K+^k |a, b> = sqrt((a+k)!/a! b!/(b-k)!) |a+k, b-k>
      const double lg = 0.5 * (log_factorial(a + k) - log_factorial(a) + log_factorial(b) - log_factorial(b - k)) -
                        log_factorial(k);
      up(a + k, a) = (k == 0 ? 1.0 : std::pow(z, k)) * std::exp(lg);
    }
    for (int k = 0; k <= a; ++k) {
      const double lg = 0.5 * (log_factorial(a) - log_factorial(a - k) + log_factorial(b + k) - log_factorial(b)) -
                        log_factorial(k);
      down(a - k, a) = (k == 0 ? 1.0 : std::pow(-z, k)) * std::exp(lg);
    }
  }
  Eigen::VectorXd d(n);
  for (int a = 0; a < n; ++a) d(a) = std::exp(lam * (a - (total - a)) / 2.0);
  return up * d.asDiagonal() * down;
}

int squarings_for(int total, double t) {
  int s = 0;
  while (std::abs(t) * (total + 1) / std::ldexp(1.0, s) > 0.25) ++s;
  return s;
}

Eigen::MatrixXd stable_real(int total, double t) {
  const int s = squarings_for(total, t);
  Eigen::MatrixXd R = disentangled_real(total, std::ldexp(t, -s));
  for (int i = 0; i < s; ++i) R = R * R;
  return R;
}

Mat<cplx> with_phase(const Eigen::MatrixXd& R, double phi) {
  const int n = int(R.rows());
  Mat<cplx> U(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) U(i, j) = std::polar(1.0, phi * (i - j)) * R(i, j);
  return U;
}

}  // namespace

bool halfline_overlap_regular(int alpha, int beta) {
  const int s = alpha + beta;
  return s == 0 || s % 2 == 1;
}

double halfline_overlap(int alpha, int beta) {
  if (alpha < 0 || beta < 0) throw IndexOutOfRange("negative Hermite degree");
  if (!halfline_overlap_regular(alpha, beta)) return halfline_overlap_quadrature(alpha, beta);
  const double c = 1.0 - 0.5 * (alpha + beta);
  // Σ_k (-α)_k (-β)_k / (k! Γ(c + k)) 2^{-k}, c a half-integer here
  long double sum = 0.0L;
  long double poch = 1.0L;  // (-α)_k (-β)_k / k! 2^{-k}
  for (int k = 0; k <= std::min(alpha, beta); ++k) {
    if (k > 0) poch *= (long double)(k - 1 - alpha) * (k - 1 - beta) / k / 2.0L;
    const double ck = c + k;
    const SignedLog g = log_gamma_signed(ck);
    sum += poch * g.sign * std::exp(-(long double)g.log_abs);
  }
  return double(std::sqrt((long double)kPi) * sum * std::pow(2.0L, alpha + beta - 1));
}

double halfline_overlap_quadrature(int alpha, int beta) {
  const int top = std::max(alpha, beta);
  const QuadratureRule& rule = rule_with(top + 20);
  // normalised functions keep the sum free of cancellation
  double s = 0.0;
  for (int i = 0; i < rule.nodes.size(); ++i) {
    const Eigen::VectorXd psi = ho_jets(top, rule.nodes(i), 0).col(0);
    s += rule.plain_weights(i) * psi(alpha) * psi(beta);
  }
  const double scale = 0.5 * ((alpha + beta) * std::log(2.0) + log_factorial(alpha) + log_factorial(beta) + std::log(kPi));
  return s * std::exp(scale);
}

Eigen::MatrixXd halfline_gram(int nmax) {
  const QuadratureRule& rule = rule_with(nmax + 8);
  const int q = int(rule.nodes.size());
  Eigen::MatrixXd P(q, nmax + 1);
  for (int i = 0; i < q; ++i) P.row(i) = ho_jets(nmax, rule.nodes(i), 0).col(0).transpose();
  Eigen::MatrixXd G = P.transpose() * rule.plain_weights.asDiagonal() * P;
  return 0.5 * (G + G.transpose());
}

cplx BeamSplitterSetting::r() const { return -std::polar(1.0, -phi) * std::sin(theta / 2.0); }
double BeamSplitterSetting::t() const { return std::cos(theta / 2.0); }

Mat<cplx> bs_block(int total, const BeamSplitterSetting& s) {
  return with_phase(stable_real(total, s.theta / 2.0), s.phi);
}

Mat<cplx> bs_block_direct(int total, const BeamSplitterSetting& s) {
  return with_phase(disentangled_real(total, s.theta / 2.0), s.phi);
}

Mat<cplx> bs_block_expm(int total, const BeamSplitterSetting& s) {
  const int n = total + 1;
  const cplx tau = std::polar(s.theta / 2.0, s.phi);
  Mat<cplx> M = Mat<cplx>::Zero(n, n);
  for (int a = 0; a + 1 < n; ++a) {
    const double k = std::sqrt(double(a + 1) * (total - a));  // <a+1, b-1| a†b |a, b>
    M(a + 1, a) += tau * k;
    M(a, a + 1) -= std::conj(tau) * k;
  }
  // M anti-Hermitian: M = iH
  const Mat<cplx> H = cplx(0.0, -1.0) * M;
  Eigen::SelfAdjointEigenSolver<Mat<cplx>> es(H);
  const Vec<cplx> ph = (es.eigenvalues().cast<cplx>() * cplx(0.0, 1.0)).array().exp();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

TwoModeState product_state(const Vec<cplx>& mode_a, const Vec<cplx>& mode_b, int cutoff) {
  TwoModeState st;
  st.cutoff = cutoff;
  st.amplitudes = Mat<cplx>::Zero(cutoff + 1, cutoff + 1);
  for (int m = 0; m < mode_a.size(); ++m)
    for (int n = 0; n < mode_b.size(); ++n) {
      const cplx v = mode_a(m) * mode_b(n);
      if (v == cplx(0.0)) continue;
      if (m + n > cutoff) throw CutoffExceeded("level pair (" + std::to_string(m) + ", " + std::to_string(n) +
                                               ") beyond total " + std::to_string(cutoff));
      st.amplitudes(m, n) = v;
    }
  return st;
}

const Mat<cplx>& BeamSplitter::block(int total) {
  auto it = cache_.find(total);
  if (it == cache_.end()) it = cache_.emplace(total, bs_block(total, s_)).first;
  return it->second;
}

TwoModeState BeamSplitter::apply(const TwoModeState& in) {
  TwoModeState out;
  out.cutoff = in.cutoff;
  out.amplitudes = Mat<cplx>::Zero(in.cutoff + 1, in.cutoff + 1);
  for (int total = 0; total <= in.cutoff; ++total) {
    Vec<cplx> v(total + 1);
    for (int a = 0; a <= total; ++a) v(a) = in.amplitudes(a, total - a);
    if (v.squaredNorm() == 0.0) continue;
    const Vec<cplx> w = block(total) * v;
    for (int a = 0; a <= total; ++a) out.amplitudes(a, total - a) = w(a);
  }
  return out;
}

Vec<cplx> embed_trunc(const Vec<cplx>& c) {
  Vec<cplx> v = Vec<cplx>::Zero(2 * c.size());
  for (int n = 0; n < c.size(); ++n) v(2 * n + 1) = std::sqrt(2.0) * c(n);
  return v;
}

Expansion expand_halfline(const HalfLineBasis& basis, const Vec<cplx>& c, int levels) {
  const QuadratureRule& rule = rule_with(levels + 100);
  const int count = int(c.size());
  Vec<cplx> d = Vec<cplx>::Zero(levels);
  for (int i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes(i);
    const Eigen::VectorXd phi = basis.jets(x, count, 0).col(0);
    const cplx f = phi.cast<cplx>().dot(c);  // Σ c_n φ_n(x)
    const Eigen::VectorXd psi = trunc_jets(levels - 1, x, 0).col(0);
    d += rule.plain_weights(i) * f * psi.cast<cplx>();
  }
  Expansion e;
  e.levels = levels;
  e.recovered_norm = d.squaredNorm();
  e.fullline = embed_trunc(d);
  return e;
}

Expansion expand_halfline_auto(const HalfLineBasis& basis, const Vec<cplx>& c, int min_levels, double tol,
                               int max_levels) {
  const double target = c.squaredNorm() * (1.0 - tol);
  for (int k = min_levels; k <= max_levels; k += 8) {
    Expansion e = expand_halfline(basis, c, k);
    if (e.recovered_norm >= target) return e;
  }
  throw ExpansionResidualTooLarge("odd-level expansion below 1 - " + std::to_string(tol) + " up to " +
                                  std::to_string(max_levels) + " levels");
}

Mat<cplx> reduced_density(const TwoModeState& state, const Eigen::MatrixXd& gram) {
  const int n = state.cutoff + 1;
  if (gram.rows() < n) throw IndexOutOfRange("Gram smaller than the state");
  const Eigen::MatrixXd G = gram.topLeftCorner(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  Eigen::VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() < -1e-10) throw GramNotPSD("smallest eigenvalue " + std::to_string(lam.minCoeff()));
  lam = lam.cwiseMax(0.0).cwiseSqrt();
  const Mat<cplx> S = (es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose()).cast<cplx>();
  const Mat<cplx> B = S * state.amplitudes * S;
  Mat<cplx> rho = B * B.adjoint();
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw NotNormalizable("state has no weight on the positive quadrant");
  return rho / tr;
}

double linear_entropy(const Mat<cplx>& rho) { return std::max(0.0, 1.0 - rho.squaredNorm()); }

namespace {

struct ModeStates {
  Vec<cplx> a, b;
};

ModeStates prepare(Family family, double r, const EntropyOptions& opt, double factor) {
  ModeStates m;
  if (family == Family::SusyIso || family == Family::SusyNew) {
    const SusyModel model = opt.model ? *opt.model : q4_example_model();
    const int levels = int(std::ceil(opt.susy_levels * factor));
    const SusyNewBasis nb(model);
    Vec<cplx> e0 = Vec<cplx>::Zero(1);
    e0(0) = 1.0;
    m.a = expand_halfline_auto(nb, e0, levels).fullline;
    if (family == Family::SusyNew) {
      const CoherentState cs = susy_cs(model, Subspace::New, r);
      m.b = expand_halfline_auto(nb, cs.vector.amplitudes, levels).fullline;
    } else {
      const LadderSpec spec = iso_ladder_spec();
      const int t = required_truncation(Family::SusyIso, spec, 2.0, r, int(std::ceil(16 * factor)));
      const CoherentState cs = susy_cs(model, Subspace::Iso, r, t);
      m.b = expand_halfline_auto(SusyIsoBasis(model), cs.vector.amplitudes, std::max(levels, t + 24)).fullline;
    }
  } else {
    const LadderSpec spec = trunc_oscillator_spec();
    const int t = required_truncation(family, spec, 2.0, r, int(std::ceil(opt.cs_truncation * factor)));
    const CoherentState cs = build_cs(family, spec, r, 2.0, t);
    Vec<cplx> g = Vec<cplx>::Zero(1);
    g(0) = 1.0;
    m.a = embed_trunc(g);
    m.b = embed_trunc(cs.vector.amplitudes);
  }
  return m;
}

double entropy_of(const ModeStates& m, BeamSplitter& bs, std::map<int, Eigen::MatrixXd>& grams, int* cutoff) {
  const int c = int(m.a.size() + m.b.size()) - 2;
  *cutoff = c;
  const TwoModeState out = bs.apply(product_state(m.a, m.b, c));
  auto it = grams.find(c);
  if (it == grams.end()) it = grams.emplace(c, halfline_gram(c)).first;
  return linear_entropy(reduced_density(out, it->second));
}

}  // namespace

std::vector<EntropyRecord> entropy_scan(Family family, const std::vector<double>& z_moduli,
                                        const BeamSplitterSetting& setting, const EntropyOptions& opt) {
  std::vector<EntropyRecord> out(z_moduli.size());
  std::vector<std::exception_ptr> errors(z_moduli.size());
  std::atomic<size_t> next{0};
  // each worker owns its splitter blocks and Gram matrices; records land by index
  auto worker = [&] {
    BeamSplitter bs(setting);
    std::map<int, Eigen::MatrixXd> grams;
    for (size_t i = next++; i < z_moduli.size(); i = next++) {
      try {
        EntropyRecord& rec = out[i];
        const double r = z_moduli[i];
        rec.z_modulus = r;
        rec.entropy = entropy_of(prepare(family, r, opt, 1.0), bs, grams, &rec.cutoff);
        rec.entropy_refined = std::numeric_limits<double>::quiet_NaN();
        if (opt.check_convergence) {
          int c2 = 0;
          rec.entropy_refined = entropy_of(prepare(family, r, opt, opt.refine_factor), bs, grams, &c2);
          rec.converged = std::abs(rec.entropy_refined - rec.entropy) <= opt.convergence_tol;
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned want = opt.threads > 0 ? unsigned(opt.threads) : std::thread::hardware_concurrency();
  const size_t n = std::min<size_t>(z_moduli.size(), std::max(1u, want));
  std::vector<std::thread> pool;
  for (size_t k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace tocs
