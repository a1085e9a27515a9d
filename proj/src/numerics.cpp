#include "tocs/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tocs/errors.hpp"

namespace tocs {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr int kLanczosN = 9;
constexpr double kLanczosG = 7.0;
constexpr std::array<double, kLanczosN> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

cplx log_gamma_lanczos(cplx z) {
  z -= 1.0;
  cplx a = kLanczosCoef[0];
  const cplx t = z + kLanczosG + 0.5;
  for (int i = 1; i < kLanczosN; ++i) a += kLanczosCoef[i] / (z + double(i));
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace

void SpecialFunctionConfig::validate() const {
  if (!(series_tolerance > 0.0 && series_tolerance <= 1e-6))
    throw std::invalid_argument("series_tolerance must lie in (0, 1e-6]");
  if (max_terms < 64) throw std::invalid_argument("max_terms must be at least 64");
  if (mellin_nodes < 16) throw std::invalid_argument("mellin_nodes too small");
}

double hermite_phys(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_phys: negative order");
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

SignedLog hermite_phys_log(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_phys_log: negative order");
  double h0 = 1.0, h1 = 2.0 * x, scale = 0.0;
  if (n == 0) return {0.0, 1};
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
    const double m = std::max(std::abs(h0), std::abs(h1));
    if (m > 1e150) {
      h0 /= m;
      h1 /= m;
      scale += std::log(m);
    }
  }
  if (h1 == 0.0) return {-std::numeric_limits<double>::infinity(), 1};
  return {scale + std::log(std::abs(h1)), h1 > 0 ? 1 : -1};
}

double hyp1f1(double a, double b, double x, const SpecialFunctionConfig& cfg) {
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < cfg.max_terms; ++k) {
    if (a + k == 0.0) return sum;
    if (b + k == 0.0) throw PoleError("hyp1f1: b + k = 0 before termination");
    term *= (a + k) / (b + k) * x / (k + 1);
    sum += term;
    if (std::abs(term) <= cfg.series_tolerance * std::abs(sum) && k > std::abs(a) + std::abs(x))
      return sum;
    if (term == 0.0) return sum;
  }
  throw DivergenceError("hyp1f1 did not converge within max_terms");
}

double hyp2f1_terminating(int a, double b, double c, double x) {
  if (a > 0) throw std::invalid_argument("hyp2f1_terminating: a must be a nonpositive integer");
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < -a; ++k) {
    if (c + k == 0.0) throw PoleError("hyp2f1_terminating: c + k = 0");
    term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x;
    sum += term;
  }
  return sum;
}

double hyp2f2(double a1, double a2, double b1, double b2, double x,
              const SpecialFunctionConfig& cfg) {
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < cfg.max_terms; ++k) {
    if (a1 + k == 0.0 || a2 + k == 0.0) return sum;
    if (b1 + k == 0.0 || b2 + k == 0.0) throw PoleError("hyp2f2: lower parameter hits a pole");
    term *= (a1 + k) * (a2 + k) / ((b1 + k) * (b2 + k)) * x / (k + 1);
    sum += term;
    if (std::abs(term) <= cfg.series_tolerance * std::abs(sum) && k > std::abs(x)) return sum;
    if (term == 0.0) return sum;
  }
  throw DivergenceError("hyp2f2 did not converge within max_terms");
}

cplx log_gamma(cplx z) {
  if (z.real() < 0.5) {
    // reflection: Γ(z)Γ(1-z) = π / sin(πz)
    return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma_lanczos(1.0 - z);
  }
  return log_gamma_lanczos(z);
}

SignedLog log_gamma_signed(double x) {
  if (is_nonpositive_integer(x)) throw PoleError("log_gamma_signed at a nonpositive integer");
  if (x < 0.5) {
    const double s = std::sin(kPi * x);
    const double lg = log_gamma_lanczos(cplx(1.0 - x, 0.0)).real();
    return {std::log(kPi) - std::log(std::abs(s)) - lg, s > 0 ? 1 : -1};
  }
  return {log_gamma_lanczos(cplx(x, 0.0)).real(), 1};
}

double pochhammer_ratio(double a, int j) {
  if (j < 0) throw std::invalid_argument("pochhammer_ratio: negative j");
  double p = 1.0;
  for (int i = 0; i < j; ++i) p *= a + i;
  return p;
}

double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative n");
  static const std::vector<double> table = [] {
    std::vector<double> t(4097);
    long double acc = 0.0L;
    t[0] = 0.0;
    for (int k = 1; k < int(t.size()); ++k) {
      acc += std::log(static_cast<long double>(k));
      t[k] = static_cast<double>(acc);
    }
    return t;
  }();
  if (n < int(table.size())) return table[n];
  return log_gamma_signed(n + 1.0).log_abs;
}

double meijer_default_offset(double a1, double x) {
  if (x < 1.0) {
    // small x: a large offset multiplies the integrand by x^{-c} and the
    // result drowns in cancellation
    double c = 0.5;
    if (is_nonpositive_integer(a1 + c)) c = 0.75;
    return c;
  }
  return std::max(1.0, 1.0 - a1) + 0.5;
}

double meijer_g_2012(double a1, double x, const SpecialFunctionConfig& cfg) {
  if (!(x > 0.0)) throw std::invalid_argument("meijer_g_2012: x must be positive");
  const double c =
      std::isnan(cfg.mellin_contour_offset) ? meijer_default_offset(a1, x) : cfg.mellin_contour_offset;
  if (!(c > 0.0)) throw ContourError("contour offset must lie right of the poles at s = 0, -1, ...");
  const int n = cfg.mellin_nodes;
  const double T = cfg.mellin_half_range;
  const double h = 2.0 * T / n;
  const double lx = std::log(x);
  auto integrand = [&](double t) {
    const cplx s(c, t);
    const cplx lg = 2.0 * log_gamma(s) - log_gamma(a1 + s) - s * lx;
    return std::exp(lg).real();
  };
  double sum = 0.0, peak = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double v = integrand(-T + k * h);
    peak = std::max(peak, std::abs(v));
    sum += (k == 0 || k == n) ? 0.5 * v : v;
  }
  const double edge = std::max(std::abs(integrand(-T)), std::abs(integrand(T)));
  if (!std::isfinite(sum) || edge > 1e-14 * std::max(peak, 1e-300))
    throw ContourError("Mellin-Barnes integrand has not decayed at |Im s| = " + std::to_string(T));
  return sum * h / (2.0 * kPi);
}

namespace {

struct GaussLegendre {
  std::vector<double> x, w;  // on [-1, 1]
};

GaussLegendre gauss_legendre(int n) {
  GaussLegendre gl;
  gl.x.resize(n);
  gl.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    gl.x[i] = -z;
    gl.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return gl;
}

// Recurrence coefficients of a discrete measure (Rutishauser-Kahan-Parlett-Wei
// Lanczos variant, as in Gautschi's OPQ suite).
void discrete_recurrence(const std::vector<double>& xs, const std::vector<double>& ws, int n,
                         Eigen::VectorXd& alpha, Eigen::VectorXd& beta) {
  const int M = int(xs.size());
  if (n > M) throw std::invalid_argument("discrete_recurrence: too few support points");
  std::vector<double> p0 = xs, p1(M, 0.0);
  p1[0] = ws[0];
  for (int m = 0; m < M - 1; ++m) {
    double pn = ws[m + 1], gam = 1.0, sig = 0.0, t = 0.0;
    const double xlam = xs[m + 1];
    for (int k = 0; k <= m + 1; ++k) {
      const double rho = p1[k] + pn;
      const double tmp = gam * rho;
      double tsig = sig;
      if (rho <= 0.0) {
        gam = 1.0;
        sig = 0.0;
      } else {
        gam = p1[k] / rho;
        sig = pn / rho;
      }
      const double tk = sig * (p0[k] - xlam) - gam * t;
      p0[k] = p0[k] - (tk - t);
      t = tk;
      pn = sig <= 0.0 ? tsig * p1[k] : (t * t) / sig;
      tsig = sig;
      p1[k] = tmp;
    }
  }
  alpha = Eigen::Map<Eigen::VectorXd>(p0.data(), n);
  beta = Eigen::Map<Eigen::VectorXd>(p1.data(), n);
}

}  // namespace

QuadratureRule gauss_halfline_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_halfline_rule: n must be positive");
  // largest node sits near sqrt(4n)
  const double L = std::sqrt(4.0 * n + 2.0) + 10.0;
  const double panel = 0.1;
  const int panels = int(std::ceil(L / panel));
  const GaussLegendre gl = gauss_legendre(24);
  std::vector<double> xs, ws;
  xs.reserve(panels * 24);
  ws.reserve(panels * 24);
  for (int p = 0; p < panels; ++p) {
    const double a = p * panel;
    for (size_t i = 0; i < gl.x.size(); ++i) {
      const double x = a + 0.5 * panel * (gl.x[i] + 1.0);
      const double w = 0.5 * panel * gl.w[i] * std::exp(-x * x);
      if (w > 0.0) {
        xs.push_back(x);
        ws.push_back(w);
      }
    }
  }
  Eigen::VectorXd alpha, beta;
  discrete_recurrence(xs, ws, n, alpha, beta);
  Eigen::VectorXd sub = beta.tail(n - 1).cwiseSqrt();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(alpha, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& nodes = es.eigenvalues();

  // Christoffel numbers from p_k(x) e^{-x²/2}, which stay representable at the far nodes
  std::vector<double> keep_x, keep_w, keep_pw;
  for (int i = 0; i < n; ++i) {
    const double x = nodes(i);
    if (!(x > 0.0)) continue;
    double prev = 0.0, cur = std::exp(-0.5 * x * x) / std::sqrt(beta(0));
    double s = cur * cur;
    for (int k = 0; k + 1 < n; ++k) {
      const double next = ((x - alpha(k)) * cur - (k > 0 ? std::sqrt(beta(k)) * prev : 0.0)) / std::sqrt(beta(k + 1));
      prev = cur;
      cur = next;
      s += cur * cur;
    }
    const double pw = 1.0 / s;
    keep_x.push_back(x);
    keep_pw.push_back(pw);
    keep_w.push_back(pw * std::exp(-x * x));
  }
  QuadratureRule rule;
  rule.kind = RuleKind::GaussHalfline;
  rule.degree = int(keep_x.size());
  rule.nodes = Eigen::Map<Eigen::VectorXd>(keep_x.data(), rule.degree);
  rule.weights = Eigen::Map<Eigen::VectorXd>(keep_w.data(), rule.degree);
  rule.plain_weights = Eigen::Map<Eigen::VectorXd>(keep_pw.data(), rule.degree);
  return rule;
}

QuadratureRule adaptive_rule(double tolerance) {
  QuadratureRule rule;
  rule.kind = RuleKind::AdaptivePanel;
  rule.tolerance = tolerance;
  return rule;
}

const QuadratureRule& default_rule() {
  static const QuadratureRule rule = gauss_halfline_rule(200);
  return rule;
}

const QuadratureRule& doubled_rule() {
  static const QuadratureRule rule = gauss_halfline_rule(400);
  return rule;
}

double integrate_halfline(const std::function<double(double)>& f, const QuadratureRule& rule) {
  if (rule.kind == RuleKind::GaussHalfline) {
    double s = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i) s += rule.weights(i) * f(rule.nodes(i));
    return s;
  }
  return integrate_adaptive_to_inf([&](double x) { return std::exp(-x * x) * f(x); }, 0.0,
                                   rule.tolerance);
}

double integrate_plain(const std::function<double(double)>& g, const QuadratureRule& rule) {
  if (rule.kind == RuleKind::GaussHalfline) {
    double s = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i) s += rule.plain_weights(i) * g(rule.nodes(i));
    return s;
  }
  return integrate_adaptive_to_inf(g, 0.0, rule.tolerance);
}

namespace {

constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = kKronrodW[7] * fc, g = kGaussW[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodX[i];
    const double s = f(c - dx) + f(c + dx);
    k += kKronrodW[i] * s;
    if (i % 2 == 1) g += kGaussW[i / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, int max_panels) {
  std::priority_queue<Panel> heap;
  // start from a few panels so narrow features are not missed
  const int start = 8;
  double total = 0.0, err = 0.0;
  for (int i = 0; i < start; ++i) {
    const Panel p = gk15(f, a + (b - a) * i / start, a + (b - a) * (i + 1) / start);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int panels = start;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (panels >= max_panels) throw NonConvergence("adaptive quadrature stalled");
    const Panel worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (m <= worst.a || m >= worst.b) throw NonConvergence("adaptive quadrature hit panel resolution");
    const Panel l = gk15(f, worst.a, m), r = gk15(f, m, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++panels;
    if (err < 0.0) err = 0.0;
  }
  // re-sum to shed accumulated rounding from the running updates
  double s = 0.0;
  while (!heap.empty()) {
    s += heap.top().value;
    heap.pop();
  }
  return s;
}

double integrate_adaptive_to_inf(const std::function<double(double)>& f, double a,
                                 double rel_tol, double abs_tol) {
  auto g = [&](double t) {
    const double u = 1.0 - t;
    const double v = f(a + t / u);
    return v == 0.0 ? 0.0 : v / (u * u);
  };
  return integrate_adaptive(g, 0.0, 1.0, rel_tol, abs_tol);
}

}  // namespace tocs
