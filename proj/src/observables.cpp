#include "tocs/observables.hpp"

#include <cmath>

namespace tocs {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI(0.0, 1.0);

double sqrt_fact_ratio(int a, int b) { return std::exp(0.5 * (log_factorial(a) - log_factorial(b))); }

struct Samples {
  Eigen::VectorXd x, w;  // nodes and plain weights
  Eigen::MatrixXd val, d1, d2;  // nodes x size
};

Samples sample_basis(const HalfLineBasis& basis, int size, const QuadratureRule& rule, int order) {
  if (rule.kind != RuleKind::GaussHalfline) throw std::invalid_argument("tables need a Gauss rule");
  if (size > basis.max_size()) throw IndexOutOfRange("basis provides only " + std::to_string(basis.max_size()));
  Samples s;
  s.x = rule.nodes;
  s.w = rule.plain_weights;
  const int q = int(s.x.size());
  s.val.resize(q, size);
  s.d1.resize(q, size);
  if (order >= 2) s.d2.resize(q, size);
  for (int i = 0; i < q; ++i) {
    const Eigen::MatrixXd J = basis.jets(s.x(i), size, order);
    s.val.row(i) = J.col(0).transpose();
    s.d1.row(i) = J.col(1).transpose();
    if (order >= 2) s.d2.row(i) = J.col(2).transpose();
  }
  return s;
}

Mat<cplx> table_from_samples(ObsKind kind, const Samples& s) {
  switch (kind) {
    case ObsKind::X:
      return (s.val.transpose() * (s.w.cwiseProduct(s.x)).asDiagonal() * s.val).cast<cplx>();
    case ObsKind::X2:
      return (s.val.transpose() * (s.w.cwiseProduct(s.x).cwiseProduct(s.x)).asDiagonal() * s.val).cast<cplx>();
    case ObsKind::P:
      return -kI * (s.val.transpose() * s.w.asDiagonal() * s.d1).cast<cplx>();
    case ObsKind::P2:
      return (s.d1.transpose() * s.w.asDiagonal() * s.d1).cast<cplx>();
  }
  return {};
}

}  // namespace

const char* obs_name(ObsKind k) {
  switch (k) {
    case ObsKind::X: return "X";
    case ObsKind::X2: return "X2";
    case ObsKind::P: return "P";
    case ObsKind::P2: return "P2";
  }
  return "?";
}

cplx matrix_element_closed(ObsKind kind, int n, int m, Basis basis) {
  if (basis != Basis::Trunc) throw UnsupportedBasis("closed forms exist only for the truncated oscillator");
  if (n < 0 || m < 0) throw IndexOutOfRange("negative index");
  if (n < m) {
    const cplx v = matrix_element_closed(kind, m, n, basis);
    return kind == ObsKind::P ? std::conj(v) : v;
  }
  const int d = n - m;
  const double dn = (n == m) ? 1.0 : 0.0;
  const double dp1 = (n == m + 1) ? 1.0 : 0.0;  // δ_{n,m+1}
  switch (kind) {
    case ObsKind::X: {
      const SignedLog g = log_gamma_signed(d - 0.5);
      const double pre = sqrt_fact_ratio(2 * n + 1, 2 * m + 1) * std::pow(-2.0, d - 1) * g.sign *
                         std::exp(g.log_abs - log_factorial(2 * d)) / kPi;
      return pre * hyp2f1_terminating(-2 * m - 1, d - 0.5, 2.0 * d + 1.0, 2.0);
    }
    case ObsKind::X2: {
      const double r = std::exp(0.5 * (log_factorial(2 * n + 1) + log_factorial(2 * m + 1)) - log_factorial(n + m));
      return 0.5 * dn + r * (dn + 0.5 * dp1);
    }
    case ObsKind::P: {
      const cplx x = matrix_element_closed(ObsKind::X, n, m, basis);
      const SignedLog g = log_gamma_signed(d - 0.5);
      const double pre = (2 * m + 1) / kPi * sqrt_fact_ratio(2 * n + 1, 2 * m + 1) * std::pow(-2.0, d) *
                         (2.0 * d - 1.0) * g.sign * std::exp(g.log_abs - log_factorial(2 * d + 1));
      return kI * x - kI * pre * hyp2f1_terminating(-2 * m, d + 0.5, 2.0 * (d + 1), 2.0);
    }
    case ObsKind::P2: {
      const double r = std::exp(0.5 * (log_factorial(2 * n + 1) + log_factorial(2 * m + 1)) - log_factorial(n + m));
      // the δ_{m-1,n} and δ_{n,m-1} terms cannot fire for n >= m
      return 0.5 * dn + 2.0 * r * (dn - 0.5 * dp1);
    }
  }
  return 0.0;
}

cplx matrix_element_quadrature(ObsKind kind, int n, int m, const HalfLineBasis& basis,
                               const QuadratureRule& rule) {
  const int size = std::max(n, m) + 1;
  const Samples s = sample_basis(basis, size, rule, 1);
  return table_from_samples(kind, s)(n, m);
}

MatrixElementTable closed_form_table(ObsKind kind, int size) {
  MatrixElementTable t{kind, Mat<cplx>(size, size), ElementSource::ClosedForm, Basis::Trunc};
  for (int n = 0; n < size; ++n)
    for (int m = 0; m < size; ++m) t.entries(n, m) = matrix_element_closed(kind, n, m);
  return t;
}

MatrixElementTable quadrature_table(ObsKind kind, const HalfLineBasis& basis, int size,
                                    const QuadratureRule& rule) {
  const Samples s = sample_basis(basis, size, rule, 1);
  return {kind, table_from_samples(kind, s), ElementSource::Quadrature, basis.tag()};
}

MatrixElementTable p2_second_derivative_table(const HalfLineBasis& basis, int size, const QuadratureRule& rule) {
  const Samples s = sample_basis(basis, size, rule, 2);
  Mat<cplx> e = (-(s.val.transpose() * s.w.asDiagonal() * s.d2)).cast<cplx>();
  return {ObsKind::P2, e, ElementSource::Quadrature, basis.tag()};
}

int rule_degree_for(const HalfLineBasis&, int size) { return std::max(200, 2 * size + 40); }

ObservableTables build_tables(const HalfLineBasis& basis, int size, double doubling_tol) {
  const int deg = rule_degree_for(basis, size);
  const QuadratureRule rule = deg == 200 ? default_rule() : gauss_halfline_rule(deg);
  const QuadratureRule rule2 = deg == 200 ? doubled_rule() : gauss_halfline_rule(2 * deg);
  const Samples s = sample_basis(basis, size, rule, 1);
  const Samples s2 = sample_basis(basis, size, rule2, 1);
  ObservableTables t;
  MatrixElementTable* slots[] = {&t.x, &t.x2, &t.p, &t.p2};
  const ObsKind kinds[] = {ObsKind::X, ObsKind::X2, ObsKind::P, ObsKind::P2};
  for (int i = 0; i < 4; ++i) {
    *slots[i] = {kinds[i], table_from_samples(kinds[i], s), ElementSource::Quadrature, basis.tag()};
    const Mat<cplx> check = table_from_samples(kinds[i], s2);
    const double scale = std::max(1.0, slots[i]->entries.cwiseAbs().maxCoeff());
    t.doubling_shift = std::max(t.doubling_shift, (check - slots[i]->entries).cwiseAbs().maxCoeff() / scale);
  }
  if (t.doubling_shift > doubling_tol)
    throw NonConvergence("matrix elements moved by " + std::to_string(t.doubling_shift) +
                         " under rule doubling");
  return t;
}

std::vector<Discrepancy> closed_form_discrepancies(const ObservableTables& quad, int n_max, double tol,
                                                   const std::vector<ObsKind>& kinds) {
  std::vector<Discrepancy> out;
  for (ObsKind k : kinds) {
    const MatrixElementTable& t = k == ObsKind::X ? quad.x : k == ObsKind::X2 ? quad.x2 : k == ObsKind::P ? quad.p : quad.p2;
    for (int n = 0; n <= n_max; ++n)
      for (int m = 0; m <= n; ++m) {
        const cplx c = matrix_element_closed(k, n, m);
        const cplx q = t.entries(n, m);
        const double d = std::abs(c - q);
        if (d > tol) out.push_back({k, n, m, c, q, d});
      }
  }
  return out;
}

cplx expectation_unfolded(const MatrixElementTable& table, const FockVector<cplx>& v, int n_terms) {
  if (v.basis != table.basis) throw BasisMismatch("state and table live in different bases");
  const int n = std::min({n_terms, v.truncation(), table.size()});
  const Vec<cplx> c = v.amplitudes.head(n);
  return c.dot(table.entries.topLeftCorner(n, n) * c);  // dot conjugates its first argument
}

cplx expectation_unfolded(const MatrixElementTable& table, const CoherentState& cs, int n_terms) {
  return expectation_unfolded(table, cs.vector, n_terms);
}

double expectation(const MatrixElementTable& table, const CoherentState& cs, int n_terms) {
  if (cs.vector.basis != table.basis) throw BasisMismatch("state and table live in different bases");
  if (n_terms > table.size()) throw IndexOutOfRange("n_terms exceeds the table size");
  const int n = std::min(n_terms, cs.truncation());
  const auto& c = cs.vector.amplitudes;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += std::norm(c(i)) * table.entries(i, i).real();
    for (int j = 0; j < i; ++j) s += 2.0 * (std::conj(c(i)) * table.entries(i, j) * c(j)).real();
  }
  return s;
}

UncertaintyRecord uncertainty(const ObservableTables& t, const CoherentState& cs, int n_terms) {
  const double x = expectation(t.x, cs, n_terms), x2 = expectation(t.x2, cs, n_terms);
  const double p = expectation(t.p, cs, n_terms), p2 = expectation(t.p2, cs, n_terms);
  UncertaintyRecord r;
  r.z_modulus = std::abs(cs.z);
  r.sigma_x = std::sqrt(std::max(0.0, x2 - x * x));
  r.sigma_p = std::sqrt(std::max(0.0, p2 - p * p));
  r.product = r.sigma_x * r.sigma_p;
  r.truncation = std::min(n_terms, cs.truncation());
  return r;
}

int required_truncation(Family family, const LadderSpec& spec, double alpha, double r, int min_truncation) {
  if (family == Family::Displacement && spec.displacement_radius && r >= *spec.displacement_radius)
    throw NotNormalizable("displacement series diverges for |z| >= " + std::to_string(*spec.displacement_radius));
  int t = std::max(min_truncation, 8);
  for (;; t += 8) {
    if (spec.dim && t >= *spec.dim) return *spec.dim;
    double top = -1e300, last = 0.0, sum = 0.0;
    Eigen::VectorXd lc(t);
    for (int k = 0; k < t; ++k) lc(k) = log_unnormalized_amplitude(family, spec, alpha, k, r);
    top = lc.maxCoeff();
    sum = (lc.array() - top).exp().square().sum();
    last = std::exp(lc(t - 1) - top) / std::sqrt(sum);
    if (last <= 1e-13) return t;
    if (t > 4096) throw TruncationTooSmall("no truncation up to 4096 clears the tail bound");
  }
}

std::vector<UncertaintyRecord> uncertainty_scan(const std::function<CoherentState(double, int)>& make_cs,
                                                const HalfLineBasis& basis,
                                                const std::vector<double>& z_moduli, int n_terms) {
  std::vector<CoherentState> states;
  int size = n_terms;
  for (double r : z_moduli) {
    states.push_back(make_cs(r, n_terms));
    size = std::max(size, states.back().truncation());
  }
  const ObservableTables t = build_tables(basis, size);
  std::vector<UncertaintyRecord> out;
  for (const auto& cs : states) out.push_back(uncertainty(t, cs, cs.truncation()));
  return out;
}

std::vector<UncertaintyRecord> uncertainty_scan(Family family, const LadderSpec& spec,
                                                const std::vector<double>& z_moduli, int n_terms, double alpha) {
  if (n_terms < 30) throw std::invalid_argument("uncertainty_scan: n_terms must be at least 30");
  auto make = [&](double r, int min_t) {
    return build_cs(family, spec, r, alpha, required_truncation(family, spec, alpha, r, min_t));
  };
  return uncertainty_scan(make, TruncBasis{}, z_moduli, n_terms);
}

namespace {
std::string format_cplx(cplx v) {
  if (v.imag() == 0.0) return format_double(v.real());
  return format_double(v.real()) + (std::signbit(v.imag()) ? "" : "+") + format_double(v.imag()) + "i";
}
}  // namespace

CsvTable discrepancy_table(const std::vector<Discrepancy>& d) {
  CsvTable t;
  t.header = {"kind", "n", "m", "closed_form", "quadrature", "abs_diff"};
  for (const auto& e : d)
    t.add({obs_name(e.kind), std::to_string(e.n), std::to_string(e.m), format_cplx(e.closed_form),
           format_cplx(e.quadrature), format_double(e.abs_diff)});
  return t;
}

}  // namespace tocs
