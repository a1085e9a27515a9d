#include "tocs/polynomial.hpp"

#include <algorithm>

namespace tocs {

Polynomial::Polynomial(Eigen::VectorXd coeffs) : c_(std::move(coeffs)) {
  if (c_.size() == 0) c_ = Eigen::VectorXd::Zero(1);
}

Polynomial::Polynomial(std::initializer_list<double> coeffs)
    : Polynomial(Eigen::Map<const Eigen::VectorXd>(coeffs.begin(), Eigen::Index(coeffs.size()))) {}

Polynomial Polynomial::monomial(int power, double coeff) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(power + 1);
  c(power) = coeff;
  return Polynomial(c);
}

double Polynomial::operator()(double x) const {
  double s = 0.0;
  for (Eigen::Index i = c_.size() - 1; i >= 0; --i) s = s * x + c_(i);
  return s;
}

Eigen::VectorXd Polynomial::jet(double x, int order) const {
  // repeated synthetic division gives Taylor coefficients at x
  Eigen::VectorXd t = c_;
  const Eigen::Index n = t.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(order + 1);
  double fact = 1.0;
  for (int k = 0; k <= order && k < n; ++k) {
    for (Eigen::Index i = n - 2; i >= k; --i) t(i) += x * t(i + 1);
    if (k > 0) fact *= k;
    out(k) = t(k) * fact;
  }
  return out;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  Eigen::VectorXd d(c_.size() - 1);
  for (Eigen::Index i = 1; i < c_.size(); ++i) d(i - 1) = double(i) * c_(i);
  return Polynomial(d);
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  const Eigen::Index n = std::max(a.c_.size(), b.c_.size());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c.head(a.c_.size()) += a.c_;
  c.head(b.c_.size()) += b.c_;
  return Polynomial(c);
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(a.c_.size() + b.c_.size() - 1);
  for (Eigen::Index i = 0; i < a.c_.size(); ++i) c.segment(i, b.c_.size()) += a.c_(i) * b.c_;
  return Polynomial(c);
}

Polynomial operator*(double s, const Polynomial& a) { return Polynomial(Eigen::VectorXd(s * a.c_)); }

Eigen::VectorXd Rational::jet(double x, int order) const {
  const Eigen::VectorXd N = num_.jet(x, order);
  const Eigen::VectorXd P = den_.jet(x, order);
  Eigen::VectorXd r(order + 1);
  for (int k = 0; k <= order; ++k) {
    double s = N(k);
    double binom = 1.0;
    for (int j = 1; j <= k; ++j) {
      binom = binom * (k - j + 1) / j;
      s -= binom * P(j) * r(k - j);
    }
    r(k) = s / P(0);
  }
  return r;
}

}  // namespace tocs
