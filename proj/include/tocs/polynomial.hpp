#pragma once

#include <initializer_list>

#include <Eigen/Dense>

namespace tocs {

// Dense real polynomial, coefficients in ascending powers.
class Polynomial {
 public:
  Polynomial() : c_(Eigen::VectorXd::Zero(1)) {}
  explicit Polynomial(Eigen::VectorXd coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  static Polynomial monomial(int power, double coeff = 1.0);

  int degree() const { return int(c_.size()) - 1; }
  const Eigen::VectorXd& coeffs() const { return c_; }

  double operator()(double x) const;
  // value and the first `order` derivatives at x
  Eigen::VectorXd jet(double x, int order) const;
  Polynomial derivative() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);

 private:
  Eigen::VectorXd c_;
};

class Rational {
 public:
  Rational() = default;
  Rational(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {}

  double operator()(double x) const { return num_(x) / den_(x); }
  Eigen::VectorXd jet(double x, int order) const;

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }

 private:
  Polynomial num_, den_;
};

}  // namespace tocs
