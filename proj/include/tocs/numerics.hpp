#pragma once

#include <complex>
#include <limits>
#include <functional>

#include <Eigen/Dense>

namespace tocs {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using cplx = std::complex<double>;

struct SpecialFunctionConfig {
  double series_tolerance = 1e-16;
  int max_terms = 4000;
  // NaN selects the offset automatically from a1 and x.
  double mellin_contour_offset = std::numeric_limits<double>::quiet_NaN();
  int mellin_nodes = 2048;
  double mellin_half_range = 60.0;

  void validate() const;
};

double hermite_phys(int n, double x);

// log|H_n(x)| and sign, with rescaling so large n, x never overflow.
struct SignedLog {
  double log_abs;
  int sign;
};
SignedLog hermite_phys_log(int n, double x);

double hyp1f1(double a, double b, double x, const SpecialFunctionConfig& cfg = {});
double hyp2f1_terminating(int a, double b, double c, double x);
double hyp2f2(double a1, double a2, double b1, double b2, double x,
              const SpecialFunctionConfig& cfg = {});

SignedLog log_gamma_signed(double x);
cplx log_gamma(cplx z);
double pochhammer_ratio(double a, int j);
double log_factorial(int n);

// Mellin-Barnes offset used when the config leaves it unset.
double meijer_default_offset(double a1, double x);
double meijer_g_2012(double a1, double x, const SpecialFunctionConfig& cfg = {});

enum class RuleKind { GaussHalfline, AdaptivePanel };

struct QuadratureRule {
  RuleKind kind = RuleKind::GaussHalfline;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;  // weight e^{-x^2} folded in
  Eigen::VectorXd plain_weights;  // weights * e^{x^2}, for integrands without the Gaussian
  int degree = 0;
  double tolerance = 1e-10;  // adaptive kind only
};

QuadratureRule gauss_halfline_rule(int n);
QuadratureRule adaptive_rule(double tolerance = 1e-10);

// Shared immutable rules of degree 200 and 400.
const QuadratureRule& default_rule();
const QuadratureRule& doubled_rule();

// ∫_0^∞ e^{-x^2} f(x) dx.
double integrate_halfline(const std::function<double(double)>& f, const QuadratureRule& rule);
// ∫_0^∞ g(x) dx for g already carrying its decay.
double integrate_plain(const std::function<double(double)>& g, const QuadratureRule& rule);

// Adaptive Gauss-Kronrod 7/15 on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, double abs_tol = 1e-300,
                          int max_panels = 20000);
// Adaptive on [a, ∞) through x = a + t/(1-t).
double integrate_adaptive_to_inf(const std::function<double(double)>& f, double a,
                                 double rel_tol = 1e-10, double abs_tol = 1e-300);

}  // namespace tocs
