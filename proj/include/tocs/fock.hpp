#pragma once

#include <functional>
#include <optional>
#include <string>

#include "tocs/errors.hpp"
#include "tocs/numerics.hpp"

namespace tocs {

enum class Basis { Trunc, SusyIso, SusyNew, FullHO };
const char* basis_name(Basis b);

// Abstract ladder algebra: l-|k> = sqrt(f(k))|k-1>, l+|k-1> = sqrt(g(k))|k>.
struct LadderSpec {
  std::string name;
  Basis basis = Basis::Trunc;
  std::function<double(int)> f, g, xi;
  std::optional<int> dim;  // empty = infinite
  // |z| bound for the displacement family, when finite
  std::optional<double> displacement_radius;

  void validate(int k_check = 64) const;
};

LadderSpec trunc_oscillator_spec();
LadderSpec harmonic_spec(Basis basis = Basis::FullHO);

template <class Scalar = cplx>
struct FockVector {
  Basis basis = Basis::Trunc;
  Vec<Scalar> amplitudes;

  int truncation() const { return int(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
};

enum class Direction { Lower, Raise };

template <class Scalar>
FockVector<Scalar> ladder_apply(const LadderSpec& spec, Direction dir, const FockVector<Scalar>& v) {
  if (v.basis != spec.basis) throw BasisMismatch("ladder_apply: vector basis differs from ladder basis");
  const int n = v.truncation();
  FockVector<Scalar> out{v.basis, Vec<Scalar>::Zero(n)};
  if (dir == Direction::Lower) {
    for (int k = 1; k < n; ++k) out.amplitudes(k - 1) = std::sqrt(spec.f(k)) * v.amplitudes(k);
  } else {
    for (int k = 0; k + 1 < n; ++k) {
      if (spec.dim && k + 1 >= *spec.dim) break;
      out.amplitudes(k + 1) = std::sqrt(spec.g(k + 1)) * v.amplitudes(k);
    }
  }
  return out;
}

// max_k |<k|[l-, l+]|k> - target(k)| for k <= n_max, computed through ladder_apply
double commutator_check(const LadderSpec& spec, int n_max, const std::function<double(int)>& target);
// target 4 xi(k), i.e. [l-, l+] = 4 H0
double commutator_check(const LadderSpec& spec, int n_max);

// Truncated oscillator on (0, ∞).
double energy(int k);
double trunc_log_norm(int k);  // log B_k
double trunc_eigenfunction(int k, double x);
double trunc_eigenfunction_d2(int k, double x);

// Normalised full-line oscillator states and their derivatives:
// J(n, d) = d^d/dx^d psi^HO_n(x) for n <= nmax, d <= order.
Eigen::MatrixXd ho_jets(int nmax, double x, int order);
// Same for the truncated eigenfunctions psi_k = sqrt(2) psi^HO_{2k+1}.
Eigen::MatrixXd trunc_jets(int kmax, double x, int order);

// A family of real functions on (0, ∞) with analytic derivatives.
class HalfLineBasis {
 public:
  virtual ~HalfLineBasis() = default;
  virtual Basis tag() const = 0;
  virtual int max_size() const = 0;
  // out(i, d) = d-th derivative of function i at x, i < count, d <= order
  virtual Eigen::MatrixXd jets(double x, int count, int order) const = 0;
};

class TruncBasis : public HalfLineBasis {
 public:
  Basis tag() const override { return Basis::Trunc; }
  int max_size() const override { return 1 << 20; }
  Eigen::MatrixXd jets(double x, int count, int order) const override {
    return trunc_jets(count - 1, x, order);
  }
};

}  // namespace tocs
