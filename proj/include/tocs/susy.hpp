#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "tocs/coherent.hpp"
#include "tocs/polynomial.hpp"

namespace tocs {

// Solution of -u''/2 + x²u/2 = εu,
//   u = e^{-x²/2} [1F1((1-2ε)/4; 1/2; x²) + 2ν Γ((3-2ε)/4)/Γ((1-2ε)/4) x 1F1((3-2ε)/4; 3/2; x²)].
// nu = ±infinity selects the odd solution alone.
struct SeedSolution {
  double epsilon = 0.0;
  double nu = 0.0;
  double odd_weight = 0.0;  // 2ν Γ(...)/Γ(...), or 1 with the even part dropped when ν is infinite

  bool pure_odd() const { return std::isinf(nu); }
  // u, u', ..., u^{(order)} at x; derivatives come from d/dx 1F1(a;b;x²) = (2ax/b) 1F1(a+1;b+1;x²)
  Eigen::VectorXd jet(double x, int order) const;
  // |-u''/2 + x²u/2 - εu| relative to the size of its terms
  double residual(double x) const;
};

SeedSolution seed_solution(double epsilon, double nu);

// Even and odd parts of a seed: e^{-x²/2} 1F1(a_e; 1/2; x²) and e^{-x²/2} x 1F1(a_o; 3/2; x²).
Eigen::VectorXd seed_even_jet(double epsilon, double x, int order);
Eigen::VectorXd seed_odd_jet(double epsilon, double x, int order);

// W, W', W'' of the Wronskian whose columns are the given jets (jet(d) = f^{(d)}),
// each jet holding at least size + 1 derivatives.
struct WronskianJet {
  double w = 0.0, w1 = 0.0, w2 = 0.0;
};
WronskianJet wronskian_jet(const std::vector<Eigen::VectorXd>& jets);

// V = x²/2 - (ln W)''; throws SingularWronskian at the first grid point where W vanishes or changes sign.
Eigen::VectorXd wronskian_potential(const std::vector<SeedSolution>& seeds, const Eigen::VectorXd& grid);
double wronskian_potential_at(const std::vector<SeedSolution>& seeds, double x);

// Closed forms of the explicit fourth-order example.
double q4_example_potential(double x);
const std::array<Rational, 4>& q4_example_eta();  // η0..η3
const Rational& q4_example_potential_rational();

struct SusyModel {
  int q = 0;
  std::vector<SeedSolution> seeds;
  int kappa = 0;
  std::vector<double> new_energies;
  double delta1 = 0.0;
  bool explicit_intertwiner = false;  // η0..η3 and φ closed forms available
  std::function<double(double)> potential;

  double epsilon(int i) const { return seeds.at(i).epsilon; }
};

// ν for the example's seeds, recovered by fit_nu (see tests) and frozen here.
std::vector<SeedSolution> q4_example_seeds();
SusyModel q4_example_model();
// General order q from seeds; potential from the Wronskian, no intertwiner.
SusyModel model_from_seeds(std::vector<SeedSolution> seeds);

// Q ψ_n / sqrt(Π(E_n - ε_i)) and its derivatives; rows n < count, columns d <= order <= 2.
Eigen::MatrixXd iso_jets(const SusyModel& model, int count, double x, int order);
double iso_eigenfunction(const SusyModel& model, int n, double x);
// φ_{ℰ_j} closed forms, j = 0, 1.
Eigen::MatrixXd new_jets(const SusyModel& model, int count, double x, int order);
double new_eigenfunction(const SusyModel& model, int j, double x);

class SusyIsoBasis : public HalfLineBasis {
 public:
  explicit SusyIsoBasis(SusyModel model);
  Basis tag() const override { return Basis::SusyIso; }
  int max_size() const override { return 1 << 20; }
  Eigen::MatrixXd jets(double x, int count, int order) const override;

 private:
  SusyModel model_;
};

class SusyNewBasis : public HalfLineBasis {
 public:
  explicit SusyNewBasis(SusyModel model);
  Basis tag() const override { return Basis::SusyNew; }
  int max_size() const override { return model_.kappa; }
  Eigen::MatrixXd jets(double x, int count, int order) const override;

 private:
  SusyModel model_;
};

// sup over [a, b] of |-φ''/2 + Vφ - Eφ|, sampled on n points.
double eigen_residual_sup(const std::function<Eigen::Vector3d(double)>& phi_jet,
                          const std::function<double(double)>& potential, double energy, double a, double b,
                          int n = 400);

// Transformed state W(u_1..u_q, ψ)/W(u_1..u_q), normalised by sqrt(2^q Π(E - ε_i));
// psi_jet must hold q + 2 derivatives. Returns φ, φ', φ''.
Eigen::Vector3d crum_state_jet(const std::vector<SeedSolution>& seeds, double x,
                               const Eigen::VectorXd& psi_jet, double energy);

struct NuFit {
  std::vector<double> nu;
  std::vector<double> beta;  // tan β = 2νR
  double max_deviation = 0.0;
};

// Least-deviation fit of ν so the Wronskian potential reproduces target on grid.
NuFit fit_nu(const std::vector<double>& epsilons, const std::function<double(double)>& target,
             const Eigen::VectorXd& grid);

enum class Subspace { Iso, New };

struct SusyLadder {
  std::vector<double> eps;
  int kappa = 0;
  std::vector<double> new_energies;
  double delta1 = 0.0;

  // roots of L+L- as a function of the energy
  std::array<double, 6> product_roots() const;
  // the five roots of γ(H)^{-2}
  std::array<double, 5> gamma_roots() const;
  double six_factor(double e) const;
  double five_factor(double e) const;
};

SusyLadder susy_ladder(const SusyModel& model);

struct LadderAction {
  cplx coefficient;
  int index;  // -1 when annihilated
};

LadderAction susy_ladder_action(const SusyLadder& ladder, Subspace subspace, Direction dir, int index,
                                bool linearised);

LadderSpec iso_ladder_spec();
LadderSpec new_ladder_spec(const SusyModel& model);

// truncation <= 0 selects 64 for ISO and κ for NEW.
CoherentState susy_cs(const SusyModel& model, Subspace subspace, cplx z, int truncation = 0);

// Closed forms logged next to the direct sums.
double closed_form_c_hat(double delta1, int kappa, double r);
double closed_form_energy_new(double e0, double delta1, int kappa, double r);
double closed_form_probability_new(double delta1, int kappa, int j, double r);

struct NewMeasureCheck {
  Eigen::VectorXd moment_numeric;  // ∫ u^j G(u) du
  Eigen::VectorXd moment_exact;    // (j!)² / Γ(a + j)
  double moment_deviation = 0.0;
  Eigen::VectorXd diagonal;  // resolution-of-identity diagonal M_jj
  double max_deviation = 0.0;
  bool pole_limit = false;  // Γ(-Δ1/2) sits on a pole; M_jj taken as the product limit
};

NewMeasureCheck new_measure_check(double delta1, int kappa, int n_max);
NewMeasureCheck new_measure_check(const SusyModel& model, int n_max);

}  // namespace tocs
