#pragma once

#include <string>
#include <vector>

#include "tocs/fock.hpp"

namespace tocs {

enum class Family { LMinus, Displacement, LinLMinus, LinDisplacement, SusyIso, SusyNew };
const char* family_name(Family f);

struct CoherentState {
  Family family = Family::LMinus;
  cplx z = 0.0;
  double alpha = 2.0;
  FockVector<cplx> vector;
  double norm_constant = 1.0;  // C_z from the direct amplitude sum
  LadderSpec spec;

  int truncation() const { return vector.truncation(); }
};

// log of the unnormalised modulus |c_k| at |z| = r for the ladder families.
// SusyIso maps to the linearised displacement series with alpha = 2.
double log_unnormalized_amplitude(Family family, const LadderSpec& spec, double alpha, int k, double r);

CoherentState build_cs(Family family, const LadderSpec& spec, cplx z, double alpha = 2.0,
                       int truncation = 64);

double eigen_residual(const CoherentState& cs);
double state_probability(const CoherentState& cs, int n);
double energy_expectation(const CoherentState& cs);
FockVector<cplx> evolve(const CoherentState& cs, double t);

// Closed forms for the truncated oscillator, used as cross-checks only.
double closed_form_cz(double r);
double closed_form_cz_tilde(double r);
double closed_form_energy(double r);

// Partial sums of Σ|c_k|² for the displacement family (divergence witness).
std::vector<double> displacement_partial_sums(const LadderSpec& spec, double r, int terms);

enum class MeasureId { MuTruncReference, MuTruncCorrected, MuIso };
const char* measure_name(MeasureId id);

struct Measure {
  Family family;
  MeasureId id;
  // mu(r) * C(r)^2, i.e. the density against the unnormalised amplitudes;
  // keeps the moment integrals free of normalisation round-off.
  std::function<double(double)> weight;
  double alpha = 2.0;
  LadderSpec spec;

  // mu(r) with C(r)^2 from the direct sum at the given truncation
  double radial_density(double r, int truncation = 64) const;
};

Measure mu_trunc_reference();
Measure mu_trunc_corrected();
Measure mu_iso();

struct IdentityCheck {
  double max_deviation = 0.0;
  Eigen::VectorXd diagonal;  // M_nn, n = 0..n_max
};

// Off-diagonal entries vanish by the analytic phase integral, so only the
// radial diagonal moments are integrated.
IdentityCheck identity_resolution_check(const Measure& measure, int n_max, double r_max = 40.0);

}  // namespace tocs
