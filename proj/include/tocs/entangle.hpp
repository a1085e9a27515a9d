#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tocs/observables.hpp"
#include "tocs/susy.hpp"

namespace tocs {

// ∫_0^∞ H_α H_β e^{-x²} dx (physicists' Hermite, unnormalised).
// Closed form when 1 - (α+β)/2 avoids the Γ poles, quadrature otherwise.
double halfline_overlap(int alpha, int beta);
double halfline_overlap_quadrature(int alpha, int beta);
// true when 1 - (α+β)/2 is not a pole of Γ
bool halfline_overlap_regular(int alpha, int beta);

// G_mn = ∫_0^∞ ψ^HO_m ψ^HO_n, m, n <= nmax, by Gauss quadrature.
Eigen::MatrixXd halfline_gram(int nmax);

struct BeamSplitterSetting {
  double theta = 0.0, phi = 0.0;

  cplx r() const;  // -e^{-iφ} sin(θ/2)
  double t() const;  // cos(θ/2)
};

// exp(τ a†b - τ* a b†), τ = (θ/2) e^{iφ}, on the block |k, N-k>, k = 0..N (row/column k = mode-a count).
// Disentangled product at a reduced angle, squared back up.
Mat<cplx> bs_block(int total, const BeamSplitterSetting& s);
// Disentangled product at the full angle; loses accuracy as N grows.
Mat<cplx> bs_block_direct(int total, const BeamSplitterSetting& s);
// Reference: exponential through the eigendecomposition of the generator.
Mat<cplx> bs_block_expm(int total, const BeamSplitterSetting& s);

// Amplitudes A(m, n) on full-line levels, zero outside m + n <= cutoff.
struct TwoModeState {
  Mat<cplx> amplitudes;
  int cutoff = 0;

  double norm() const { return amplitudes.norm(); }
};

TwoModeState product_state(const Vec<cplx>& mode_a, const Vec<cplx>& mode_b, int cutoff);

class BeamSplitter {
 public:
  explicit BeamSplitter(BeamSplitterSetting s) : s_(s) {}
  const BeamSplitterSetting& setting() const { return s_; }
  const Mat<cplx>& block(int total);
  TwoModeState apply(const TwoModeState& in);

 private:
  BeamSplitterSetting s_;
  std::map<int, Mat<cplx>> cache_;
};

// Half-line truncated-oscillator amplitudes placed on the odd full-line levels: √2 c_n at 2n+1.
Vec<cplx> embed_trunc(const Vec<cplx>& c);

struct Expansion {
  Vec<cplx> fullline;  // √2 d_k at level 2k+1
  double recovered_norm = 0.0;  // Σ|d_k|²
  int levels = 0;
};

// d_k = ∫_0^∞ √2 ψ^HO_{2k+1} φ for φ = Σ c_n basis_n, k < levels.
Expansion expand_halfline(const HalfLineBasis& basis, const Vec<cplx>& c, int levels);
// grows levels in steps of 8 from min_levels until Σ|d_k|² >= |c|² (1 - tol)
Expansion expand_halfline_auto(const HalfLineBasis& basis, const Vec<cplx>& c, int min_levels, double tol = 1e-6,
                               int max_levels = 400);

// ρ_A of the state restricted to the positive quadrant, written in the Löwdin-orthonormalised
// half-line basis: B = S A S with S = G^{1/2}, ρ_A = B B† / Tr.
Mat<cplx> reduced_density(const TwoModeState& state, const Eigen::MatrixXd& gram);
double linear_entropy(const Mat<cplx>& rho);

struct EntropyOptions {
  int cs_truncation = 20;  // trunc families; raised when the tail needs it
  int susy_levels = 45;    // odd full-line levels for SUSY expansions
  double refine_factor = 1.5;
  double convergence_tol = 5e-3;
  bool check_convergence = true;
  std::optional<SusyModel> model;  // SUSY families; default is the q = 4 example
  int threads = 0;                 // z points run on this many workers; 0 = hardware concurrency
};

struct EntropyRecord {
  double z_modulus = 0.0;
  double entropy = 0.0;
  double entropy_refined = 0.0;  // NaN when not computed
  int cutoff = 0;
  bool converged = true;
};

// Trunc families send |0> ⊗ |z>, SUSY families send |ℰ0> ⊗ |z>.
std::vector<EntropyRecord> entropy_scan(Family family, const std::vector<double>& z_moduli,
                                        const BeamSplitterSetting& bs, const EntropyOptions& opt = {});

}  // namespace tocs
