#pragma once

#include <vector>

#include "tocs/coherent.hpp"
#include "tocs/csv.hpp"

namespace tocs {

enum class ObsKind { X, X2, P, P2 };
const char* obs_name(ObsKind k);

enum class ElementSource { ClosedForm, Quadrature };

struct MatrixElementTable {
  ObsKind kind = ObsKind::X;
  Mat<cplx> entries;
  ElementSource source = ElementSource::Quadrature;
  Basis basis = Basis::Trunc;

  int size() const { return int(entries.rows()); }
};

// The four closed forms for the truncated oscillator, taken literally for
// n >= m; n < m follows from symmetry (X, X2, P2) or Hermiticity (P).
cplx matrix_element_closed(ObsKind kind, int n, int m, Basis basis = Basis::Trunc);

// <n|O|m> by half-line quadrature; P2 uses the symmetric first-derivative form.
cplx matrix_element_quadrature(ObsKind kind, int n, int m, const HalfLineBasis& basis,
                               const QuadratureRule& rule = default_rule());

MatrixElementTable closed_form_table(ObsKind kind, int size);
MatrixElementTable quadrature_table(ObsKind kind, const HalfLineBasis& basis, int size,
                                    const QuadratureRule& rule);
// P2 through -∫ψ_n ψ_m'' (secondary check only)
MatrixElementTable p2_second_derivative_table(const HalfLineBasis& basis, int size,
                                              const QuadratureRule& rule);

struct ObservableTables {
  MatrixElementTable x, x2, p, p2;
  double doubling_shift = 0.0;  // max entry change between degree n and 2n rules
};

// Gauss degree large enough for products of the first `size` functions.
int rule_degree_for(const HalfLineBasis& basis, int size);

// Builds all four tables by quadrature and verifies them against a doubled rule.
ObservableTables build_tables(const HalfLineBasis& basis, int size, double doubling_tol = 1e-9);

struct Discrepancy {
  ObsKind kind;
  int n, m;
  cplx closed_form, quadrature;
  double abs_diff;
};

// Every (kind, n, m), n >= m, n <= n_max where closed form and quadrature differ by more than tol.
std::vector<Discrepancy> closed_form_discrepancies(const ObservableTables& quad, int n_max, double tol,
                                                   const std::vector<ObsKind>& kinds = {ObsKind::X, ObsKind::X2,
                                                                                         ObsKind::P, ObsKind::P2});
// columns kind,n,m,closed_form,quadrature,abs_diff; complex values written as a+bi only when imaginary parts exist
CsvTable discrepancy_table(const std::vector<Discrepancy>& d);

double expectation(const MatrixElementTable& table, const CoherentState& cs, int n_terms);
// Unfolded Σ conj(c_n) O_nm c_m, for checking that the folded value is real.
cplx expectation_unfolded(const MatrixElementTable& table, const CoherentState& cs, int n_terms);
cplx expectation_unfolded(const MatrixElementTable& table, const FockVector<cplx>& v, int n_terms);

struct UncertaintyRecord {
  double z_modulus;
  double sigma_x, sigma_p, product;
  int truncation;
};

UncertaintyRecord uncertainty(const ObservableTables& tables, const CoherentState& cs, int n_terms);

// Smallest truncation >= min_truncation whose last amplitude clears the tail bound.
int required_truncation(Family family, const LadderSpec& spec, double alpha, double r, int min_truncation);

// Generic scan: make_cs(r, min_truncation) supplies the state, tables come from `basis`.
std::vector<UncertaintyRecord> uncertainty_scan(
    const std::function<CoherentState(double, int)>& make_cs, const HalfLineBasis& basis,
    const std::vector<double>& z_moduli, int n_terms);

// Truncated-oscillator families, z = |z| on the real axis.
std::vector<UncertaintyRecord> uncertainty_scan(Family family, const LadderSpec& spec,
                                                const std::vector<double>& z_moduli, int n_terms = 30,
                                                double alpha = 2.0);

}  // namespace tocs
