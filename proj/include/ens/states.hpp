#pragma once

#include <vector>

#include "ens/fock.hpp"

namespace ens::states {

using fock::cd;
using fock::Mat;
using fock::Mode;
using fock::SparseTwoModeOperator;
using fock::TwoModeOperator;
using fock::TwoModeState;

/// Label (N_A, N_B, xi) of a joint eigenstate of the collective number
/// operators. xi must lie strictly inside (0, 1); the xi -> 0 limit is only
/// probed numerically, never taken.
class EnsLabel {
 public:
  EnsLabel(int n_a, int n_b, double xi);

  int n_a() const { return n_a_; }
  int n_b() const { return n_b_; }
  double xi() const { return xi_; }

  /// Squeeze amount r = atanh(xi) of the parametric-amplifier realization.
  double squeeze_amount() const;

 private:
  int n_a_;
  int n_b_;
  double xi_;
};

/// Signed Schmidt coefficients C_m with the mode pairing |offset + m>_A |m>_B
/// (offset >= 0; a negative offset records a label swap, with the pairing
/// applied to the exchanged modes).
struct SchmidtSpectrum {
  int offset = 0;
  std::vector<double> coeffs;
  double xi = 0.0;

  double sum_of_squares() const;
  /// |C_m|^2 sorted descending, for oracle comparisons.
  std::vector<double> sorted_magnitudes() const;
};

struct Cutoffs {
  int a = 0;
  int b = 0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Cutoff policy: mode-B cutoff from the closed-form number distribution
/// (mean + 12 sigma + N_B + 10), extended until the distribution's edge
/// weight and tail mass are negligible at the requested tolerance;
/// D_A = D_B + |N_A - N_B| completes the pairing band.
Cutoffs default_cutoffs(const EnsLabel& label, double tolerance = fock::kDefaultTolerance);

/// Two-mode squeezed vacuum: diagonal amplitudes xi^n, renormalized over the
/// truncated window. Requires xi^(2 cutoff) <= tolerance.
TwoModeState tmsv(double xi, int cutoff, double tolerance = fock::kDefaultTolerance);

/// (a - xi b^dag)/sqrt(1-xi^2) for mode A, (b - xi a^dag)/sqrt(1-xi^2) for B.
TwoModeOperator collective_annihilator(Mode which, double xi, int cutoff_a, int cutoff_b);
SparseTwoModeOperator collective_annihilator_sparse(Mode which, double xi, int cutoff_a,
                                                    int cutoff_b);
/// Adjoints of the above, with their own exact leak blocks.
TwoModeOperator collective_creator(Mode which, double xi, int cutoff_a, int cutoff_b);
SparseTwoModeOperator collective_creator_sparse(Mode which, double xi, int cutoff_a,
                                                int cutoff_b);

/// |N_A, N_B; xi>: the collective creators applied to the squeezed vacuum,
/// normalized, with the accumulated cutoff leakage audited against the
/// tolerance.
TwoModeState ens_state(const EnsLabel& label, Cutoffs cutoffs,
                       double tolerance = fock::kDefaultTolerance);
TwoModeState ens_state(const EnsLabel& label, double tolerance = fock::kDefaultTolerance);

/// Closed-form signed Schmidt coefficients for m = 0..m_max. Throws
/// TruncationError when m_max leaves visible tail mass, PrecisionError when
/// the alternating sum lost the normalization.
SchmidtSpectrum closed_form_schmidt(const EnsLabel& label, int m_max);

/// Single closed-form coefficient; no normalization audit.
double schmidt_coefficient(const EnsLabel& label, int m);

/// Mean and variance of the mode-B number operator in closed form.
Moments photon_number_moments(const EnsLabel& label);

/// Negative-binomial law (1-p)^(1+n_a) p^m (n_a+m)! / (n_a! m!).
double negative_binomial_pmf(int n_a, double p, int m);

/// exp(r (a^dag b^dag - a b)) on the truncated space. The generator conserves
/// n_a - n_b, so the exponential is taken blockwise; the result is exactly
/// unitary on the truncated space. Accuracy against the untruncated operator
/// is audited through the vacuum column, which must reproduce the squeezed
/// vacuum at tanh(r).
TwoModeOperator two_mode_squeezer(double r, int cutoff_a, int cutoff_b);

}  // namespace ens::states
