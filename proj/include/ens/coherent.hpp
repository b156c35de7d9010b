#pragma once

#include "ens/fock.hpp"
#include "ens/states.hpp"

namespace ens::coherent {

using fock::cd;
using fock::Mat;
using fock::Mode;
using fock::TwoModeOperator;
using fock::TwoModeState;

inline constexpr double kAmplitudeCap = 4.0;

/// Simultaneous eigenvalues (alpha, beta) of the collective annihilators at a
/// given xi. Amplitudes are capped so cutoffs stay at desk scale.
class CoherentLabel {
 public:
  CoherentLabel(cd alpha, cd beta, double xi, double cap = kAmplitudeCap);

  cd alpha() const { return alpha_; }
  cd beta() const { return beta_; }
  double xi() const { return xi_; }

 private:
  cd alpha_;
  cd beta_;
  double xi_;
};

struct LocalAmplitudes {
  cd alpha_local;  // (alpha + xi conj(beta)) / sqrt(1 - xi^2)
  cd beta_local;   // (beta + xi conj(alpha)) / sqrt(1 - xi^2)
};

/// exp(alpha A^dag - conj(alpha) A) for the collective mode, as the matrix
/// exponential of the truncated generator (exactly unitary on the truncated
/// space).
TwoModeOperator collective_displacement(Mode which, cd amplitude, double xi, int cutoff_a,
                                        int cutoff_b);

/// Both displacements at once; the two generators commute.
TwoModeOperator collective_displacement_pair(cd alpha, cd beta, double xi, int cutoff_a,
                                             int cutoff_b);

/// Single-mode displacement matrix exp(alpha a^dag - conj(alpha) a).
Mat displacement_single(cd alpha, int dim);

/// Cutoffs inflated for the displaced occupation: the squeezed-vacuum policy
/// plus |local amplitude|^2 with a 12-sigma Poisson margin per mode.
states::Cutoffs default_cutoffs(const CoherentLabel& label,
                                double tolerance = fock::kDefaultTolerance);

/// Reference construction: the double series over the collective number basis
/// with Poisson-style weights. n_max must close both Poisson tails.
TwoModeState coherent_state_series(const CoherentLabel& label, states::Cutoffs cutoffs,
                                   int n_max, double tolerance = fock::kDefaultTolerance);
TwoModeState coherent_state_series(const CoherentLabel& label,
                                   double tolerance = fock::kDefaultTolerance);

/// Number of series terms per mode needed to close the Poisson tails.
int series_terms(const CoherentLabel& label, double tolerance = fock::kDefaultTolerance);

LocalAmplitudes local_displacement_decomposition(const CoherentLabel& label);

/// Oracle construction via the local decomposition: single-mode displacements
/// applied to the squeezed vacuum.
TwoModeState displaced_tmsv_local(const CoherentLabel& label, states::Cutoffs cutoffs,
                                  double tolerance = fock::kDefaultTolerance);

}  // namespace ens::coherent
