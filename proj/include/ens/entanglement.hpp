#pragma once

#include <vector>

#include "ens/fock.hpp"
#include "ens/states.hpp"

namespace ens::entanglement {

using fock::Mat;
using fock::Mode;
using fock::TwoModeState;

/// Hermitian matrix on the flattened two-mode basis with unit trace. Reduced
/// single-mode states use cutoff_b = 1 (a trivial second mode). Positivity is
/// not enforced: partial transposes are carried by the same type.
class DensityMatrix {
 public:
  DensityMatrix(Mat matrix, int cutoff_a, int cutoff_b);

  const Mat& matrix() const { return matrix_; }
  int cutoff_a() const { return cutoff_a_; }
  int cutoff_b() const { return cutoff_b_; }
  double trace() const;

  /// Real spectrum, ascending.
  Eigen::VectorXd eigenvalues() const;

 private:
  Mat matrix_;
  int cutoff_a_;
  int cutoff_b_;
};

/// |psi><psi| on the flattened basis. Dense policy applies.
DensityMatrix density_from_state(const TwoModeState& state);

/// Partial trace over the discarded mode.
DensityMatrix reduced_density(const TwoModeState& state, Mode keep);

/// Singular values of the coefficient matrix, descending. The brute-force
/// oracle for every closed-form Schmidt claim.
std::vector<double> schmidt_spectrum_svd(const TwoModeState& state);

/// Von Neumann entropy of the marginal, in bits: -sum s^2 log2 s^2 over the
/// Schmidt spectrum. Values below 1e-14 are dropped before the log.
double entanglement_entropy(const TwoModeState& state);
double entropy_of_distribution(const std::vector<double>& probabilities);

/// Entropy from the closed-form coefficients with an adaptive tail.
double entropy_from_closed_form(const states::EnsLabel& label);

/// Witness-subspace completeness of the family {|N_A,N_B;xi>, labels <= n_max}:
/// max |M - 1| over the bare-Fock block with n_a + n_b <= witness_bound, where
/// M is the partial sum of projectors compressed to that block.
double completeness_defect(double xi, int n_max, states::Cutoffs cutoffs, int witness_bound = 6);

/// The compressed partial sum itself (eigenvalues must sit in [0, 1]).
Mat completeness_witness_block(double xi, int n_max, states::Cutoffs cutoffs,
                               int witness_bound = 6);

}  // namespace ens::entanglement
