#include "ens/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace ens::entanglement {

namespace {

constexpr double kSchmidtFloor = 1e-14;  // values below this are dropped before the log

double log2_safe(double x) { return std::log2(x); }

}  // namespace

DensityMatrix::DensityMatrix(Mat matrix, int cutoff_a, int cutoff_b)
    : matrix_(std::move(matrix)), cutoff_a_(cutoff_a), cutoff_b_(cutoff_b) {
  if (cutoff_a_ < 1 || cutoff_b_ < 1) throw std::invalid_argument("cutoffs must be >= 1");
  const Eigen::Index flat = static_cast<Eigen::Index>(cutoff_a_) * cutoff_b_;
  if (matrix_.rows() != flat || matrix_.cols() != flat) {
    throw std::invalid_argument("density matrix must be (cutoff_a*cutoff_b)^2");
  }
  if (flat > fock::kDenseLimit) {
    throw ResourceError("density matrix dimension exceeds the dense policy");
  }
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > fock::kHermitianTolerance) {
    throw std::invalid_argument("density matrix is not Hermitian (defect " +
                                std::to_string(herm) + ")");
  }
  if (std::abs(trace() - 1.0) > 1e-10) {
    throw std::invalid_argument("density matrix trace deviates from 1 by more than 1e-10");
  }
}

double DensityMatrix::trace() const { return matrix_.trace().real(); }

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

DensityMatrix density_from_state(const TwoModeState& state) {
  const fock::Vec v = state.flattened();
  return DensityMatrix(v * v.adjoint(), state.cutoff_a(), state.cutoff_b());
}

DensityMatrix reduced_density(const TwoModeState& state, Mode keep) {
  const Mat& c = state.coeffs();
  if (keep == Mode::A) {
    return DensityMatrix(c * c.adjoint(), state.cutoff_a(), 1);
  }
  return DensityMatrix(c.transpose() * c.conjugate(), state.cutoff_b(), 1);
}

std::vector<double> schmidt_spectrum_svd(const TwoModeState& state) {
  Eigen::BDCSVD<Mat> svd(state.coeffs());
  const auto& sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

double entropy_of_distribution(const std::vector<double>& probabilities) {
  double e = 0.0;
  for (double p : probabilities) {
    if (p > kSchmidtFloor * kSchmidtFloor) e -= p * log2_safe(p);
  }
  return e < 0.0 ? 0.0 : e;
}

double entanglement_entropy(const TwoModeState& state) {
  double e = 0.0;
  for (double s : schmidt_spectrum_svd(state)) {
    if (s > kSchmidtFloor) {
      const double p = s * s;
      e -= p * log2_safe(p);
    }
  }
  return e < 0.0 ? 0.0 : e;
}

double entropy_from_closed_form(const states::EnsLabel& label) {
  // Adaptive tail: extend until the edge weight is dead and the distribution
  // is normalized to the audit tolerance.
  int m_max = states::default_cutoffs(label).b;
  for (int attempt = 0; attempt < 8; ++attempt) {
    double total = 0.0, entropy = 0.0, edge = 0.0;
    for (int m = 0; m <= m_max; ++m) {
      const double c = states::schmidt_coefficient(label, m);
      const double p = c * c;
      total += p;
      if (m >= m_max - 2) edge = std::max(edge, p);
      if (p > kSchmidtFloor * kSchmidtFloor) entropy -= p * log2_safe(p);
    }
    if (edge <= 1e-16) {
      if (std::abs(total - 1.0) > 1e-10) {
        throw PrecisionError("entropy_from_closed_form: distribution normalization off by " +
                             std::to_string(total - 1.0));
      }
      return entropy < 0.0 ? 0.0 : entropy;
    }
    m_max *= 2;
  }
  throw TruncationError("entropy_from_closed_form: tail failed to close");
}

namespace {

std::vector<std::pair<int, int>> witness_labels(int witness_bound) {
  std::vector<std::pair<int, int>> w;
  for (int n = 0; n <= witness_bound; ++n)
    for (int m = 0; m + n <= witness_bound; ++m) w.emplace_back(n, m);
  return w;
}

}  // namespace

Mat completeness_witness_block(double xi, int n_max, states::Cutoffs cutoffs,
                               int witness_bound) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  if (witness_bound >= std::min(cutoffs.a, cutoffs.b)) {
    throw std::invalid_argument("witness subspace must lie inside the cutoffs");
  }
  const auto witness = witness_labels(witness_bound);
  const int w = static_cast<int>(witness.size());
  Mat block = Mat::Zero(w, w);
  for (int na = 0; na <= n_max; ++na)
    for (int nb = 0; nb <= n_max; ++nb) {
      const TwoModeState psi = states::ens_state(states::EnsLabel(na, nb, xi), cutoffs);
      fock::Vec restricted(w);
      for (int i = 0; i < w; ++i) restricted(i) = psi.coeffs()(witness[i].first, witness[i].second);
      block += restricted * restricted.adjoint();
    }
  return block;
}

double completeness_defect(double xi, int n_max, states::Cutoffs cutoffs, int witness_bound) {
  const Mat block = completeness_witness_block(xi, n_max, cutoffs, witness_bound);
  const Eigen::Index w = block.rows();
  return (block - Mat::Identity(w, w)).cwiseAbs().maxCoeff();
}

}  // namespace ens::entanglement
