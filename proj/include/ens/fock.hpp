#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>

#include "ens/errors.hpp"

namespace ens::fock {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cd>;

enum class Mode { A, B };
enum class Quad { X, P };

inline constexpr double kDefaultTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kImaginaryTolerance = 1e-10;

// Largest flattened dimension (cutoff_a * cutoff_b) for which dense matrices
// and O(D^3) eigenwork are allowed. Beyond this, use the sparse builders.
inline constexpr int kDenseLimit = 4096;

// Flattened basis index. The convention n_a * cutoff_b + n_b is fixed
// project-wide; every serialization uses it.
inline int flat_index(int n_a, int n_b, int cutoff_b) { return n_a * cutoff_b + n_b; }

/// Pure two-mode state: amplitudes coeffs(n_a, n_b) over |n_a>|n_b> with
/// n_a < cutoff_a, n_b < cutoff_b. Carries the declared truncation tolerance
/// and the squared-norm mass lost to the cutoffs so far (the audited error
/// budget of every construction).
class TwoModeState {
 public:
  TwoModeState(int cutoff_a, int cutoff_b, double tolerance = kDefaultTolerance);
  explicit TwoModeState(Mat coeffs, double tolerance = kDefaultTolerance);

  int cutoff_a() const { return static_cast<int>(coeffs_.rows()); }
  int cutoff_b() const { return static_cast<int>(coeffs_.cols()); }
  const Mat& coeffs() const { return coeffs_; }
  Mat& coeffs() { return coeffs_; }
  double truncation_tolerance() const { return tolerance_; }

  double truncation_loss() const { return loss_; }
  void add_truncation_loss(double squared_norm) { loss_ += squared_norm; }

  double norm() const { return coeffs_.norm(); }
  double squared_norm() const { return coeffs_.squaredNorm(); }
  /// Rescales to unit norm; returns the pre-normalization norm.
  double normalize();

  /// <this|other>
  cd overlap(const TwoModeState& other) const;

  Vec flattened() const;
  static TwoModeState from_flattened(const Vec& v, int cutoff_a, int cutoff_b,
                                     double tolerance = kDefaultTolerance);

  /// Basis product state |n_a>|n_b>.
  static TwoModeState fock(int n_a, int n_b, int cutoff_a, int cutoff_b,
                           double tolerance = kDefaultTolerance);

  /// State with the two modes exchanged (coefficient matrix transposed).
  TwoModeState swapped_modes() const;

 private:
  Mat coeffs_;
  double tolerance_;
  double loss_ = 0.0;
};

/// Operator on the flattened two-mode basis. `matrix` acts within the
/// cutoffs; `leak` (possibly empty) holds the rows of the same operator that
/// map inside states to excitations beyond the cutoffs, so that norms,
/// variances and residuals can account for amplitude a truncated matrix
/// alone would silently drop. Leak rows are indexed by the flattened index of
/// the padded space the operator was built in.
class TwoModeOperator {
 public:
  TwoModeOperator(Mat matrix, int cutoff_a, int cutoff_b);
  TwoModeOperator(Mat matrix, SpMat leak, int cutoff_a, int cutoff_b);

  int cutoff_a() const { return cutoff_a_; }
  int cutoff_b() const { return cutoff_b_; }
  const Mat& matrix() const { return matrix_; }
  const SpMat& leak() const { return leak_; }
  bool has_leak() const { return leak_.nonZeros() > 0; }

  double hermiticity_defect() const;
  bool is_hermitian(double tol = kHermitianTolerance) const;

 private:
  Mat matrix_;
  SpMat leak_;
  int cutoff_a_;
  int cutoff_b_;
};

/// Sparse form of the same thing, for cutoff products past the dense limit.
struct SparseTwoModeOperator {
  SpMat matrix;
  SpMat leak;
  int cutoff_a = 0;
  int cutoff_b = 0;

  double hermiticity_defect() const;
};

struct ApplyResult {
  TwoModeState state;        // unnormalized; caller decides normalization
  double truncation_loss;    // squared norm leaked past the cutoffs
};

// --- builders ---------------------------------------------------------------

/// Single-mode annihilation matrix: M(n-1, n) = sqrt(n), a|0> = 0.
Mat annihilation_single(int cutoff);

/// Kronecker embedding of a single-mode matrix as op (x) 1 or 1 (x) op.
/// The result carries no leak block; use `ladder` for cutoff-aware ladders.
TwoModeOperator embed(Mode mode, const Mat& single_mode, int cutoff_a, int cutoff_b);

/// Embedded annihilation (raising = false) or creation (raising = true)
/// with the exact leak row for creation at the cutoff edge.
TwoModeOperator ladder(Mode mode, bool raising, int cutoff_a, int cutoff_b);

/// x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)) on the chosen mode.
TwoModeOperator quadrature(Mode mode, Quad which, int cutoff_a, int cutoff_b);

TwoModeOperator number_operator(Mode mode, int cutoff_a, int cutoff_b);
TwoModeOperator identity_operator(int cutoff_a, int cutoff_b);

// --- evaluation -------------------------------------------------------------

/// <psi|O|psi>. Requires matching cutoffs and a normalized state.
cd expectation(const TwoModeOperator& op, const TwoModeState& state);
cd expectation(const SparseTwoModeOperator& op, const TwoModeState& state);

/// Expectation of a Hermitian operator; rejects imaginary parts beyond
/// kImaginaryTolerance.
double real_expectation(const TwoModeOperator& op, const TwoModeState& state);
double real_expectation(const SparseTwoModeOperator& op, const TwoModeState& state);

/// <O^2> - <O>^2 for Hermitian O, leak-aware: the leaked amplitude of O|psi>
/// contributes to <O^2>. Clamped to 0 when within -1e-10.
double variance(const TwoModeOperator& op, const TwoModeState& state);
double variance(const SparseTwoModeOperator& op, const TwoModeState& state);

ApplyResult apply(const TwoModeOperator& op, const TwoModeState& state);
ApplyResult apply(const SparseTwoModeOperator& op, const TwoModeState& state);

/// || (O - scalar) |psi> ||, leak-aware. Residual of an eigenvalue claim.
double eigen_residual(const SparseTwoModeOperator& op, const TwoModeState& state, double eigenvalue);
double eigen_residual(const TwoModeOperator& op, const TwoModeState& state, double eigenvalue);

/// max |entry| over the flattened block whose labels keep `margin` levels of
/// distance from both cutoffs. Commutator identities hold only there.
double interior_max_abs(const Mat& m, int cutoff_a, int cutoff_b, int margin);

// --- padded assembly of composite operators ---------------------------------
//
// Composites (collective ladders, noise operators, their squares) are built
// at cutoffs enlarged by the polynomial's total raising power, then cropped.
// The crop equals the infinite-dimensional operator restricted to the
// declared cutoffs, and the discarded rows form the exact leak block.

namespace build {

struct PaddedOps {
  int cutoff_a = 0;
  int cutoff_b = 0;
  int pad = 0;
  SpMat a, ad, b, bd, id;

  int dim_a() const { return cutoff_a + pad; }
  int dim_b() const { return cutoff_b + pad; }
};

PaddedOps padded(int cutoff_a, int cutoff_b, int pad);

struct Cropped {
  SpMat matrix;  // (ca*cb) x (ca*cb)
  SpMat leak;    // (dim_a*dim_b) x (ca*cb); nonzeros only on outside rows
  int cutoff_a = 0;
  int cutoff_b = 0;
};

Cropped crop(const SpMat& padded_flat, int cutoff_a, int cutoff_b, int pad);

TwoModeOperator densify(const Cropped& c);
SparseTwoModeOperator sparsify(Cropped&& c);

}  // namespace build

}  // namespace ens::fock
