#include "ens/fock.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace ens::fock {

namespace {

void check_cutoffs(int cutoff_a, int cutoff_b) {
  if (cutoff_a < 1 || cutoff_b < 1) {
    throw std::invalid_argument("cutoffs must be >= 1, got (" + std::to_string(cutoff_a) +
                                ", " + std::to_string(cutoff_b) + ")");
  }
}

void check_match(int op_a, int op_b, const TwoModeState& state) {
  if (op_a != state.cutoff_a() || op_b != state.cutoff_b()) {
    throw std::invalid_argument("operator/state cutoff mismatch");
  }
}

void check_normalized(const TwoModeState& state) {
  if (std::abs(state.squared_norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("state is not normalized");
  }
}

double clamp_variance(double var) {
  if (var < 0.0) {
    if (var < -1e-10) {
      throw PrecisionError("variance came out below -1e-10: " + std::to_string(var));
    }
    return 0.0;
  }
  return var;
}

}  // namespace

// --- TwoModeState ------------------------------------------------------------

TwoModeState::TwoModeState(int cutoff_a, int cutoff_b, double tolerance)
    : coeffs_(Mat::Zero(cutoff_a, cutoff_b)), tolerance_(tolerance) {
  check_cutoffs(cutoff_a, cutoff_b);
}

TwoModeState::TwoModeState(Mat coeffs, double tolerance)
    : coeffs_(std::move(coeffs)), tolerance_(tolerance) {
  check_cutoffs(cutoff_a(), cutoff_b());
  if (!coeffs_.allFinite()) throw std::invalid_argument("state amplitudes must be finite");
}

double TwoModeState::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
  coeffs_ /= n;
  return n;
}

cd TwoModeState::overlap(const TwoModeState& other) const {
  if (cutoff_a() != other.cutoff_a() || cutoff_b() != other.cutoff_b()) {
    throw std::invalid_argument("overlap requires matching cutoffs");
  }
  return (coeffs_.conjugate().cwiseProduct(other.coeffs_)).sum();
}

Vec TwoModeState::flattened() const {
  const int da = cutoff_a(), db = cutoff_b();
  Vec v(da * db);
  for (int n = 0; n < da; ++n)
    for (int m = 0; m < db; ++m) v(flat_index(n, m, db)) = coeffs_(n, m);
  return v;
}

TwoModeState TwoModeState::from_flattened(const Vec& v, int cutoff_a, int cutoff_b,
                                          double tolerance) {
  check_cutoffs(cutoff_a, cutoff_b);
  if (v.size() != static_cast<Eigen::Index>(cutoff_a) * cutoff_b) {
    throw std::invalid_argument("flattened vector has wrong length");
  }
  Mat c(cutoff_a, cutoff_b);
  for (int n = 0; n < cutoff_a; ++n)
    for (int m = 0; m < cutoff_b; ++m) c(n, m) = v(flat_index(n, m, cutoff_b));
  return TwoModeState(std::move(c), tolerance);
}

TwoModeState TwoModeState::fock(int n_a, int n_b, int cutoff_a, int cutoff_b,
                                double tolerance) {
  check_cutoffs(cutoff_a, cutoff_b);
  if (n_a < 0 || n_b < 0 || n_a >= cutoff_a || n_b >= cutoff_b) {
    throw std::invalid_argument("fock labels must lie inside the cutoffs");
  }
  TwoModeState s(cutoff_a, cutoff_b, tolerance);
  s.coeffs()(n_a, n_b) = 1.0;
  return s;
}

TwoModeState TwoModeState::swapped_modes() const {
  TwoModeState s(coeffs_.transpose(), tolerance_);
  s.loss_ = loss_;
  return s;
}

// --- TwoModeOperator ---------------------------------------------------------

TwoModeOperator::TwoModeOperator(Mat matrix, int cutoff_a, int cutoff_b)
    : TwoModeOperator(std::move(matrix), SpMat(), cutoff_a, cutoff_b) {}

TwoModeOperator::TwoModeOperator(Mat matrix, SpMat leak, int cutoff_a, int cutoff_b)
    : matrix_(std::move(matrix)), leak_(std::move(leak)), cutoff_a_(cutoff_a), cutoff_b_(cutoff_b) {
  check_cutoffs(cutoff_a_, cutoff_b_);
  const Eigen::Index flat = static_cast<Eigen::Index>(cutoff_a_) * cutoff_b_;
  if (flat > kDenseLimit) {
    throw ResourceError("dense operator dimension " + std::to_string(flat) +
                        " exceeds the dense policy (" + std::to_string(kDenseLimit) +
                        "); use the sparse form");
  }
  if (matrix_.rows() != flat || matrix_.cols() != flat) {
    throw std::invalid_argument("operator matrix must be (cutoff_a*cutoff_b)^2");
  }
  if (leak_.size() != 0 && leak_.cols() != flat) {
    throw std::invalid_argument("leak block must have cutoff_a*cutoff_b columns");
  }
}

double TwoModeOperator::hermiticity_defect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

bool TwoModeOperator::is_hermitian(double tol) const { return hermiticity_defect() <= tol; }

double SparseTwoModeOperator::hermiticity_defect() const {
  SpMat diff = matrix - SpMat(matrix.adjoint());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

// --- builders ----------------------------------------------------------------

Mat annihilation_single(int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  Mat m = Mat::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return m;
}

TwoModeOperator embed(Mode mode, const Mat& single_mode, int cutoff_a, int cutoff_b) {
  check_cutoffs(cutoff_a, cutoff_b);
  const int own = mode == Mode::A ? cutoff_a : cutoff_b;
  if (single_mode.rows() != own || single_mode.cols() != own) {
    throw std::invalid_argument("single-mode matrix dimension does not match the cutoff");
  }
  const Eigen::Index flat = static_cast<Eigen::Index>(cutoff_a) * cutoff_b;
  Mat out = Mat::Zero(flat, flat);
  if (mode == Mode::A) {
    for (int n = 0; n < cutoff_a; ++n)
      for (int np = 0; np < cutoff_a; ++np) {
        if (single_mode(n, np) == cd(0, 0)) continue;
        for (int m = 0; m < cutoff_b; ++m)
          out(flat_index(n, m, cutoff_b), flat_index(np, m, cutoff_b)) = single_mode(n, np);
      }
  } else {
    for (int m = 0; m < cutoff_b; ++m)
      for (int mp = 0; mp < cutoff_b; ++mp) {
        if (single_mode(m, mp) == cd(0, 0)) continue;
        for (int n = 0; n < cutoff_a; ++n)
          out(flat_index(n, m, cutoff_b), flat_index(n, mp, cutoff_b)) = single_mode(m, mp);
      }
  }
  return TwoModeOperator(std::move(out), cutoff_a, cutoff_b);
}

namespace build {

namespace {

SpMat embed_sparse(Mode mode, const SpMat& single, int dim_a, int dim_b) {
  const Eigen::Index flat = static_cast<Eigen::Index>(dim_a) * dim_b;
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(static_cast<size_t>(single.nonZeros()) * (mode == Mode::A ? dim_b : dim_a));
  for (int k = 0; k < single.outerSize(); ++k)
    for (SpMat::InnerIterator it(single, k); it; ++it) {
      if (mode == Mode::A) {
        for (int m = 0; m < dim_b; ++m)
          trip.emplace_back(flat_index(static_cast<int>(it.row()), m, dim_b),
                            flat_index(static_cast<int>(it.col()), m, dim_b), it.value());
      } else {
        for (int n = 0; n < dim_a; ++n)
          trip.emplace_back(flat_index(n, static_cast<int>(it.row()), dim_b),
                            flat_index(n, static_cast<int>(it.col()), dim_b), it.value());
      }
    }
  SpMat out(flat, flat);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SpMat annihilation_sparse(int dim) {
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(dim);
  for (int n = 1; n < dim; ++n) trip.emplace_back(n - 1, n, cd(std::sqrt(double(n)), 0));
  SpMat m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

PaddedOps padded(int cutoff_a, int cutoff_b, int pad) {
  check_cutoffs(cutoff_a, cutoff_b);
  if (pad < 0) throw std::invalid_argument("pad must be >= 0");
  PaddedOps p;
  p.cutoff_a = cutoff_a;
  p.cutoff_b = cutoff_b;
  p.pad = pad;
  const int da = p.dim_a(), db = p.dim_b();
  SpMat a1 = annihilation_sparse(da);
  SpMat b1 = annihilation_sparse(db);
  p.a = embed_sparse(Mode::A, a1, da, db);
  p.ad = SpMat(p.a.adjoint());
  p.b = embed_sparse(Mode::B, b1, da, db);
  p.bd = SpMat(p.b.adjoint());
  SpMat id(static_cast<Eigen::Index>(da) * db, static_cast<Eigen::Index>(da) * db);
  id.setIdentity();
  p.id = id;
  return p;
}

Cropped crop(const SpMat& padded_flat, int cutoff_a, int cutoff_b, int pad) {
  const int da = cutoff_a + pad, db = cutoff_b + pad;
  const Eigen::Index flat_pad = static_cast<Eigen::Index>(da) * db;
  const Eigen::Index flat = static_cast<Eigen::Index>(cutoff_a) * cutoff_b;
  if (padded_flat.rows() != flat_pad || padded_flat.cols() != flat_pad) {
    throw std::invalid_argument("padded operator has unexpected dimension");
  }
  std::vector<Eigen::Triplet<cd>> inside, leak;
  for (int k = 0; k < padded_flat.outerSize(); ++k)
    for (SpMat::InnerIterator it(padded_flat, k); it; ++it) {
      const int col_n = static_cast<int>(it.col()) / db;
      const int col_m = static_cast<int>(it.col()) % db;
      if (col_n >= cutoff_a || col_m >= cutoff_b) continue;  // only inside columns matter
      const int col = flat_index(col_n, col_m, cutoff_b);
      const int row_n = static_cast<int>(it.row()) / db;
      const int row_m = static_cast<int>(it.row()) % db;
      if (row_n < cutoff_a && row_m < cutoff_b) {
        inside.emplace_back(flat_index(row_n, row_m, cutoff_b), col, it.value());
      } else {
        leak.emplace_back(static_cast<int>(it.row()), col, it.value());
      }
    }
  Cropped c;
  c.cutoff_a = cutoff_a;
  c.cutoff_b = cutoff_b;
  c.matrix.resize(flat, flat);
  c.matrix.setFromTriplets(inside.begin(), inside.end());
  c.leak.resize(flat_pad, flat);
  c.leak.setFromTriplets(leak.begin(), leak.end());
  return c;
}

TwoModeOperator densify(const Cropped& c) {
  return TwoModeOperator(Mat(c.matrix), c.leak, c.cutoff_a, c.cutoff_b);
}

SparseTwoModeOperator sparsify(Cropped&& c) {
  SparseTwoModeOperator op;
  op.matrix = std::move(c.matrix);
  op.leak = std::move(c.leak);
  op.cutoff_a = c.cutoff_a;
  op.cutoff_b = c.cutoff_b;
  return op;
}

}  // namespace build

TwoModeOperator ladder(Mode mode, bool raising, int cutoff_a, int cutoff_b) {
  auto p = build::padded(cutoff_a, cutoff_b, 1);
  SpMat which = mode == Mode::A ? (raising ? p.ad : p.a) : (raising ? p.bd : p.b);
  return build::densify(build::crop(which, cutoff_a, cutoff_b, 1));
}

TwoModeOperator quadrature(Mode mode, Quad which, int cutoff_a, int cutoff_b) {
  auto p = build::padded(cutoff_a, cutoff_b, 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  SpMat low = mode == Mode::A ? p.a : p.b;
  SpMat high = mode == Mode::A ? p.ad : p.bd;
  SpMat q;
  if (which == Quad::X) {
    q = (low + high) * cd(inv_sqrt2, 0);
  } else {
    q = (low - high) * cd(0, -inv_sqrt2);  // (a - a^dag)/(i sqrt 2)
  }
  return build::densify(build::crop(q, cutoff_a, cutoff_b, 1));
}

TwoModeOperator number_operator(Mode mode, int cutoff_a, int cutoff_b) {
  // Diagonal; no leak.
  check_cutoffs(cutoff_a, cutoff_b);
  const Eigen::Index flat = static_cast<Eigen::Index>(cutoff_a) * cutoff_b;
  Mat out = Mat::Zero(flat, flat);
  for (int n = 0; n < cutoff_a; ++n)
    for (int m = 0; m < cutoff_b; ++m)
      out(flat_index(n, m, cutoff_b), flat_index(n, m, cutoff_b)) = mode == Mode::A ? n : m;
  return TwoModeOperator(std::move(out), cutoff_a, cutoff_b);
}

TwoModeOperator identity_operator(int cutoff_a, int cutoff_b) {
  check_cutoffs(cutoff_a, cutoff_b);
  const Eigen::Index flat = static_cast<Eigen::Index>(cutoff_a) * cutoff_b;
  return TwoModeOperator(Mat::Identity(flat, flat), cutoff_a, cutoff_b);
}

// --- evaluation ----------------------------------------------------------------

cd expectation(const TwoModeOperator& op, const TwoModeState& state) {
  check_match(op.cutoff_a(), op.cutoff_b(), state);
  check_normalized(state);
  const Vec v = state.flattened();
  return v.dot(op.matrix() * v);  // Eigen's dot conjugates the left argument
}

cd expectation(const SparseTwoModeOperator& op, const TwoModeState& state) {
  check_match(op.cutoff_a, op.cutoff_b, state);
  check_normalized(state);
  const Vec v = state.flattened();
  return v.dot(op.matrix * v);
}

namespace {

double real_guarded(cd value) {
  if (std::abs(value.imag()) > kImaginaryTolerance) {
    throw PrecisionError("expectation has imaginary part " + std::to_string(value.imag()));
  }
  return value.real();
}

template <typename Matrix>
double variance_impl(const Matrix& matrix, const SpMat& leak, const TwoModeState& state) {
  const Vec v = state.flattened();
  const Vec mv = matrix * v;
  double second = mv.squaredNorm();
  if (leak.nonZeros() > 0) second += (leak * v).squaredNorm();
  const double mean = real_guarded(v.dot(mv));
  return clamp_variance(second - mean * mean);
}

}  // namespace

double real_expectation(const TwoModeOperator& op, const TwoModeState& state) {
  return real_guarded(expectation(op, state));
}

double real_expectation(const SparseTwoModeOperator& op, const TwoModeState& state) {
  return real_guarded(expectation(op, state));
}

double variance(const TwoModeOperator& op, const TwoModeState& state) {
  check_match(op.cutoff_a(), op.cutoff_b(), state);
  check_normalized(state);
  if (!op.is_hermitian()) throw std::invalid_argument("variance requires a Hermitian operator");
  return variance_impl(op.matrix(), op.leak(), state);
}

double variance(const SparseTwoModeOperator& op, const TwoModeState& state) {
  check_match(op.cutoff_a, op.cutoff_b, state);
  check_normalized(state);
  if (op.hermiticity_defect() > kHermitianTolerance) {
    throw std::invalid_argument("variance requires a Hermitian operator");
  }
  return variance_impl(op.matrix, op.leak, state);
}

namespace {

template <typename Matrix>
ApplyResult apply_impl(const Matrix& matrix, const SpMat& leak, const TwoModeState& state,
                       int cutoff_a, int cutoff_b) {
  const Vec v = state.flattened();
  Vec out = matrix * v;
  double lost = leak.nonZeros() > 0 ? (leak * v).squaredNorm() : 0.0;
  TwoModeState result =
      TwoModeState::from_flattened(out, cutoff_a, cutoff_b, state.truncation_tolerance());
  result.add_truncation_loss(state.truncation_loss() + lost);
  return ApplyResult{std::move(result), lost};
}

}  // namespace

ApplyResult apply(const TwoModeOperator& op, const TwoModeState& state) {
  check_match(op.cutoff_a(), op.cutoff_b(), state);
  return apply_impl(op.matrix(), op.leak(), state, op.cutoff_a(), op.cutoff_b());
}

ApplyResult apply(const SparseTwoModeOperator& op, const TwoModeState& state) {
  check_match(op.cutoff_a, op.cutoff_b, state);
  return apply_impl(op.matrix, op.leak, state, op.cutoff_a, op.cutoff_b);
}

namespace {

template <typename Matrix>
double residual_impl(const Matrix& matrix, const SpMat& leak, const TwoModeState& state,
                     double eigenvalue) {
  const Vec v = state.flattened();
  const Vec mv = matrix * v - eigenvalue * v;
  double r2 = mv.squaredNorm();
  if (leak.nonZeros() > 0) r2 += (leak * v).squaredNorm();
  return std::sqrt(r2);
}

}  // namespace

double eigen_residual(const SparseTwoModeOperator& op, const TwoModeState& state,
                      double eigenvalue) {
  check_match(op.cutoff_a, op.cutoff_b, state);
  return residual_impl(op.matrix, op.leak, state, eigenvalue);
}

double eigen_residual(const TwoModeOperator& op, const TwoModeState& state, double eigenvalue) {
  check_match(op.cutoff_a(), op.cutoff_b(), state);
  return residual_impl(op.matrix(), op.leak(), state, eigenvalue);
}

double interior_max_abs(const Mat& m, int cutoff_a, int cutoff_b, int margin) {
  const int na = cutoff_a - margin, nb = cutoff_b - margin;
  if (na < 1 || nb < 1) throw std::invalid_argument("margin leaves an empty interior block");
  double worst = 0.0;
  for (int n = 0; n < na; ++n)
    for (int mB = 0; mB < nb; ++mB) {
      const int row = flat_index(n, mB, cutoff_b);
      for (int np = 0; np < na; ++np)
        for (int mp = 0; mp < nb; ++mp)
          worst = std::max(worst, std::abs(m(row, flat_index(np, mp, cutoff_b))));
    }
  return worst;
}

}  // namespace ens::fock
