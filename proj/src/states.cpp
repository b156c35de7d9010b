#include "ens/states.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ens::states {

namespace {

void require_xi(double xi) {
  if (!(xi > 0.0 && xi < 1.0)) {
    throw std::invalid_argument("xi must lie strictly in (0, 1), got " + std::to_string(xi));
  }
}

// Signed closed-form coefficient for big >= small; log-space term evaluation
// with the largest magnitude factored out, compensated summation in linear
// space. The alternating sum cancels catastrophically only for excitations
// far past what the normalization audit tolerates.
double schmidt_core(int big, int small, double xi, int m) {
  const double log_xi = std::log(xi);
  const double log_omx2 = std::log1p(-xi * xi);
  const double logpre = 0.5 * (big - small + 1) * log_omx2;
  const int kmax = std::min(m, small);

  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(kmax + 1);
  std::vector<double> signs(kmax + 1);
  for (int k = 0; k <= kmax; ++k) {
    logs[k] = k * log_omx2 + (small - k + m - k) * log_xi +
              0.5 * (std::lgamma(big + 1.0) + std::lgamma(small + 1.0) +
                     std::lgamma(big - small + m + 1.0) + std::lgamma(m + 1.0)) -
              std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) -
              std::lgamma(big - small + k + 1.0) - std::lgamma(small - k + 1.0);
    signs[k] = (small - k) % 2 == 0 ? 1.0 : -1.0;
    max_log = std::max(max_log, logs[k]);
  }

  double sum = 0.0, comp = 0.0;  // Kahan
  for (int k = 0; k <= kmax; ++k) {
    const double term = signs[k] * std::exp(logs[k] - max_log) - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  if (sum == 0.0) return 0.0;
  return std::copysign(std::exp(logpre + max_log + std::log(std::abs(sum))), sum);
}

double squared_weight(int big, int small, double xi, int m) {
  const double c = schmidt_core(big, small, xi, m);
  return c * c;
}

}  // namespace

// --- EnsLabel ------------------------------------------------------------------

EnsLabel::EnsLabel(int n_a, int n_b, double xi) : n_a_(n_a), n_b_(n_b), xi_(xi) {
  if (n_a < 0 || n_b < 0) throw std::invalid_argument("excitation numbers must be >= 0");
  require_xi(xi);
}

double EnsLabel::squeeze_amount() const { return std::atanh(xi_); }

double SchmidtSpectrum::sum_of_squares() const {
  double s = 0.0, comp = 0.0;
  for (double c : coeffs) {
    const double term = c * c - comp;
    const double next = s + term;
    comp = (next - s) - term;
    s = next;
  }
  return s;
}

std::vector<double> SchmidtSpectrum::sorted_magnitudes() const {
  std::vector<double> mags(coeffs.size());
  std::transform(coeffs.begin(), coeffs.end(), mags.begin(),
                 [](double c) { return std::abs(c); });
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags;
}

// --- cutoff policy ---------------------------------------------------------------

Cutoffs default_cutoffs(const EnsLabel& label, double tolerance) {
  const int big = std::max(label.n_a(), label.n_b());
  const int small = std::min(label.n_a(), label.n_b());
  const int diff = big - small;

  const Moments mom = photon_number_moments(EnsLabel(big, small, label.xi()));
  int core = static_cast<int>(std::ceil(mom.mean + 12.0 * std::sqrt(mom.variance))) + small + 10;

  // Extend until both the tail mass and the edge weight are negligible;
  // expectation values of quadratic observables see edge amplitudes, not
  // just the missing mass. The mass sum plateaus at the rounding error of
  // the closed form, so a long run of dead levels also closes the scan.
  const double tail_goal = 0.01 * std::min(tolerance, 1e-12);
  const double edge_goal = 1e-26;
  double cum = 0.0, comp = 0.0;
  int m = 0;
  int quiet = 0;  // consecutive levels below the edge goal
  const int hard_limit = 200000;
  while (m < hard_limit) {
    const double w = squared_weight(big, small, label.xi(), m);
    const double term = w - comp;
    const double next = cum + term;
    comp = (next - cum) - term;
    cum = next;
    quiet = w <= edge_goal ? quiet + 1 : 0;
    if (m + 1 >= core && quiet >= 4 && (1.0 - cum <= tail_goal || quiet >= 8)) break;
    ++m;
  }
  if (m >= hard_limit) {
    throw TruncationError("cutoff policy failed to converge for this label");
  }
  const int d_small = m + 3;
  if (label.n_a() >= label.n_b()) return Cutoffs{d_small + diff, d_small};
  return Cutoffs{d_small, d_small + diff};
}

// --- squeezed vacuum ---------------------------------------------------------------

TwoModeState tmsv(double xi, int cutoff, double tolerance) {
  require_xi(xi);
  if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  const double tail = std::pow(xi, 2.0 * cutoff);  // exact geometric tail mass
  if (tail > tolerance) {
    throw TruncationError("tmsv cutoff " + std::to_string(cutoff) + " leaves tail mass " +
                          std::to_string(tail) + " > tolerance");
  }
  TwoModeState s(cutoff, cutoff, tolerance);
  double amp = 1.0;
  for (int n = 0; n < cutoff; ++n, amp *= xi) s.coeffs()(n, n) = amp;
  s.normalize();
  s.add_truncation_loss(tail);
  return s;
}

// --- collective ladder operators ----------------------------------------------------

namespace {

fock::build::Cropped collective_cropped(Mode which, double xi, bool creator, int cutoff_a,
                                        int cutoff_b) {
  require_xi(xi);
  auto p = fock::build::padded(cutoff_a, cutoff_b, 1);
  const double scale = 1.0 / std::sqrt(1.0 - xi * xi);
  fock::SpMat op;
  if (which == Mode::A) {
    op = creator ? fock::SpMat((p.ad - xi * p.b) * cd(scale, 0))
                 : fock::SpMat((p.a - xi * p.bd) * cd(scale, 0));
  } else {
    op = creator ? fock::SpMat((p.bd - xi * p.a) * cd(scale, 0))
                 : fock::SpMat((p.b - xi * p.ad) * cd(scale, 0));
  }
  return fock::build::crop(op, cutoff_a, cutoff_b, 1);
}

}  // namespace

TwoModeOperator collective_annihilator(Mode which, double xi, int cutoff_a, int cutoff_b) {
  return fock::build::densify(collective_cropped(which, xi, false, cutoff_a, cutoff_b));
}

SparseTwoModeOperator collective_annihilator_sparse(Mode which, double xi, int cutoff_a,
                                                    int cutoff_b) {
  return fock::build::sparsify(collective_cropped(which, xi, false, cutoff_a, cutoff_b));
}

TwoModeOperator collective_creator(Mode which, double xi, int cutoff_a, int cutoff_b) {
  return fock::build::densify(collective_cropped(which, xi, true, cutoff_a, cutoff_b));
}

SparseTwoModeOperator collective_creator_sparse(Mode which, double xi, int cutoff_a,
                                                int cutoff_b) {
  return fock::build::sparsify(collective_cropped(which, xi, true, cutoff_a, cutoff_b));
}

// --- entangled number states -----------------------------------------------------------

namespace {

// The iterated two-term recurrence amplifies rounding noise near the nodes of
// the amplitude profile (observed ~1e3x per excitation at large cutoffs), so
// the ladder chain runs in extended precision and is converted to double at
// the end.
using cld = std::complex<long double>;
using MatLd = Eigen::Matrix<cld, Eigen::Dynamic, Eigen::Dynamic>;

// In-place application of (a^dag - xi b)/sqrt(1-xi^2) or its mode-swapped
// partner directly on the coefficient matrix. Returns the squared norm pushed
// past the cutoffs, which for these band-1 operators is exact.
long double apply_creator_banded(MatLd& c, Mode which, long double xi) {
  const int da = static_cast<int>(c.rows());
  const int db = static_cast<int>(c.cols());
  const long double scale = 1.0L / sqrtl(1.0L - xi * xi);
  MatLd out = MatLd::Zero(da, db);
  long double lost = 0.0L;
  if (which == Mode::A) {
    for (int n = 0; n < da; ++n)
      for (int m = 0; m < db; ++m) {
        cld v = 0.0L;
        if (n >= 1) v += sqrtl(n) * c(n - 1, m);
        if (m + 1 < db) v -= xi * sqrtl(m + 1) * c(n, m + 1);
        out(n, m) = v * scale;
      }
    for (int m = 0; m < db; ++m) lost += da * std::norm(c(da - 1, m)) * scale * scale;
  } else {
    for (int n = 0; n < da; ++n)
      for (int m = 0; m < db; ++m) {
        cld v = 0.0L;
        if (m >= 1) v += sqrtl(m) * c(n, m - 1);
        if (n + 1 < da) v -= xi * sqrtl(n + 1) * c(n + 1, m);
        out(n, m) = v * scale;
      }
    for (int n = 0; n < da; ++n) lost += db * std::norm(c(n, db - 1)) * scale * scale;
  }
  c = std::move(out);
  return lost;
}

}  // namespace

TwoModeState ens_state(const EnsLabel& label, Cutoffs cutoffs, double tolerance) {
  if (cutoffs.a < 1 || cutoffs.b < 1) throw std::invalid_argument("cutoffs must be >= 1");
  const long double xi = label.xi();

  // Work on an enlarged box and crop afterwards. Near the box corner the
  // ladder chain amplifies the seed's diagonal tail by many orders and the
  // truncation breaks the cancellation that normally suppresses it; keeping
  // every cancellation path for the requested box inside the working box
  // confines that artifact to the cropped margin.
  const int margin = label.n_a() + label.n_b() + 2;
  const int work_a = cutoffs.a + margin, work_b = cutoffs.b + margin;
  const int dmin = std::min(work_a, work_b);

  double total_loss = std::pow(label.xi(), 2.0 * dmin);  // squeezed-vacuum seed tail
  MatLd c = MatLd::Zero(work_a, work_b);
  long double amp = 1.0L;
  for (int n = 0; n < dmin; ++n, amp *= xi) c(n, n) = amp;
  c /= sqrtl(c.squaredNorm());

  for (int i = 0; i < label.n_a() + label.n_b(); ++i) {
    const long double lost = apply_creator_banded(c, i < label.n_a() ? Mode::A : Mode::B, xi);
    const long double kept = c.squaredNorm();
    if (kept == 0.0L) {
      throw TruncationError("ens_state(" + std::to_string(label.n_a()) + "," +
                            std::to_string(label.n_b()) + "): cutoffs (" +
                            std::to_string(cutoffs.a) + "," + std::to_string(cutoffs.b) +
                            ") annihilate the state entirely");
    }
    total_loss += static_cast<double>(lost / (kept + lost));
    c /= sqrtl(kept);
  }

  const long double kept_mass = c.topLeftCorner(cutoffs.a, cutoffs.b).squaredNorm();
  total_loss += static_cast<double>(1.0L - kept_mass);

  if (total_loss > tolerance) {
    throw TruncationError("ens_state(" + std::to_string(label.n_a()) + "," +
                          std::to_string(label.n_b()) + "): cutoffs (" +
                          std::to_string(cutoffs.a) + "," + std::to_string(cutoffs.b) +
                          ") leak " + std::to_string(total_loss) + " > tolerance");
  }
  TwoModeState s(Mat(c.topLeftCorner(cutoffs.a, cutoffs.b).cast<cd>()), tolerance);
  s.normalize();
  s.add_truncation_loss(total_loss);
  return s;
}

TwoModeState ens_state(const EnsLabel& label, double tolerance) {
  return ens_state(label, default_cutoffs(label, tolerance), tolerance);
}

// --- closed forms ----------------------------------------------------------------------

double schmidt_coefficient(const EnsLabel& label, int m) {
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const int big = std::max(label.n_a(), label.n_b());
  const int small = std::min(label.n_a(), label.n_b());
  return schmidt_core(big, small, label.xi(), m);
}

SchmidtSpectrum closed_form_schmidt(const EnsLabel& label, int m_max) {
  if (m_max < 0) throw std::invalid_argument("m_max must be >= 0");
  SchmidtSpectrum spec;
  spec.offset = label.n_a() - label.n_b();
  spec.xi = label.xi();
  spec.coeffs.resize(m_max + 1);
  const int big = std::max(label.n_a(), label.n_b());
  const int small = std::min(label.n_a(), label.n_b());
  for (int m = 0; m <= m_max; ++m) spec.coeffs[m] = schmidt_core(big, small, label.xi(), m);

  // Tail must be visibly closed before the normalization audit means anything.
  double edge = 0.0;
  for (int m = std::max(0, m_max - 2); m <= m_max; ++m)
    edge = std::max(edge, spec.coeffs[m] * spec.coeffs[m]);
  if (edge > 1e-14) {
    throw TruncationError("closed_form_schmidt: m_max=" + std::to_string(m_max) +
                          " leaves edge weight " + std::to_string(edge));
  }
  const double total = spec.sum_of_squares();
  if (std::abs(total - 1.0) > 1e-10) {
    throw PrecisionError("closed_form_schmidt: normalization " + std::to_string(total) +
                         " is off by more than 1e-10; the alternating sum lost too many digits");
  }
  return spec;
}

Moments photon_number_moments(const EnsLabel& label) {
  const double x2 = label.xi() * label.xi();
  const double om = 1.0 - x2;
  Moments mom;
  mom.mean = (label.n_b() + x2 * (label.n_a() + 1)) / om;
  mom.variance =
      x2 * (label.n_a() + label.n_b() + 2.0 * label.n_a() * label.n_b() + 1) / (om * om);
  return mom;
}

double negative_binomial_pmf(int n_a, double p, int m) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
  if (n_a < 0 || m < 0) throw std::invalid_argument("n_a and m must be >= 0");
  return std::exp((1.0 + n_a) * std::log1p(-p) + m * std::log(p) +
                  std::lgamma(n_a + m + 1.0) - std::lgamma(n_a + 1.0) - std::lgamma(m + 1.0));
}

// --- parametric amplifier cross-check ------------------------------------------------------

TwoModeOperator two_mode_squeezer(double r, int cutoff_a, int cutoff_b) {
  if (!(r > 0.0)) throw std::invalid_argument("squeeze amount r must be > 0");
  if (cutoff_a < 1 || cutoff_b < 1) throw std::invalid_argument("cutoffs must be >= 1");
  const Eigen::Index flat = static_cast<Eigen::Index>(cutoff_a) * cutoff_b;
  if (flat > fock::kDenseLimit) {
    throw ResourceError("squeezer dimension exceeds the dense policy");
  }

  // The generator r (a^dag b^dag - a b) conserves n_a - n_b: exponentiate each
  // tridiagonal block. exp of the truncated anti-Hermitian generator is
  // exactly unitary on the truncated space.
  Mat u = Mat::Zero(flat, flat);
  for (int d = -(cutoff_b - 1); d <= cutoff_a - 1; ++d) {
    const int n0 = std::max(d, 0);
    const int m0 = std::max(-d, 0);
    const int len = std::min(cutoff_a - n0, cutoff_b - m0);
    if (len < 1) continue;
    Mat h = Mat::Zero(len, len);  // i * generator restricted to the block
    for (int t = 0; t + 1 < len; ++t) {
      const double c = r * std::sqrt(double(n0 + t + 1) * double(m0 + t + 1));
      h(t + 1, t) = cd(0, c);
      h(t, t + 1) = cd(0, -c);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Mat phase = Mat::Zero(len, len);
    for (int t = 0; t < len; ++t) phase(t, t) = std::exp(cd(0, -es.eigenvalues()(t)));
    Mat ub = es.eigenvectors() * phase * es.eigenvectors().adjoint();
    for (int t = 0; t < len; ++t)
      for (int s = 0; s < len; ++s)
        u(fock::flat_index(n0 + t, m0 + t, cutoff_b), fock::flat_index(n0 + s, m0 + s, cutoff_b)) =
            ub(t, s);
  }

  // Vacuum-column audit: the column of |0,0> must reproduce the squeezed
  // vacuum at xi = tanh(r), or the cutoffs are too small for this r.
  const double xi = std::tanh(r);
  const double norm_pre = std::sqrt(1.0 - xi * xi);
  const int dmin = std::min(cutoff_a, cutoff_b);
  fock::Vec reference = fock::Vec::Zero(flat);
  double ampl = norm_pre;
  for (int n = 0; n < dmin; ++n, ampl *= xi)
    reference(fock::flat_index(n, n, cutoff_b)) = ampl;
  const double defect2 =
      (u.col(fock::flat_index(0, 0, cutoff_b)) - reference).squaredNorm();
  if (std::sqrt(defect2) > 1e-6) {
    throw TruncationError("two_mode_squeezer: cutoffs too small for r=" + std::to_string(r) +
                          " (vacuum-column defect " + std::to_string(std::sqrt(defect2)) + ")");
  }
  return TwoModeOperator(std::move(u), cutoff_a, cutoff_b);
}

}  // namespace ens::states
