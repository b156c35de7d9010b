#include "ens/coherent.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace ens::coherent {

namespace {

// exp of an anti-Hermitian matrix through the Hermitian eigendecomposition of
// i*g; exactly unitary up to roundoff.
Mat expm_antihermitian(const Mat& g) {
  const double defect = (g + g.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-12) {
    throw std::invalid_argument("generator is not anti-Hermitian (defect " +
                                std::to_string(defect) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(cd(0, 1) * g));
  Mat phase = Mat::Zero(g.rows(), g.cols());
  for (Eigen::Index k = 0; k < g.rows(); ++k) phase(k, k) = std::exp(cd(0, -es.eigenvalues()(k)));
  return es.eigenvectors() * phase * es.eigenvectors().adjoint();
}

int poisson_terms(double amp_abs, double tolerance) {
  // Smallest n with the Poisson(|amp|^2) weight and remaining tail negligible.
  const double goal = 0.01 * std::min(tolerance, 1e-12);
  const double lambda = amp_abs * amp_abs;
  double w = std::exp(-lambda);
  double cum = w;
  int n = 0;
  while ((1.0 - cum > goal || n < lambda + 2) && n < 500) {
    ++n;
    w *= lambda / n;
    cum += w;
  }
  return n + 2;
}

}  // namespace

CoherentLabel::CoherentLabel(cd alpha, cd beta, double xi, double cap)
    : alpha_(alpha), beta_(beta), xi_(xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie strictly in (0, 1)");
  if (std::abs(alpha) > cap || std::abs(beta) > cap) {
    throw std::invalid_argument("coherent amplitudes exceed the cap " + std::to_string(cap));
  }
}

TwoModeOperator collective_displacement(Mode which, cd amplitude, double xi, int cutoff_a,
                                        int cutoff_b) {
  return collective_displacement_pair(which == Mode::A ? amplitude : cd(0, 0),
                                      which == Mode::B ? amplitude : cd(0, 0), xi, cutoff_a,
                                      cutoff_b);
}

TwoModeOperator collective_displacement_pair(cd alpha, cd beta, double xi, int cutoff_a,
                                             int cutoff_b) {
  const Eigen::Index flat = static_cast<Eigen::Index>(cutoff_a) * cutoff_b;
  if (flat > fock::kDenseLimit) {
    throw ResourceError("displacement dimension exceeds the dense policy");
  }
  Mat g = Mat::Zero(flat, flat);
  if (alpha != cd(0, 0)) {
    const Mat a = states::collective_annihilator(Mode::A, xi, cutoff_a, cutoff_b).matrix();
    g += alpha * a.adjoint() - std::conj(alpha) * a;
  }
  if (beta != cd(0, 0)) {
    const Mat b = states::collective_annihilator(Mode::B, xi, cutoff_a, cutoff_b).matrix();
    g += beta * b.adjoint() - std::conj(beta) * b;
  }
  return TwoModeOperator(expm_antihermitian(g), cutoff_a, cutoff_b);
}

Mat displacement_single(cd alpha, int dim) {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  Mat a = fock::annihilation_single(dim);
  return expm_antihermitian(alpha * a.adjoint() - std::conj(alpha) * a);
}

LocalAmplitudes local_displacement_decomposition(const CoherentLabel& label) {
  const double root = std::sqrt(1.0 - label.xi() * label.xi());
  return LocalAmplitudes{(label.alpha() + label.xi() * std::conj(label.beta())) / root,
                         (label.beta() + label.xi() * std::conj(label.alpha())) / root};
}

states::Cutoffs default_cutoffs(const CoherentLabel& label, double tolerance) {
  // Squeezed-vacuum occupation with the edge pushed below 1e-20 per level,
  // then the Poisson spread of the local displacements with a 12-sigma margin.
  const double q = label.xi() * label.xi();
  const double goal = std::min(tolerance, 1e-20);
  int base = 4;
  while ((1.0 - q) * std::pow(q, base) > goal && base < 4000) ++base;
  const LocalAmplitudes loc = local_displacement_decomposition(label);
  const auto inflate = [](double a) {
    return static_cast<int>(std::ceil(a * a + 12.0 * a)) + 6;
  };
  return states::Cutoffs{base + inflate(std::abs(loc.alpha_local)),
                         base + inflate(std::abs(loc.beta_local))};
}

int series_terms(const CoherentLabel& label, double tolerance) {
  return std::max(poisson_terms(std::abs(label.alpha()), tolerance),
                  poisson_terms(std::abs(label.beta()), tolerance));
}

TwoModeState coherent_state_series(const CoherentLabel& label, states::Cutoffs cutoffs,
                                   int n_max, double tolerance) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const double xi = label.xi();
  const cd alpha = label.alpha();
  const cd beta = label.beta();
  const double prefactor =
      std::exp(-0.5 * (std::norm(alpha) + std::norm(beta)));

  // Components are built with an unbounded loss budget: high-order terms may
  // spill past cutoffs sized for the final state, but enter with weights that
  // keep their contribution inside the tolerance.
  constexpr double unbounded = std::numeric_limits<double>::infinity();

  Mat out = Mat::Zero(cutoffs.a, cutoffs.b);
  double weighted_loss = 0.0;
  cd weight_a = prefactor;
  for (int n = 0; n <= n_max; ++n) {
    cd weight = weight_a;
    for (int m = 0; m <= n_max; ++m) {
      // Labels past the cutoffs would be annihilated outright; their weights
      // are already below the tail goal, so they count as loss instead.
      if (std::abs(weight) > 1e-18 && n < cutoffs.a && m < cutoffs.b) {
        const TwoModeState component =
            states::ens_state(states::EnsLabel(n, m, xi), cutoffs, unbounded);
        out += weight * component.coeffs();
        weighted_loss += std::norm(weight) * component.truncation_loss();
      } else {
        weighted_loss += std::norm(weight);
      }
      weight *= beta / std::sqrt(double(m + 1));
    }
    weight_a *= alpha / std::sqrt(double(n + 1));
  }

  TwoModeState state(std::move(out), tolerance);
  const double norm = state.normalize();
  // Mass missing from the series (closed tails make this ~0) counts as loss.
  weighted_loss += std::max(0.0, 1.0 - norm * norm);
  state.add_truncation_loss(weighted_loss);
  return state;
}

TwoModeState coherent_state_series(const CoherentLabel& label, double tolerance) {
  return coherent_state_series(label, default_cutoffs(label, tolerance),
                               series_terms(label, tolerance), tolerance);
}

TwoModeState displaced_tmsv_local(const CoherentLabel& label, states::Cutoffs cutoffs,
                                  double tolerance) {
  const TwoModeState seed =
      states::ens_state(states::EnsLabel(0, 0, label.xi()), cutoffs, tolerance);
  const LocalAmplitudes loc = local_displacement_decomposition(label);
  const Mat da = displacement_single(loc.alpha_local, cutoffs.a);
  const Mat db = displacement_single(loc.beta_local, cutoffs.b);
  TwoModeState state(Mat(da * seed.coeffs() * db.transpose()), tolerance);
  state.add_truncation_loss(seed.truncation_loss());
  state.normalize();
  return state;
}

}  // namespace ens::coherent
