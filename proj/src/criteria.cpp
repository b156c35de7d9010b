#include "ens/criteria.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace ens::criteria {

using fock::cd;
using fock::Mat;
using fock::SpMat;
using fock::Vec;

namespace {

void require_omega_xi(double xi) {
  if (!(xi > 0.0) || xi == 1.0 || !std::isfinite(xi)) {
    throw std::invalid_argument("omega parameter must be finite, positive and != 1");
  }
}

// w+ and w- at padded cutoffs.
struct EprPair {
  SpMat plus;
  SpMat minus;
};

EprPair epr_operators(const fock::build::PaddedOps& p, double xi) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  SpMat x_a = SpMat((p.a + p.ad) * cd(inv_sqrt2, 0));
  SpMat x_b = SpMat((p.b + p.bd) * cd(inv_sqrt2, 0));
  SpMat p_a = SpMat((p.a - p.ad) * cd(0, -inv_sqrt2));
  SpMat p_b = SpMat((p.b - p.bd) * cd(0, -inv_sqrt2));
  const double root = std::sqrt(xi);
  EprPair w;
  w.plus = SpMat(x_a * cd(1.0 / root, 0) - x_b * cd(root, 0));
  w.minus = SpMat(p_a * cd(1.0 / root, 0) + p_b * cd(root, 0));
  return w;
}

fock::build::Cropped omega_cropped(double xi, int cutoff_a, int cutoff_b,
                                   double mean_plus = 0.0, double mean_minus = 0.0) {
  require_omega_xi(xi);
  auto p = fock::build::padded(cutoff_a, cutoff_b, 2);
  EprPair w = epr_operators(p, xi);
  SpMat wp = SpMat(w.plus - p.id * cd(mean_plus, 0));
  SpMat wm = SpMat(w.minus - p.id * cd(mean_minus, 0));
  SpMat omega = SpMat(wp * wp) + SpMat(wm * wm);
  return fock::build::crop(omega, cutoff_a, cutoff_b, 2);
}

CriterionOutcome make_outcome(double value, double bound) {
  CriterionOutcome o;
  o.value = value;
  o.bound = bound;
  o.margin = value - bound;
  o.boundary = std::abs(o.margin) <= kBoundaryTolerance;
  o.verdict = (o.margin < -kBoundaryTolerance) ? Verdict::Violated : Verdict::Satisfied;
  return o;
}

bool within_dense_policy(const TwoModeState& state) {
  return static_cast<long>(state.cutoff_a()) * state.cutoff_b() <= fock::kDenseLimit;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Violated: return "violated";
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

TwoModeOperator omega_operator(double xi, int cutoff_a, int cutoff_b) {
  return fock::build::densify(omega_cropped(xi, cutoff_a, cutoff_b));
}

SparseTwoModeOperator omega_operator_sparse(double xi, int cutoff_a, int cutoff_b) {
  return fock::build::sparsify(omega_cropped(xi, cutoff_a, cutoff_b));
}

CriterionOutcome duan_test(const TwoModeState& state, double xi) {
  require_omega_xi(xi);
  const int ca = state.cutoff_a(), cb = state.cutoff_b();
  auto p = fock::build::padded(ca, cb, 1);
  EprPair w = epr_operators(p, xi);
  auto wp = fock::build::sparsify(fock::build::crop(w.plus, ca, cb, 1));
  auto wm = fock::build::sparsify(fock::build::crop(w.minus, ca, cb, 1));
  const double value = fock::variance(wp, state) + fock::variance(wm, state);
  return make_outcome(value, 1.0 / xi + xi);
}

double duan_violation_threshold(double xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in (0, 1)");
  return xi * xi / (1.0 - xi * xi);
}

CriterionOutcome variance_criterion(const TwoModeState& state, double xi, bool subtract_means) {
  require_omega_xi(xi);
  const int ca = state.cutoff_a(), cb = state.cutoff_b();
  double mp = 0.0, mm = 0.0;
  if (subtract_means) {
    auto p = fock::build::padded(ca, cb, 1);
    EprPair w = epr_operators(p, xi);
    mp = fock::real_expectation(fock::build::sparsify(fock::build::crop(w.plus, ca, cb, 1)),
                                state);
    mm = fock::real_expectation(fock::build::sparsify(fock::build::crop(w.minus, ca, cb, 1)),
                                state);
  }
  // Matrix-vector products only; the sparse form works at every cutoff.
  const double value = fock::variance(
      fock::build::sparsify(omega_cropped(xi, ca, cb, mp, mm)), state);
  return make_outcome(value, kVarianceBound);
}

DensityMatrix partial_transpose(const DensityMatrix& rho) {
  const int ca = rho.cutoff_a(), cb = rho.cutoff_b();
  Mat out(rho.matrix().rows(), rho.matrix().cols());
  for (int n = 0; n < ca; ++n)
    for (int m = 0; m < cb; ++m)
      for (int np = 0; np < ca; ++np)
        for (int mp = 0; mp < cb; ++mp)
          out(fock::flat_index(n, m, cb), fock::flat_index(np, mp, cb)) =
              rho.matrix()(fock::flat_index(n, mp, cb), fock::flat_index(np, m, cb));
  return DensityMatrix(std::move(out), ca, cb);
}

double pt_min_eigenvalue(const TwoModeState& state) {
  const DensityMatrix pt = partial_transpose(entanglement::density_from_state(state));
  return pt.eigenvalues().minCoeff();
}

PtMomentCheck pt_moment_identity_check(const TwoModeState& state, double xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in (0, 1)");
  if (!within_dense_policy(state)) {
    throw ResourceError("pt_moment_identity_check requires the dense policy");
  }
  const int ca = state.cutoff_a(), cb = state.cutoff_b();
  auto p = fock::build::padded(ca, cb, 2);
  const double scale = 1.0 / std::sqrt(1.0 - xi * xi);

  SpMat collective = SpMat((p.a - xi * p.bd) * cd(scale, 0));
  SpMat number = SpMat(SpMat(collective.adjoint()) * collective);
  SpMat number_sq = SpMat(number * number);
  const Mat n1 = Mat(fock::build::crop(number, ca, cb, 2).matrix);
  const Mat n2 = Mat(fock::build::crop(number_sq, ca, cb, 2).matrix);

  const Mat sigma = partial_transpose(entanglement::density_from_state(state)).matrix();
  const double first = (sigma * n1).trace().real();
  const double second = (sigma * n2).trace().real();
  const double omx2 = 1.0 - xi * xi;

  PtMomentCheck check;
  check.lhs = omx2 * omx2 * (second - first * first);

  // Direct path: variance of (a^dag - xi b^dag)(a - xi b) on the state itself.
  SpMat g = SpMat(SpMat(p.ad - xi * p.bd) * SpMat(p.a - xi * p.b));
  const double var_g =
      fock::variance(fock::build::densify(fock::build::crop(g, ca, cb, 2)), state);
  check.rhs = var_g + xi * xi;
  check.defect = std::abs(check.lhs - check.rhs);
  return check;
}

CriteriaReport criteria_report(const TwoModeState& state, double xi) {
  CriteriaReport report;
  report.xi = xi;
  report.cutoff_a = state.cutoff_a();
  report.cutoff_b = state.cutoff_b();
  report.truncation_loss = state.truncation_loss();
  report.tolerance = state.truncation_tolerance();
  report.duan = duan_test(state, xi);
  report.variance = variance_criterion(state, xi);
  if (within_dense_policy(state)) {
    const double min_eig = pt_min_eigenvalue(state);
    report.pt_min_eigenvalue = min_eig;
    report.pt_verdict =
        min_eig < -kBoundaryTolerance ? Verdict::Violated : Verdict::Satisfied;
  } else {
    report.pt_verdict = Verdict::Inconclusive;
  }
  return report;
}

}  // namespace ens::criteria
