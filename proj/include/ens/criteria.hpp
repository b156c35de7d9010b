#pragma once

#include <optional>
#include <string>

#include "ens/entanglement.hpp"
#include "ens/fock.hpp"

namespace ens::criteria {

using entanglement::DensityMatrix;
using fock::SparseTwoModeOperator;
using fock::TwoModeOperator;
using fock::TwoModeState;

inline constexpr double kBoundaryTolerance = 1e-9;
inline constexpr double kVarianceBound = 4.0;

enum class Verdict { Violated, Satisfied, Inconclusive };

std::string to_string(Verdict v);

struct CriterionOutcome {
  double value = 0.0;
  double bound = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  double margin = 0.0;     // value - bound; negative means below the bound
  bool boundary = false;   // |value - bound| <= kBoundaryTolerance
};

/// Aggregated result of both separability tests plus the explicit partial
/// transpose, with enough provenance to reproduce the run.
struct CriteriaReport {
  double xi = 0.0;                           // criterion parameter, not the state's
  CriterionOutcome duan;                     // bound = 1/xi + xi
  CriterionOutcome variance;                 // bound = 4
  std::optional<double> pt_min_eigenvalue;   // absent past the dense policy
  Verdict pt_verdict = Verdict::Inconclusive;
  int cutoff_a = 0;
  int cutoff_b = 0;
  double truncation_loss = 0.0;
  double tolerance = 0.0;
};

/// Total-noise operator in the zero-mean form w+^2 + w-^2 with
/// w+ = x_A/sqrt(xi) - sqrt(xi) x_B and w- = p_A/sqrt(xi) + sqrt(xi) p_B.
/// Accepts xi in (0,1) for the first oscillator and xi > 1 for the second.
TwoModeOperator omega_operator(double xi, int cutoff_a, int cutoff_b);
SparseTwoModeOperator omega_operator_sparse(double xi, int cutoff_a, int cutoff_b);

/// Sum of the EPR-like variances with means subtracted; equals <omega> of the
/// zero-mean form on states with vanishing first moments. Separable states
/// satisfy value >= 1/xi + xi.
CriterionOutcome duan_test(const TwoModeState& state, double xi);

/// xi^2/(1-xi^2): excitations N_A below this value make every state they span
/// violate the total-noise bound.
double duan_violation_threshold(double xi);

/// <omega^2> - <omega>^2 against the bound 4. With subtract_means the
/// operator is rebuilt around the state's first moments before squaring.
CriterionOutcome variance_criterion(const TwoModeState& state, double xi,
                                    bool subtract_means = false);

/// Transposition of the mode-B indices: rho(n,m;n',m') -> rho(n,m';n',m).
DensityMatrix partial_transpose(const DensityMatrix& rho);

/// Smallest eigenvalue of the partial transpose of |psi><psi|.
double pt_min_eigenvalue(const TwoModeState& state);

struct PtMomentCheck {
  double lhs = 0.0;     // (1-xi^2)^2 Var of the collective number operator under PT
  double rhs = 0.0;     // direct variance of (a^dag - xi b^dag)(a - xi b) plus xi^2
  double defect = 0.0;  // |lhs - rhs|
};

/// Two-path evaluation of the moment identity behind the variance criterion:
/// the partial-transposed second moment of the collective number operator
/// must reproduce a variance computed directly on the state.
PtMomentCheck pt_moment_identity_check(const TwoModeState& state, double xi);

CriteriaReport criteria_report(const TwoModeState& state, double xi);

}  // namespace ens::criteria
