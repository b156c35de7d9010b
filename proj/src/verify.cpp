#include "ens/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>

#include "ens/coherent.hpp"
#include "ens/criteria.hpp"
#include "ens/entanglement.hpp"
#include "ens/states.hpp"

namespace ens::verify {

using fock::cd;
using fock::Mode;
using fock::SparseTwoModeOperator;
using fock::TwoModeState;
using states::Cutoffs;
using states::EnsLabel;

namespace {

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

struct SuiteSpec {
  int grid_n_max;                // oracle/eigenstate/moment grids: N_B <= N_A <= this
  std::vector<double> grid_xis;
  int product_states;            // criterion 4
  int pt_product_states;         // criterion 5
  int pt_moment_states;          // criterion 6
  int entropy_n_max;             // criterion 8 grid
  int fig_n_a;                   // criterion 9 preset
  int fig_nb_max;
  int squeezer_n_max;            // criterion 10
};

SuiteSpec spec_for(Suite suite) {
  if (suite == Suite::Full) {
    return SuiteSpec{6, {0.3, 0.5, 0.7, 0.8}, 50, 20, 50, 10, 120, 4, 3};
  }
  return SuiteSpec{3, {0.5, 0.7}, 12, 8, 12, 6, 30, 2, 2};
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

CheckResult run_guarded(const std::string& id, const std::string& name, bool hard,
                        const std::function<std::pair<bool, std::string>()>& body) {
  CheckResult result;
  result.id = id;
  result.name = name;
  result.hard = hard;
  try {
    auto [pass, detail] = body();
    result.pass = pass;
    result.detail = detail;
  } catch (const std::exception& e) {
    result.pass = false;
    result.detail = std::string("exception: ") + e.what();
  }
  return result;
}

// Collective number operator A^dag A (or B^dag B) as an exact crop.
SparseTwoModeOperator collective_number_sparse(Mode which, double xi, int ca, int cb) {
  auto p = fock::build::padded(ca, cb, 2);
  const double s2 = 1.0 / (1.0 - xi * xi);
  fock::SpMat low = which == Mode::A ? fock::SpMat(p.a - xi * p.bd)
                                     : fock::SpMat(p.b - xi * p.ad);
  fock::SpMat num = fock::SpMat(fock::SpMat(low.adjoint()) * low) * cd(s2, 0);
  return fock::build::sparsify(fock::build::crop(num, ca, cb, 2));
}

int count_sign_changes(const std::vector<double>& coeffs) {
  double peak = 0.0;
  for (double c : coeffs) peak = std::max(peak, std::abs(c));
  const double floor = peak * 1e-12;
  int changes = 0;
  double previous = 0.0;
  for (double c : coeffs) {
    if (std::abs(c) <= floor) continue;
    if (previous != 0.0 && std::signbit(c) != std::signbit(previous)) ++changes;
    previous = c;
  }
  return changes;
}

// --- individual criteria ------------------------------------------------------

std::pair<bool, std::string> check_oracle_equivalence(const SuiteSpec& spec) {
  const auto start = Clock::now();
  double worst = 0.0;
  for (double xi : spec.grid_xis)
    for (int na = 0; na <= spec.grid_n_max; ++na)
      for (int nb = 0; nb <= na; ++nb) {
        const EnsLabel label(na, nb, xi);
        const TwoModeState psi = states::ens_state(label);
        const auto sv = entanglement::schmidt_spectrum_svd(psi);
        const auto closed =
            states::closed_form_schmidt(label, psi.cutoff_b() - 1).sorted_magnitudes();
        const size_t count = std::min(sv.size(), closed.size());
        for (size_t k = 0; k < count; ++k) worst = std::max(worst, std::abs(closed[k] - sv[k]));
      }
  const double elapsed = seconds_since(start);
  const bool pass = worst <= 1e-9 && elapsed < 30.0;
  return {pass, fmt("max |closed-form - singular value| = %.3e (<= 1e-9), 30s budget %s",
                    worst, elapsed < 30.0 ? "kept" : "exceeded")};
}

std::pair<bool, std::string> check_eigenstate_property(const SuiteSpec& spec) {
  double worst_number = 0.0, worst_pair = 0.0;
  for (double xi : spec.grid_xis)
    for (int na = 0; na <= spec.grid_n_max; ++na)
      for (int nb = 0; nb <= na; ++nb) {
        const EnsLabel label(na, nb, xi);
        const TwoModeState psi = states::ens_state(label);
        const int ca = psi.cutoff_a(), cb = psi.cutoff_b();
        worst_number = std::max(
            worst_number,
            fock::eigen_residual(collective_number_sparse(Mode::A, xi, ca, cb), psi, na));
        worst_number = std::max(
            worst_number,
            fock::eigen_residual(collective_number_sparse(Mode::B, xi, ca, cb), psi, nb));

        auto omega_lo = criteria::omega_operator_sparse(xi, ca, cb);
        auto omega_hi = criteria::omega_operator_sparse(1.0 / xi, ca, cb);
        SparseTwoModeOperator pair;
        pair.matrix = omega_lo.matrix + omega_hi.matrix;
        pair.leak = omega_lo.leak + omega_hi.leak;
        pair.cutoff_a = ca;
        pair.cutoff_b = cb;
        const double eig = 2.0 * (1.0 / xi - xi) * (na + nb + 1);
        worst_pair = std::max(worst_pair, fock::eigen_residual(pair, psi, eig));
      }
  const bool pass = worst_number <= 1e-8 && worst_pair <= 1e-7;
  return {pass, fmt("number residual %.3e (<= 1e-8), two-oscillator residual %.3e (<= 1e-7)",
                    worst_number, worst_pair)};
}

std::pair<bool, std::string> check_duan_saturation() {
  double worst_tmsv = 0.0, worst_vacuum = 0.0;
  for (double xi : {0.3, 0.5, 0.7}) {
    const int cutoff = states::default_cutoffs(EnsLabel(0, 0, xi)).b;
    const TwoModeState ground = states::tmsv(xi, cutoff);
    const double value =
        fock::real_expectation(criteria::omega_operator_sparse(xi, cutoff, cutoff), ground);
    worst_tmsv = std::max(worst_tmsv, std::abs(value - (1.0 / xi - xi)));

    const TwoModeState vacuum = TwoModeState::fock(0, 0, 8, 8);
    const double vacuum_value =
        fock::real_expectation(criteria::omega_operator(xi, 8, 8), vacuum);
    worst_vacuum = std::max(worst_vacuum, std::abs(vacuum_value - (1.0 / xi + xi)));
  }
  const bool pass = worst_tmsv <= 1e-8 && worst_vacuum <= 1e-8;
  return {pass, fmt("tmsv deviation from 1/xi - xi: %.3e, vacuum from 1/xi + xi: %.3e (<= 1e-8)",
                    worst_tmsv, worst_vacuum)};
}

std::pair<bool, std::string> check_variance_criterion(const SuiteSpec& spec, std::uint64_t seed) {
  double worst_ens = 0.0;
  for (double xi : spec.grid_xis)
    for (int na = 0; na <= spec.grid_n_max; ++na)
      for (int nb = 0; nb <= na; ++nb) {
        const TwoModeState psi = states::ens_state(EnsLabel(na, nb, xi));
        worst_ens = std::max(worst_ens, criteria::variance_criterion(psi, xi).value);
      }

  const TwoModeState vacuum = TwoModeState::fock(0, 0, 8, 8);
  double worst_vacuum = 0.0;
  for (double xi : {0.3, 0.7}) {
    worst_vacuum =
        std::max(worst_vacuum, std::abs(criteria::variance_criterion(vacuum, xi).value - 4.0));
  }

  std::mt19937_64 rng(seed ^ 0x5eedf00dULL);
  double worst_product = 0.0;  // most negative margin below 4
  for (int k = 0; k < spec.product_states; ++k) {
    const TwoModeState product = random_product_state(rng, 6, 6);
    for (double xi : {0.3, 0.7}) {
      const double value = criteria::variance_criterion(product, xi).value;
      worst_product = std::min(worst_product, value - 4.0);
    }
  }
  const bool pass = worst_ens <= 1e-7 && worst_vacuum <= 1e-8 && worst_product >= -1e-8;
  return {pass,
          fmt("ens max variance %.3e (<= 1e-7), vacuum |v-4| %.3e (<= 1e-8), "
              "product worst margin %.3e (>= -1e-8, %d states)",
              worst_ens, worst_vacuum, worst_product, spec.product_states)};
}

std::pair<bool, std::string> check_npt(const SuiteSpec& spec, std::uint64_t seed) {
  // Cutoff 20 at xi = 0.5 leaks ~7e-11 through the raising step; declare a
  // budget that admits it (the criterion only needs 1e-4 on the eigenvalue).
  const double tmsv_eig = criteria::pt_min_eigenvalue(states::tmsv(0.5, 20));
  const double ens_eig = criteria::pt_min_eigenvalue(
      states::ens_state(EnsLabel(1, 0, 0.5), Cutoffs{20, 20}, 1e-9));

  std::mt19937_64 rng(seed ^ 0x9a57a11eULL);
  double product_min = 0.0;
  for (int k = 0; k < spec.pt_product_states; ++k) {
    product_min =
        std::min(product_min, criteria::pt_min_eigenvalue(random_product_state(rng, 6, 6)));
  }
  const bool pass = tmsv_eig < -1e-4 && ens_eig < -1e-4 && product_min >= -1e-8;
  return {pass, fmt("tmsv PT min %.4f, ens(1,0) PT min %.4f (< -1e-4); product PT min %.3e "
                    "(>= -1e-8, %d states)",
                    tmsv_eig, ens_eig, product_min, spec.pt_product_states)};
}

std::pair<bool, std::string> check_pt_moment_identity(const SuiteSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x7a09e2dULL);
  double worst_defect = 0.0, min_rhs_margin = 0.0;
  for (int k = 0; k < spec.pt_moment_states; ++k) {
    const TwoModeState state = random_state(rng, 8, 8);
    for (double xi : {0.3, 0.7}) {
      const auto check = criteria::pt_moment_identity_check(state, xi);
      worst_defect = std::max(worst_defect, check.defect);
      min_rhs_margin = std::min(min_rhs_margin, check.rhs - xi * xi);
    }
  }
  const bool pass = worst_defect <= 1e-8 && min_rhs_margin >= -1e-8;
  return {pass, fmt("max two-path defect %.3e (<= 1e-8), rhs-xi^2 margin %.3e (%d states)",
                    worst_defect, min_rhs_margin, spec.pt_moment_states)};
}

std::pair<bool, std::string> check_moments(const SuiteSpec& spec) {
  double worst_moment = 0.0, worst_nb = 0.0;
  for (double xi : spec.grid_xis)
    for (int na = 0; na <= spec.grid_n_max; ++na)
      for (int nb = 0; nb <= na; ++nb) {
        const EnsLabel label(na, nb, xi);
        const int m_max = states::default_cutoffs(label).b + 20;
        double total = 0.0, mean = 0.0, second = 0.0;
        for (int m = 0; m <= m_max; ++m) {
          const double c = states::schmidt_coefficient(label, m);
          const double w = c * c;
          total += w;
          mean += m * w;
          second += double(m) * m * w;
        }
        mean /= total;
        const double var = second / total - mean * mean;
        const auto closed = states::photon_number_moments(label);
        worst_moment = std::max(worst_moment, std::abs(mean - closed.mean));
        worst_moment = std::max(worst_moment, std::abs(var - closed.variance));

        if (nb == 0) {
          for (int m = 0; m <= m_max; ++m) {
            const double c = states::schmidt_coefficient(label, m);
            const double pmf = states::negative_binomial_pmf(na, xi * xi, m);
            worst_nb = std::max(worst_nb, std::abs(c * c - pmf));
          }
        }
      }
  const bool pass = worst_moment <= 1e-8 && worst_nb <= 1e-10;
  return {pass, fmt("moment mismatch %.3e (<= 1e-8), NB pmf mismatch %.3e (<= 1e-10)",
                    worst_moment, worst_nb)};
}

std::pair<bool, std::string> check_entropy(const SuiteSpec& spec) {
  // Independent oracle: entropy of the geometric distribution (1-q) q^m.
  const double q = 0.49;
  const double geometric =
      -std::log2(1.0 - q) - q / (1.0 - q) * std::log2(q);
  const double from_state = entanglement::entanglement_entropy(
      states::tmsv(0.7, states::default_cutoffs(EnsLabel(0, 0, 0.7)).b));
  const double from_closed = entanglement::entropy_from_closed_form(EnsLabel(0, 0, 0.7));
  const double literal_dev =
      std::max(std::abs(from_state - 1.96022), std::abs(from_closed - 1.96022));
  const double oracle_dev = std::abs(from_closed - geometric);

  double grid_asym = 0.0;
  for (int i = 0; i <= spec.entropy_n_max; ++i)
    for (int j = 0; j < i; ++j) {
      const double e_ij = entanglement::entropy_from_closed_form(EnsLabel(i, j, 0.7));
      const double e_ji = entanglement::entropy_from_closed_form(EnsLabel(j, i, 0.7));
      grid_asym = std::max(grid_asym, std::abs(e_ij - e_ji));
    }
  // The closed form reduces both orderings to the same series; probe genuine
  // swap symmetry through the SVD path on a corner of the grid.
  double svd_asym = 0.0;
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j < i; ++j) {
      const double e_ij =
          entanglement::entanglement_entropy(states::ens_state(EnsLabel(i, j, 0.7)));
      const double e_ji =
          entanglement::entanglement_entropy(states::ens_state(EnsLabel(j, i, 0.7)));
      svd_asym = std::max(svd_asym, std::abs(e_ij - e_ji));
    }
  const bool pass =
      literal_dev <= 1e-4 && oracle_dev <= 1e-9 && grid_asym <= 1e-9 && svd_asym <= 1e-9;
  return {pass, fmt("tmsv(0.7) entropy dev from 1.96022: %.2e (<= 1e-4), vs geometric oracle "
                    "%.2e; grid asymmetry %.2e, svd-path asymmetry %.2e (<= 1e-9)",
                    literal_dev, oracle_dev, grid_asym, svd_asym)};
}

std::pair<bool, std::string> check_monotonicity_findings(const SuiteSpec& spec) {
  const std::vector<double> xis = {0.5, 0.7};
  const int n = spec.entropy_n_max;
  std::vector<std::vector<std::vector<double>>> grids;
  for (double xi : xis) {
    std::vector<std::vector<double>> grid(n + 1, std::vector<double>(n + 1));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        grid[i][j] = entanglement::entropy_from_closed_form(EnsLabel(i, j, xi));
    grids.push_back(std::move(grid));
  }
  int nb_ok = 0, nb_total = 0, na_ok = 0, na_total = 0, xi_ok = 0, xi_total = 0;
  for (size_t g = 0; g < xis.size(); ++g)
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j < n; ++j) {
        ++nb_total;
        if (grids[g][i][j + 1] > grids[g][i][j]) ++nb_ok;
        ++na_total;
        if (grids[g][j + 1][i] > grids[g][j][i]) ++na_ok;
      }
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      ++xi_total;
      if (grids[1][i][j] > grids[0][i][j]) ++xi_ok;
    }
  return {true, fmt("conjectures on N<=%d, xi in {0.5,0.7}: (i) larger N_B %d/%d, "
                    "(ii) larger N_A %d/%d, (iii) larger xi %d/%d (reported, not asserted)",
                    n, nb_ok, nb_total, na_ok, na_total, xi_ok, xi_total)};
}

std::pair<bool, std::string> check_fig1(const SuiteSpec& spec) {
  const auto start = Clock::now();
  const double xi = 0.7;
  bool nodes_ok = true;
  std::string node_counts;
  double worst_nb = 0.0;
  for (int nb = 0; nb <= spec.fig_nb_max; ++nb) {
    const EnsLabel label(spec.fig_n_a, nb, xi);
    const auto spectrum = states::closed_form_schmidt(label, states::default_cutoffs(label).b);
    const int changes = count_sign_changes(spectrum.coeffs);
    node_counts += fmt("%s%d", nb == 0 ? "" : ",", changes);
    if (changes != nb) nodes_ok = false;
    if (nb == 0) {
      for (size_t m = 0; m < spectrum.coeffs.size(); ++m) {
        const double pmf =
            states::negative_binomial_pmf(spec.fig_n_a, xi * xi, static_cast<int>(m));
        worst_nb = std::max(worst_nb,
                            std::abs(spectrum.coeffs[m] * spectrum.coeffs[m] - pmf));
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = nodes_ok && worst_nb <= 1e-10 && elapsed < 120.0;
  return {pass,
          fmt("N_A=%d sign changes per N_B: [%s] (want 0..%d), NB mismatch %.3e, 120s budget %s",
              spec.fig_n_a, node_counts.c_str(), spec.fig_nb_max, worst_nb,
              elapsed < 120.0 ? "kept" : "exceeded")};
}

std::pair<bool, std::string> check_limits(const SuiteSpec& spec) {
  double worst_fock = 1.0;
  for (const auto& [na, nb] : std::vector<std::pair<int, int>>{{1, 0}, {3, 2}, {2, 2}}) {
    const EnsLabel label(na, nb, 1e-8);
    const TwoModeState psi = states::ens_state(label);
    const double overlap =
        std::abs(psi.coeffs()(na, nb));  // amplitude on the bare product state
    worst_fock = std::min(worst_fock, overlap);
  }

  const double xi = 0.5;
  const int cutoff = 40;
  const auto squeezer = states::two_mode_squeezer(std::atanh(xi), cutoff, cutoff);
  double worst_squeezer = 1.0;
  for (int n = 0; n <= spec.squeezer_n_max; ++n) {
    const TwoModeState input = TwoModeState::fock(n, 0, cutoff, cutoff);
    TwoModeState output = fock::apply(squeezer, input).state;
    output.normalize();
    const TwoModeState reference = states::ens_state(EnsLabel(n, 0, xi), Cutoffs{cutoff, cutoff});
    worst_squeezer = std::min(worst_squeezer, std::abs(output.overlap(reference)));
  }
  const bool pass = worst_fock >= 1.0 - 1e-5 && worst_squeezer >= 1.0 - 1e-8;
  return {pass, fmt("xi->0 bare-product amplitude >= %.9f (want >= 1-1e-5); squeezer overlap "
                    ">= %.10f for n <= %d (want >= 1-1e-8)",
                    worst_fock, worst_squeezer, spec.squeezer_n_max)};
}

}  // namespace

TwoModeState random_product_state(std::mt19937_64& rng, int cutoff_a, int cutoff_b) {
  std::normal_distribution<double> g;
  fock::Vec u(cutoff_a), v(cutoff_b);
  for (int n = 0; n < cutoff_a; ++n) u(n) = cd(g(rng), g(rng));
  for (int m = 0; m < cutoff_b; ++m) v(m) = cd(g(rng), g(rng));
  u /= u.norm();
  v /= v.norm();
  return TwoModeState(fock::Mat(u * v.transpose()));
}

TwoModeState random_state(std::mt19937_64& rng, int cutoff_a, int cutoff_b) {
  std::normal_distribution<double> g;
  fock::Mat c(cutoff_a, cutoff_b);
  for (int n = 0; n < cutoff_a; ++n)
    for (int m = 0; m < cutoff_b; ++m) c(n, m) = cd(g(rng), g(rng));
  TwoModeState state(std::move(c));
  state.normalize();
  return state;
}

std::vector<CheckResult> run_suite(Suite suite, std::uint64_t seed) {
  const SuiteSpec spec = spec_for(suite);
  std::vector<CheckResult> results;
  results.push_back(run_guarded("1", "oracle equivalence (closed form vs SVD)", true,
                                [&] { return check_oracle_equivalence(spec); }));
  results.push_back(run_guarded("2", "eigenstate property", true,
                                [&] { return check_eigenstate_property(spec); }));
  results.push_back(run_guarded("3", "total-noise saturation", true,
                                [&] { return check_duan_saturation(); }));
  results.push_back(run_guarded("4", "variance criterion", true,
                                [&] { return check_variance_criterion(spec, seed); }));
  results.push_back(
      run_guarded("5", "negative partial transpose", true, [&] { return check_npt(spec, seed); }));
  results.push_back(run_guarded("6", "PT-moment identity", true,
                                [&] { return check_pt_moment_identity(spec, seed); }));
  results.push_back(
      run_guarded("7", "closed-form moments and NB law", true, [&] { return check_moments(spec); }));
  results.push_back(run_guarded("8", "entropy values and symmetry", true,
                                [&] { return check_entropy(spec); }));
  results.push_back(run_guarded("8f", "entropy monotonicity conjectures", false,
                                [&] { return check_monotonicity_findings(spec); }));
  results.push_back(
      run_guarded("9", "distribution preset reproduction", true, [&] { return check_fig1(spec); }));
  results.push_back(
      run_guarded("10", "limits and squeezer cross-check", true, [&] { return check_limits(spec); }));
  return results;
}

bool all_hard_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass || !r.hard; });
}

}  // namespace ens::verify
