#include "ens/entanglement.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "ens/verify.hpp"

using namespace ens;
using entanglement::DensityMatrix;
using fock::cd;
using fock::Mat;
using fock::Mode;
using fock::TwoModeState;
using states::Cutoffs;
using states::EnsLabel;

namespace {

// Independent oracle: entropy of the geometric distribution (1-q) q^m.
double geometric_entropy_bits(double q) {
  return -std::log2(1.0 - q) - q / (1.0 - q) * std::log2(q);
}

}  // namespace

TEST_CASE("reduced density matrices") {
  SUBCASE("product state reduces to a projector") {
    const auto rho = entanglement::reduced_density(TwoModeState::fock(2, 3, 6, 6), Mode::A);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(rho.matrix()(2, 2) - cd(1, 0)) < 1e-14);
  }
  SUBCASE("squeezed vacuum reduces to the geometric distribution") {
    const auto s = states::tmsv(0.7, 60);
    const auto rho = entanglement::reduced_density(s, Mode::B);
    for (int m = 0; m < 20; ++m) {
      CHECK(rho.matrix()(m, m).real() ==
            doctest::Approx(0.51 * std::pow(0.49, m)).epsilon(1e-10));
    }
    // off-diagonal part vanishes
    CHECK((rho.matrix() - rho.matrix().diagonal().asDiagonal().toDenseMatrix())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
  SUBCASE("one-sided excitation reduces to the negative-binomial state") {
    const auto psi = states::ens_state(EnsLabel(1, 0, 0.7));
    const auto rho = entanglement::reduced_density(psi, Mode::B);
    for (int m = 0; m < 15; ++m) {
      CHECK(rho.matrix()(m, m).real() ==
            doctest::Approx(states::negative_binomial_pmf(1, 0.49, m)).epsilon(1e-9));
    }
  }
}

TEST_CASE("schmidt spectrum via SVD") {
  SUBCASE("product state") {
    const auto sv = entanglement::schmidt_spectrum_svd(TwoModeState::fock(1, 2, 5, 5));
    CHECK(sv[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (size_t k = 1; k < sv.size(); ++k) CHECK(sv[k] < 1e-14);
  }
  SUBCASE("squeezed vacuum singular values are the geometric amplitudes") {
    const auto sv = entanglement::schmidt_spectrum_svd(states::tmsv(0.7, 60));
    for (int k = 0; k < 12; ++k) {
      CHECK(sv[k] == doctest::Approx(std::sqrt(0.51) * std::pow(0.7, k)).epsilon(1e-10));
    }
  }
  SUBCASE("matches the closed form after sorting") {
    const EnsLabel label(1, 1, 0.7);
    const auto psi = states::ens_state(label);
    const auto sv = entanglement::schmidt_spectrum_svd(psi);
    const auto closed =
        states::closed_form_schmidt(label, psi.cutoff_b() - 1).sorted_magnitudes();
    for (size_t k = 0; k < 6; ++k) CHECK(std::abs(sv[k] - closed[k]) < 1e-10);
  }
}

TEST_CASE("entanglement entropy") {
  CHECK(entanglement::entanglement_entropy(TwoModeState::fock(2, 1, 5, 5)) ==
        doctest::Approx(0.0));

  CHECK(entanglement::entanglement_entropy(states::tmsv(0.7, 60)) ==
        doctest::Approx(geometric_entropy_bits(0.49)).epsilon(1e-9));
  CHECK(entanglement::entanglement_entropy(states::tmsv(0.7, 60)) ==
        doctest::Approx(1.96022).epsilon(1e-4));

  TwoModeState bell(4, 4);
  bell.coeffs()(0, 0) = 1.0 / std::sqrt(2.0);
  bell.coeffs()(1, 1) = 1.0 / std::sqrt(2.0);
  CHECK(entanglement::entanglement_entropy(bell) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy from the closed form") {
  CHECK(entanglement::entropy_from_closed_form(EnsLabel(0, 0, 0.7)) ==
        doctest::Approx(geometric_entropy_bits(0.49)).epsilon(1e-10));
  CHECK(std::abs(entanglement::entropy_from_closed_form(EnsLabel(2, 1, 0.6)) -
                 entanglement::entropy_from_closed_form(EnsLabel(1, 2, 0.6))) < 1e-9);
  CHECK(entanglement::entropy_from_closed_form(EnsLabel(0, 0, 1e-8)) <= 1e-6);

  // agrees with the state-vector path
  for (double xi : {0.5, 0.7}) {
    const EnsLabel label(2, 2, xi);
    CHECK(std::abs(entanglement::entropy_from_closed_form(label) -
                   entanglement::entanglement_entropy(states::ens_state(label))) < 1e-7);
  }
}

TEST_CASE("two independent spectral paths agree") {
  const auto psi = states::ens_state(EnsLabel(2, 1, 0.7));
  const auto sv = entanglement::schmidt_spectrum_svd(psi);
  auto eigs = entanglement::reduced_density(psi, Mode::B).eigenvalues();
  std::sort(eigs.data(), eigs.data() + eigs.size(), std::greater<>());
  for (int k = 0; k < 10; ++k) CHECK(std::abs(eigs(k) - sv[k] * sv[k]) < 1e-9);
}

TEST_CASE("entropy grows with the squeezing parameter") {
  double previous = -1.0;
  for (double xi = 0.1; xi < 0.95; xi += 0.1) {
    const double e = entanglement::entropy_from_closed_form(EnsLabel(0, 0, xi));
    CHECK(e > previous);
    previous = e;
  }
}

TEST_CASE("entropy is invariant under mode exchange") {
  std::mt19937_64 rng(31);
  const TwoModeState psi = verify::random_state(rng, 7, 5);
  CHECK(std::abs(entanglement::entanglement_entropy(psi) -
                 entanglement::entanglement_entropy(psi.swapped_modes())) < 1e-9);
}

TEST_CASE("completeness of the family on a witness subspace") {
  SUBCASE("single projector against the bare vacuum") {
    const double defect = entanglement::completeness_defect(0.5, 0, Cutoffs{30, 30}, 0);
    CHECK(defect == doctest::Approx(0.25).epsilon(1e-10));
  }
  SUBCASE("defect shrinks as the family grows") {
    const Cutoffs cuts = states::default_cutoffs(EnsLabel(12, 12, 0.5));
    const double small = entanglement::completeness_defect(0.5, 4, cuts);
    const double large = entanglement::completeness_defect(0.5, 12, cuts);
    CHECK(large < small);
    CHECK(large < 0.1);  // slow geometric filling; 2.8e-2 at n_max = 12
  }
  SUBCASE("compressed partial sum has eigenvalues in [0, 1]") {
    const Cutoffs cuts = states::default_cutoffs(EnsLabel(6, 6, 0.5));
    const Mat block = entanglement::completeness_witness_block(0.5, 6, cuts);
    Eigen::SelfAdjointEigenSolver<Mat> es(block, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
    CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-8);
  }
}

TEST_CASE("density matrix validation") {
  Mat bad = Mat::Identity(4, 4);
  bad(0, 1) = cd(0.5, 0);  // not Hermitian
  CHECK_THROWS_AS(DensityMatrix(bad, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix(Mat::Identity(4, 4), 2, 2), std::invalid_argument);  // trace 4
}
