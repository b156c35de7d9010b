#include "ens/fock.hpp"

#include <random>

#include "doctest.h"

using namespace ens;
using fock::cd;
using fock::Mat;
using fock::Mode;
using fock::Quad;
using fock::TwoModeOperator;
using fock::TwoModeState;

namespace {

Mat random_hermitian(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cd(g(rng), g(rng));
  return Mat((m + m.adjoint()) / 2);
}

}  // namespace

TEST_CASE("single-mode annihilation matrix") {
  const Mat a2 = fock::annihilation_single(2);
  CHECK(a2(0, 0) == cd(0, 0));
  CHECK(a2(0, 1) == cd(1, 0));
  CHECK(a2(1, 0) == cd(0, 0));
  CHECK(a2(1, 1) == cd(0, 0));

  const Mat a3 = fock::annihilation_single(3);
  CHECK(a3(1, 2).real() == doctest::Approx(1.41421356).epsilon(1e-8));

  // creation is the transpose; a^dag a is diagonal 0,1,2,... below the edge
  const Mat n = a3.adjoint() * a3;
  for (int k = 0; k < 3; ++k) CHECK(n(k, k).real() == doctest::Approx(double(k)).epsilon(1e-15));

  CHECK_THROWS_AS(fock::annihilation_single(0), std::invalid_argument);
}

TEST_CASE("embedding acts on one mode only") {
  const int da = 4, db = 3;
  const Mat a = fock::annihilation_single(da);
  const Mat b = fock::annihilation_single(db);
  const auto a_op = fock::embed(Mode::A, a, da, db);
  const auto bdag_op = fock::embed(Mode::B, Mat(b.adjoint()), da, db);

  // embed(A, a) |1,0> = |0,0>
  const auto applied = fock::apply(a_op, TwoModeState::fock(1, 0, da, db));
  CHECK(std::abs(applied.state.coeffs()(0, 0) - cd(1, 0)) < 1e-15);
  CHECK(applied.truncation_loss == 0.0);

  // independent modes commute everywhere
  const Mat comm = a_op.matrix() * bdag_op.matrix() - bdag_op.matrix() * a_op.matrix();
  CHECK(comm.cwiseAbs().maxCoeff() < 1e-14);

  // [a, a^dag] = 1 away from the truncation edge
  const auto adag_op = fock::embed(Mode::A, Mat(a.adjoint()), da, db);
  const Mat canonical = a_op.matrix() * adag_op.matrix() - adag_op.matrix() * a_op.matrix();
  const Eigen::Index flat = static_cast<Eigen::Index>(da) * db;
  CHECK(fock::interior_max_abs(Mat(canonical - Mat::Identity(flat, flat)), da, db, 1) < 1e-14);

  CHECK_THROWS_AS(fock::embed(Mode::A, b, da, db), std::invalid_argument);
}

TEST_CASE("quadratures") {
  const int d = 8;
  const auto x_a = fock::quadrature(Mode::A, Quad::X, d, d);
  const auto p_a = fock::quadrature(Mode::A, Quad::P, d, d);
  const auto x_b = fock::quadrature(Mode::B, Quad::X, d, d);
  const auto p_b = fock::quadrature(Mode::B, Quad::P, d, d);

  CHECK(x_a.is_hermitian());
  CHECK(p_a.is_hermitian());

  const TwoModeState vacuum = TwoModeState::fock(0, 0, d, d);
  CHECK(fock::variance(x_a, vacuum) == doctest::Approx(0.5).epsilon(1e-12));

  // [x_A, p_A] = i on the interior block
  const Mat comm = x_a.matrix() * p_a.matrix() - p_a.matrix() * x_a.matrix();
  const Eigen::Index flat = static_cast<Eigen::Index>(d) * d;
  CHECK(fock::interior_max_abs(Mat(comm - cd(0, 1) * Mat::Identity(flat, flat)), d, d, 1) <
        1e-13);

  // the EPR pair commutes on the total system
  const Mat epr_x = x_a.matrix() - x_b.matrix();
  const Mat epr_p = p_a.matrix() + p_b.matrix();
  CHECK(fock::interior_max_abs(Mat(epr_x * epr_p - epr_p * epr_x), d, d, 1) < 1e-13);
}

TEST_CASE("expectation values") {
  const int d = 6;
  const auto number_a = fock::number_operator(Mode::A, d, d);
  CHECK(fock::real_expectation(number_a, TwoModeState::fock(2, 0, d, d)) == 2.0);
  CHECK(fock::real_expectation(fock::identity_operator(d, d), TwoModeState::fock(3, 1, d, d)) ==
        doctest::Approx(1.0).epsilon(1e-15));

  const auto wrong = fock::number_operator(Mode::A, d + 1, d);
  CHECK_THROWS_AS(fock::expectation(wrong, TwoModeState::fock(0, 0, d, d)),
                  std::invalid_argument);

  // linearity in the operator argument
  std::mt19937_64 rng(7);
  const Mat h1 = random_hermitian(rng, d * d);
  const Mat h2 = random_hermitian(rng, d * d);
  std::normal_distribution<double> g;
  Mat c(d, d);
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m) c(n, m) = cd(g(rng), g(rng));
  TwoModeState psi(std::move(c));
  psi.normalize();
  const cd lhs = fock::expectation(TwoModeOperator(Mat(2.0 * h1 + 0.5 * h2), d, d), psi);
  const cd rhs = 2.0 * fock::expectation(TwoModeOperator(h1, d, d), psi) +
                 0.5 * fock::expectation(TwoModeOperator(h2, d, d), psi);
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("variance") {
  const int d = 8;
  const auto number_a = fock::number_operator(Mode::A, d, d);
  CHECK(fock::variance(number_a, TwoModeState::fock(3, 0, d, d)) == 0.0);

  // scaled EPR-like position combination on vacuum: (1/xi + xi)/2 at xi = 0.5
  const double xi = 0.5;
  const Mat combo = fock::quadrature(Mode::A, Quad::X, d, d).matrix() / std::sqrt(xi) -
                    std::sqrt(xi) * fock::quadrature(Mode::B, Quad::X, d, d).matrix();
  const TwoModeState vacuum = TwoModeState::fock(0, 0, d, d);
  const double var = fock::variance(TwoModeOperator(combo, d, d), vacuum);
  CHECK(var == doctest::Approx(1.25).epsilon(1e-12));

  // invariant under shifting by a multiple of the identity
  std::mt19937_64 rng(11);
  const Mat h = random_hermitian(rng, d * d);
  const Mat shifted = h + 2.75 * Mat::Identity(d * d, d * d);
  CHECK(std::abs(fock::variance(TwoModeOperator(h, d, d), vacuum) -
                 fock::variance(TwoModeOperator(shifted, d, d), vacuum)) < 1e-10);

  // non-Hermitian operators are rejected
  const auto a_op = fock::ladder(Mode::A, false, d, d);
  CHECK_THROWS_AS(fock::variance(a_op, vacuum), std::invalid_argument);
}

TEST_CASE("apply tracks amplitude pushed past the cutoff") {
  const int da = 5, db = 4;
  const auto adag = fock::ladder(Mode::A, true, da, db);

  const auto up = fock::apply(adag, TwoModeState::fock(0, 0, da, db));
  CHECK(std::abs(up.state.coeffs()(1, 0) - cd(1, 0)) < 1e-15);
  CHECK(up.truncation_loss == 0.0);

  // raising the edge state leaks the whole excitation: |sqrt(D_A)|^2
  const auto edge = fock::apply(adag, TwoModeState::fock(da - 1, 2, da, db));
  CHECK(edge.state.norm() < 1e-15);
  CHECK(edge.truncation_loss == doctest::Approx(double(da)).epsilon(1e-12));
  CHECK(edge.state.truncation_loss() == doctest::Approx(double(da)).epsilon(1e-12));
}

TEST_CASE("state basics") {
  TwoModeState s(3, 3);
  s.coeffs()(0, 0) = cd(3, 0);
  s.coeffs()(2, 1) = cd(0, 4);
  CHECK(s.normalize() == doctest::Approx(5.0));
  CHECK(s.squared_norm() == doctest::Approx(1.0).epsilon(1e-15));

  const auto swapped = s.swapped_modes();
  CHECK(swapped.coeffs()(1, 2) == s.coeffs()(2, 1));

  const auto v = s.flattened();
  const auto back = TwoModeState::from_flattened(v, 3, 3);
  CHECK((back.coeffs() - s.coeffs()).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(TwoModeState(0, 3), std::invalid_argument);
  Mat bad(2, 2);
  bad.setZero();
  bad(0, 0) = cd(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_AS((TwoModeState(bad)), std::invalid_argument);
}

TEST_CASE("dense policy rejects oversized operators") {
  CHECK_THROWS_AS(fock::number_operator(Mode::A, 128, 128), ResourceError);
}
