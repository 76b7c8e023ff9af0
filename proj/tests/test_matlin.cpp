#include <doctest.h>

#include <cmath>

#include "lqropt/matlin.hpp"
#include "lqropt/sampling.hpp"
#include "support/oracles.hpp"

using namespace lqropt;

TEST_SUITE_BEGIN("matlin");

TEST_CASE("sym_eig on identity and diagonal matrices") {
  const SymEig id = sym_eig(Mat::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(id.values(i) == doctest::Approx(1.0));

  Mat d(2, 2);
  d << 2, 0, 0, -1;
  const SymEig de = sym_eig(d);
  CHECK(de.values(0) == doctest::Approx(-1.0));
  CHECK(de.values(1) == doctest::Approx(2.0));
}

TEST_CASE("sym_eig reproduces the built-in instance's Q spectrum") {
  const Mat Q = paper_sec5_instance().Q;
  const SymEig eig = sym_eig(Q);
  const double expected[] = {-1.53, -1.1, 0.96, 2.55, 4.75};
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(eig.values(i) - expected[i]) <= 0.01);
  }
  // reconstruction and orthonormality contracts
  const Mat recon =
      eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
  CHECK((recon - Q).norm() <= 1e-10 * (1.0 + Q.norm()));
  CHECK((eig.vectors.transpose() * eig.vectors - Mat::Identity(5, 5)).norm() <=
        1e-10);
}

TEST_CASE("sym_eig values are invariant under orthogonal similarity") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(2, 8);
    const Mat S = rng.symmetric(n, 1.0);
    const Mat U = rng.orthogonal(n);
    const SymEig a = sym_eig(S);
    const SymEig b = sym_eig(symmetrize(U.transpose() * S * U));
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() <=
          1e-10 * (1.0 + S.norm()));
  }
}

TEST_CASE("sym_eig input checks") {
  CHECK_THROWS_WITH_AS(sym_eig(Mat::Zero(2, 3)), doctest::Contains("NonSquare"),
                       Error);
  Mat asym(2, 2);
  asym << 0, 1, -1, 0;
  CHECK_THROWS_WITH_AS(sym_eig(asym), doctest::Contains("AsymmetricInput"),
                       Error);
}

TEST_CASE("spectral_radius basics") {
  CHECK(spectral_radius(0.5 * Mat::Identity(5, 5)) == doctest::Approx(0.5));

  Mat nilpotent(2, 2);
  nilpotent << 0, 1, 0, 0;
  CHECK(spectral_radius(nilpotent) == doctest::Approx(0.0));

  Mat rotation(2, 2);  // eigenvalues ±i
  rotation << 0, 1, -1, 0;
  CHECK(spectral_radius(rotation) == doctest::Approx(1.0));

  CHECK_THROWS_AS(spectral_radius(Mat::Zero(2, 3)), Error);
}

TEST_CASE("spectral radius below one iff matrix powers vanish") {
  Rng rng(11);
  for (double target : {0.6, 0.9, 1.05}) {
    const Mat A = random_schur(rng, 4, target);
    Mat power = Mat::Identity(4, 4);
    for (int k = 0; k < 500; ++k) power = A * power;
    if (target < 1.0) {
      CHECK(power.norm() < 1e-10);
      CHECK(spectral_radius(A) < 1.0);
    } else {
      CHECK(power.norm() > 1.0);
      CHECK(spectral_radius(A) > 1.0);
    }
  }
}

TEST_CASE("spectral_norm basics") {
  CHECK(spectral_norm(Mat::Identity(4, 4)) == doctest::Approx(1.0));
  Mat d(2, 2);
  d << 3, 0, 0, -5;
  CHECK(spectral_norm(d) == doctest::Approx(5.0));
  Mat column(2, 1);
  column << 3, 4;
  CHECK(spectral_norm(column) == doctest::Approx(5.0));
}

TEST_CASE("frob_norm basics") {
  CHECK(frob_norm(Mat::Zero(3, 3)) == doctest::Approx(0.0));
  CHECK(frob_norm(Mat::Identity(3, 3)) == doctest::Approx(std::sqrt(3.0)));
  Mat m(2, 2);
  m << 1, 2, 2, 1;
  CHECK(frob_norm(m) == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("solve_dlyap_transpose closed forms") {
  // scalar geometric series: x = sum 0.25^j = 4/3
  const Mat a = Mat::Constant(1, 1, 0.5);
  const Mat w = Mat::Constant(1, 1, 1.0);
  CHECK(solve_dlyap_transpose(a, w)(0, 0) == doctest::Approx(4.0 / 3.0));

  // nilpotent loop: A = 0 gives X = W
  Rng rng(3);
  const Mat W = rng.symmetric(4, 1.0);
  CHECK((solve_dlyap_transpose(Mat::Zero(4, 4), W) - W).norm() <= 1e-12);
}

TEST_CASE("solve_dlyap_transpose matches the truncated-series oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = rng.uniform_int(2, 8);
    const Mat A = random_schur(rng, n, rng.uniform(0.1, 0.9));
    const Mat W = rng.symmetric(n, 1.0);
    const Mat X = solve_dlyap_transpose(A, W);
    const Mat X_oracle = oracles::dlyap_transpose_series(A, W);
    CHECK((X - X_oracle).norm() <= 1e-7 * (1.0 + X_oracle.norm()));
    // residual contract
    const double res = (A.transpose() * X * A + W - X).norm();
    CHECK(res <= 1e-9 * (1.0 + X.norm()));
  }
}

TEST_CASE("solve_dlyap_transpose rejects unstable coefficients") {
  CHECK_THROWS_WITH_AS(
      solve_dlyap_transpose(Mat::Identity(2, 2), Mat::Identity(2, 2)),
      doctest::Contains("Unstable"), Error);
  CHECK_THROWS_WITH_AS(
      solve_dlyap_transpose(Mat::Constant(1, 1, 1.0), Mat::Constant(1, 1, 1.0)),
      doctest::Contains("Unstable"), Error);
}

TEST_CASE("solve_dlyap closed forms and positivity") {
  const Mat a = Mat::Constant(1, 1, 0.5);
  const Mat s = Mat::Constant(1, 1, 1.0);
  CHECK(solve_dlyap(a, s)(0, 0) == doctest::Approx(4.0 / 3.0));

  Rng rng(5);
  Mat G = rng.matrix(3, 3, 1.0);
  const Mat S = symmetrize(G * G.transpose()) + 0.1 * Mat::Identity(3, 3);
  CHECK((solve_dlyap(Mat::Zero(3, 3), S) - S).norm() <= 1e-12);

  CHECK((solve_dlyap(0.5 * Mat::Identity(2, 2), Mat::Identity(2, 2)) -
         (4.0 / 3.0) * Mat::Identity(2, 2))
            .norm() <= 1e-12);

  // S ≻ 0 implies Y ≻ 0 (and Y ⪰ S)
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.uniform_int(2, 6);
    const Mat A = random_schur(rng, n, rng.uniform(0.2, 0.9));
    Mat Gs = rng.matrix(n, n, 1.0);
    const Mat Spd = symmetrize(Gs * Gs.transpose()) + 0.05 * Mat::Identity(n, n);
    const Mat Y = solve_dlyap(A, Spd);
    CHECK(lambda_min(Y) > 0.0);
    CHECK(lambda_min(symmetrize(Y - Spd)) >= -1e-10);
  }
}

TEST_SUITE_END();
