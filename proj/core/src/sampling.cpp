#include "lqropt/sampling.hpp"

#include <Eigen/QR>

#include <algorithm>

namespace lqropt {

Mat Rng::matrix(int rows, int cols, double scale) {
  Mat out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      out(i, j) = uniform(-scale, scale);
    }
  }
  return out;
}

Mat Rng::symmetric(int n, double scale) {
  return symmetrize(matrix(n, n, scale));
}

Mat Rng::orthogonal(int n) {
  const Mat G = matrix(n, n, 1.0);
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  return Q;
}

Mat random_schur(Rng& rng, int n, double rho_target) {
  Mat A = rng.matrix(n, n, 1.0);
  double rho = spectral_radius(A);
  while (rho < 1e-8) {  // essentially nilpotent draw; retry
    A = rng.matrix(n, n, 1.0);
    rho = spectral_radius(A);
  }
  return A * (rho_target / rho);
}

ProblemInstance random_instance(Rng& rng, const RandomInstanceOptions& opts) {
  const int n = rng.uniform_int(opts.n_min, opts.n_max);
  const int m = rng.uniform_int(1, n);

  const Mat A = random_schur(rng, n, rng.uniform(0.2, opts.rho_max));
  const Mat B = rng.matrix(n, m, 1.0);

  // Q = V diag(d) Vᵀ with the first eigenvalue forced negative.
  Vec d(n);
  d(0) = rng.uniform(opts.q_neg_min, -0.05);
  for (int i = 1; i < n; ++i) d(i) = rng.uniform(-0.2, 1.5);
  const Mat V = rng.orthogonal(n);
  const Mat Q = symmetrize(V * d.asDiagonal() * V.transpose());

  const Mat R = Mat::Identity(m, m) + rng.symmetric(m, opts.r_perturbation);
  const Mat Sigma = Mat::Identity(n, n);
  return ProblemInstance(A, B, Q, R, Sigma);
}

Gain random_stabilizing_gain(const ProblemInstance& P, const Mat& center,
                             Rng& rng, double radius, double rho_cap,
                             int max_tries) {
  double r = radius;
  int rejections_at_r = 0;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    const Mat K = center + rng.matrix(P.m(), P.n(), r);
    const Gain g = classify_gain(P, K);
    if (g.stabilizing && g.rho <= rho_cap) return g;
    if (++rejections_at_r >= 20) {
      r = std::max(r * 0.5, 1e-6);
      rejections_at_r = 0;
    }
  }
  fail(ErrorCode::SamplingFailure,
       "no stabilizing gain found in " + std::to_string(max_tries) +
           " attempts");
}

}  // namespace lqropt
