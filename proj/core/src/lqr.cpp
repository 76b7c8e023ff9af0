#include "lqropt/lqr.hpp"

#include <sstream>

#include "lqropt/dare.hpp"

namespace lqropt {

namespace {

std::string dims(const Mat& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

}  // namespace

ProblemInstance::ProblemInstance(Mat A_in, Mat B_in, Mat Q_in, Mat R_in,
                                 Mat Sigma_in)
    : A(std::move(A_in)),
      B(std::move(B_in)),
      Q(std::move(Q_in)),
      R(std::move(R_in)),
      Sigma(std::move(Sigma_in)) {
  if (A.rows() != A.cols()) {
    fail(ErrorCode::DimensionMismatch, "A is " + dims(A) + ", expected square");
  }
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  if (B.rows() != n) {
    fail(ErrorCode::DimensionMismatch,
         "B is " + dims(B) + ", expected " + std::to_string(n) + " rows");
  }
  if (Q.rows() != n || Q.cols() != n) {
    fail(ErrorCode::DimensionMismatch,
         "Q is " + dims(Q) + ", expected " + std::to_string(n) + "x" +
             std::to_string(n));
  }
  if (R.rows() != m || R.cols() != m) {
    fail(ErrorCode::DimensionMismatch,
         "R is " + dims(R) + ", expected " + std::to_string(m) + "x" +
             std::to_string(m));
  }
  if (Sigma.rows() != n || Sigma.cols() != n) {
    fail(ErrorCode::DimensionMismatch,
         "Sigma is " + dims(Sigma) + ", expected " + std::to_string(n) + "x" +
             std::to_string(n));
  }
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(Q, "Q");
  require_finite(R, "R");
  require_finite(Sigma, "Sigma");
  if (!is_symmetric(Q)) {
    fail(ErrorCode::ValidationError, "Q must be symmetric (1e-12 relative)");
  }
  if (!is_symmetric(R)) {
    fail(ErrorCode::ValidationError, "R must be symmetric (1e-12 relative)");
  }
  if (!is_symmetric(Sigma)) {
    fail(ErrorCode::ValidationError, "Sigma must be symmetric");
  }
  if (lambda_min(Sigma) <= 0.0) {
    fail(ErrorCode::ValidationError, "Sigma must be positive definite");
  }
}

Gain classify_gain(const ProblemInstance& P, const Mat& K) {
  if (K.rows() != P.m() || K.cols() != P.n()) {
    fail(ErrorCode::DimensionMismatch,
         "K is " + dims(K) + ", expected " + std::to_string(P.m()) + "x" +
             std::to_string(P.n()));
  }
  require_finite(K, "K");
  const double rho = spectral_radius(P.A - P.B * K);
  return Gain{K, rho, rho < 1.0};
}

ValueBundle evaluate(const ProblemInstance& P, const Gain& g) {
  if (!g.stabilizing) {
    std::ostringstream msg;
    msg << "rho(A-BK) = " << g.rho << " >= 1";
    fail(ErrorCode::NotStabilizing, msg.str());
  }
  ValueBundle b;
  b.K = g.K;
  b.AK = P.A - P.B * g.K;
  const Mat W = symmetrize(P.Q + g.K.transpose() * P.R * g.K);
  b.X = solve_dlyap_transpose(b.AK, W);
  b.Y = solve_dlyap(b.AK, P.Sigma);
  b.N = P.R * g.K - P.B.transpose() * b.X * b.AK;
  b.grad = 2.0 * b.N * b.Y;
  b.H = symmetrize(P.R + P.B.transpose() * b.X * P.B);
  b.cost = (b.X * P.Sigma).trace();
  return b;
}

double cost_by_simulation(const ProblemInstance& P, const Gain& g,
                          long horizon) {
  if (horizon < 1) {
    fail(ErrorCode::ValidationError, "horizon must be >= 1");
  }
  const Mat AK = P.A - P.B * g.K;
  const Mat W = symmetrize(P.Q + g.K.transpose() * P.R * g.K);
  Mat G = P.Sigma;  // G_j = AKʲ Sigma (AKᵀ)ʲ
  double total = 0.0;
  for (long j = 0; j < horizon; ++j) {
    total += (W * G).trace();
    if (j + 1 < horizon) G = AK * G * AK.transpose();
  }
  return total;
}

double value_difference_residual(const ProblemInstance& P, const Gain& g,
                                 const Gain& g_tilde) {
  const ValueBundle at_k = evaluate(P, g);
  const ValueBundle at_kt = evaluate(P, g_tilde);
  const Mat dK = g.K - g_tilde.K;
  const Mat dX = at_k.X - at_kt.X;
  const Mat lhs = at_kt.AK.transpose() * dX * at_kt.AK +
                  dK.transpose() * at_k.N + at_k.N.transpose() * dK -
                  dK.transpose() * at_k.H * dK;
  return (lhs - dX).norm();
}

DominanceBounds dominance_bounds(const ProblemInstance& P, const Gain& g,
                                 const DareSolution& star) {
  const ValueBundle at_k = evaluate(P, g);
  const double h_min = lambda_min(at_k.H);
  if (h_min <= 0.0) {
    std::ostringstream msg;
    msg << "lambda_min(R+B'XB) = " << h_min << " at this gain";
    fail(ErrorCode::NonPositiveCurvature, msg.str());
  }
  const ValueBundle at_star = evaluate(P, classify_gain(P, star.Kstar));
  DominanceBounds out;
  // The lower bound comes from f(K) − f* = Tr((K−K*)ᵀH*(K−K*)·Y_K), so the
  // curvature factor is evaluated at the optimum; the upper bound's
  // curvature is at K itself.
  out.tau1 = lambda_min(at_k.Y) * lambda_min(star.Hstar);
  out.tau2 = lambda_max(at_star.Y) / h_min;
  return out;
}

}  // namespace lqropt
