#include "lqropt/dare.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <sstream>

#include "lqropt/sampling.hpp"

namespace lqropt {

namespace {

// Solve H·Z = Rhs for invertible symmetric H (LDLT handles the indefinite
// case during early iterations; positive definiteness is certified at the
// end, not assumed along the way).
Mat curvature_solve(const Mat& H, const Mat& rhs, int iteration) {
  const SymEig eig = sym_eig(H);
  const double abs_max = eig.values.cwiseAbs().maxCoeff();
  const double abs_min = eig.values.cwiseAbs().minCoeff();
  if (abs_min <= 1e-12 * std::max(1.0, abs_max)) {
    std::ostringstream msg;
    msg << "R+B'XB numerically singular at iteration " << iteration;
    fail(ErrorCode::SingularCurvature, msg.str());
  }
  return Eigen::LDLT<Mat>(H).solve(rhs);
}

Mat value_matrix(const ProblemInstance& P, const Mat& K) {
  const Mat AK = P.A - P.B * K;
  const Mat W = symmetrize(P.Q + K.transpose() * P.R * K);
  return solve_dlyap_transpose(AK, W);
}

}  // namespace

DareSolution solve_dare(const ProblemInstance& P, const Gain& K0, double tol,
                        int max_iter, std::vector<Mat>* value_history) {
  if (!K0.stabilizing) {
    std::ostringstream msg;
    msg << "seed gain has rho(A-BK0) = " << K0.rho;
    fail(ErrorCode::NoStabilizingSeed, msg.str());
  }
  if (tol <= 0.0) {
    fail(ErrorCode::ValidationError, "tol must be positive");
  }
  if (value_history) value_history->clear();

  Mat K = K0.K;
  Mat X = value_matrix(P, K);
  if (value_history) value_history->push_back(X);

  int iterations = 0;
  bool converged = false;
  for (int j = 0; j < max_iter; ++j) {
    const Mat H = symmetrize(P.R + P.B.transpose() * X * P.B);
    const Mat K_next =
        curvature_solve(H, P.B.transpose() * X * P.A, j);

    const Gain g_next = classify_gain(P, K_next);
    if (!g_next.stabilizing) {
      std::ostringstream msg;
      msg << "iterate " << j + 1 << " lost stability (rho = " << g_next.rho
          << "); the instance appears to admit no strict minimizer";
      fail(ErrorCode::CertificateFailure, msg.str());
    }

    const Mat X_next = value_matrix(P, K_next);
    if (value_history) value_history->push_back(X_next);
    ++iterations;

    const double step = (X_next - X).norm();
    K = K_next;
    const double scale = 1.0 + X.norm();
    X = X_next;
    if (step <= tol * scale) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    fail(ErrorCode::MaxIterExceeded,
         "no fixed point within " + std::to_string(max_iter) + " iterations");
  }

  DareSolution sol;
  sol.Xstar = X;
  sol.Hstar = symmetrize(P.R + P.B.transpose() * X * P.B);
  sol.Kstar = curvature_solve(sol.Hstar, P.B.transpose() * X * P.A, iterations);
  sol.rho_star = spectral_radius(P.A - P.B * sol.Kstar);
  sol.iterations = iterations;

  const Mat riccati_defect =
      P.A.transpose() * X * P.A + P.Q -
      P.A.transpose() * X * P.B * sol.Kstar - X;
  sol.residual = riccati_defect.norm();

  // Certificates. Violation is reported, never patched: it is how the
  // artifact says "this instance has no usable ground truth".
  std::ostringstream why;
  const double xscale = 1.0 + X.norm();
  if (sol.residual > 1e-10 * xscale) {
    why << "Riccati residual " << sol.residual << " > 1e-10*(1+|X*|);";
  }
  if (sol.rho_star >= 1.0) {
    why << " rho(A-BK*) = " << sol.rho_star << " >= 1;";
  }
  const double h_min = lambda_min(sol.Hstar);
  if (h_min <= 0.0) {
    why << " lambda_min(R+B'X*B) = " << h_min << " <= 0;";
  }
  const Mat gain_defect =
      sol.Hstar * sol.Kstar - P.B.transpose() * sol.Xstar * P.A;
  if (gain_defect.norm() > 1e-10 * (1.0 + sol.Kstar.norm())) {
    why << " K* does not reproduce (R+B'X*B)^{-1}B'X*A;";
  }
  const std::string text = why.str();
  if (!text.empty()) {
    fail(ErrorCode::CertificateFailure, text);
  }
  return sol;
}

OptimalityReport verify_global_optimality(const ProblemInstance& P,
                                          const DareSolution& sol, int samples,
                                          std::uint64_t seed) {
  OptimalityReport report;
  report.samples = samples;
  report.min_margin = std::numeric_limits<double>::infinity();
  if (samples <= 0) return report;

  const double f_star =
      evaluate(P, classify_gain(P, sol.Kstar)).cost;
  const double slack = 1e-9 * (1.0 + std::abs(f_star));

  Rng rng(seed);
  const double base_radius = 0.25 * (1.0 + sol.Kstar.norm());
  for (int s = 0; s < samples; ++s) {
    // Cycle through perturbation radii so both near and far gains appear.
    const double radius = base_radius * (0.1 + 0.9 * rng.uniform());
    const Gain g = random_stabilizing_gain(P, sol.Kstar, rng, radius);
    const double margin = evaluate(P, g).cost - f_star;
    report.min_margin = std::min(report.min_margin, margin);
  }
  report.passed = report.min_margin >= -slack;
  return report;
}

}  // namespace lqropt
