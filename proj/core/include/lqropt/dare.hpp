#pragma once

#include <cstdint>
#include <vector>

#include "lqropt/lqr.hpp"

namespace lqropt {

/// Certified maximal solution of the discrete algebraic Riccati equation
///
///   X = AᵀXA + Q − AᵀXB(R+BᵀXB)⁻¹BᵀXA
///
/// together with the optimal gain K* = (R+BᵀX*B)⁻¹BᵀX*A. Serves as ground
/// truth for every convergence measurement. A returned value always passes
/// its certificates:
///   residual ≤ 1e-10·(1+‖X*‖_F), rho_star < 1, λ₁(Hstar) > 0,
///   and K* reproduces the closed-form gain within 1e-10.
struct DareSolution {
  Mat Xstar;
  Mat Kstar;
  Mat Hstar;        // R + BᵀX*B
  double residual;  // Frobenius norm of the Riccati defect at X*
  double rho_star;  // rho(A − BK*)
  int iterations;
};

/// Riccati fixed-point iteration from a stabilizing seed gain:
/// X_j solves the closed-loop Lyapunov equation at K_j, then
/// K_{j+1} = (R+BᵀX_jB)⁻¹BᵀX_jA, until ‖X_{j+1}−X_j‖_F ≤ tol·(1+‖X_j‖_F).
///
/// When `value_history` is given it receives the X_j sequence (which is
/// monotonically non-increasing in the semidefinite order).
///
/// Throws: NoStabilizingSeed, SingularCurvature, MaxIterExceeded, and
/// CertificateFailure — the latter is a first-class outcome meaning the
/// instance appears to admit no strict minimizer over the stabilizing set,
/// so no ground truth exists.
DareSolution solve_dare(const ProblemInstance& P, const Gain& K0, double tol,
                        int max_iter, std::vector<Mat>* value_history = nullptr);

/// Result of sampling-based optimality spot checks around K*.
struct OptimalityReport {
  int samples = 0;
  double min_margin = 0.0;  // min over samples of f(K) − f(K*)
  bool passed = true;       // min_margin ≥ −1e-9·(1+|f(K*)|)
};

/// Draws `samples` random stabilizing gains near K* and checks
/// f(K) ≥ f(K*) − 1e-9·(1+|f(K*)|) for each. samples == 0 passes trivially.
/// Throws SamplingFailure if stabilizing gains cannot be found.
OptimalityReport verify_global_optimality(const ProblemInstance& P,
                                          const DareSolution& sol, int samples,
                                          std::uint64_t seed = 20260811);

}  // namespace lqropt
