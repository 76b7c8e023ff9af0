#pragma once

#include "lqropt/matlin.hpp"

namespace lqropt {

struct DareSolution;

/// One discrete-time LQR problem over gains K (control u = −Kx):
///
///   x_{k+1} = A x_k + B u_k,
///   f(K)    = Tr(X_K Sigma),  AKᵀ X_K AK + Q + KᵀRK = X_K,  AK = A − BK.
///
/// Q and R are only required to be symmetric — they may be indefinite.
/// Sigma aggregates the spanning set of initial conditions and must be
/// symmetric positive definite.
struct ProblemInstance {
  Mat A;
  Mat B;
  Mat Q;
  Mat R;
  Mat Sigma;

  /// Validates dimensions, symmetry of Q/R/Sigma, finiteness, and
  /// positive definiteness of Sigma. Throws DimensionMismatch or
  /// ValidationError.
  ProblemInstance(Mat A_in, Mat B_in, Mat Q_in, Mat R_in, Mat Sigma_in);

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

/// A feedback gain with its cached closed-loop spectral radius.
/// `stabilizing` is the strict test rho < 1.
struct Gain {
  Mat K;
  double rho;
  bool stabilizing;
};

/// Throws DimensionMismatch if K is not m×n.
Gain classify_gain(const ProblemInstance& P, const Mat& K);

/// Everything the optimizers need at one stabilizing gain.
struct ValueBundle {
  Mat K;       // gain this bundle was evaluated at
  Mat AK;      // closed loop A − BK
  Mat X;       // value matrix: AKᵀ X AK + Q + KᵀRK = X
  Mat Y;       // correlation matrix: AK Y AKᵀ + Sigma = Y
  Mat N;       // residual RK − BᵀX AK; vanishes exactly at the optimum
  Mat grad;    // gradient of f: 2·N·Y
  Mat H;       // curvature R + BᵀXB
  double cost; // f(K) = Tr(X·Sigma)
};

/// Throws NotStabilizing; Unstable/IllConditioned propagate from the
/// Lyapunov solves.
ValueBundle evaluate(const ProblemInstance& P, const Gain& g);

/// Truncated series cost sum_{j<horizon} Tr((AKᵀ)ʲ (Q+KᵀRK) AKʲ · Sigma).
/// K need not be stabilizing: the truncation is always finite, which makes
/// this the probe for boundary gains where the cost can stay finite even
/// though rho(AK) ≥ 1 (unit-circle modes unobservable under Q+KᵀRK).
double cost_by_simulation(const ProblemInstance& P, const Gain& g,
                          long horizon);

/// Frobenius norm of the defect in the value-difference identity
///
///   AK̃ᵀ(X−X̃)AK̃ + (K−K̃)ᵀN_K + N_Kᵀ(K−K̃) − (K−K̃)ᵀ(R+BᵀXB)(K−K̃) = X−X̃,
///
/// which should be ≤ 1e-8·(1+‖X‖_F+‖X̃‖_F) for stabilizing pairs.
/// Throws NotStabilizing.
double value_difference_residual(const ProblemInstance& P, const Gain& g,
                                 const Gain& g_tilde);

/// Gradient-dominance constants at a gain K:
///   tau1·‖K−K*‖_F² ≤ f(K) − f(K*) ≤ tau2·‖N_K‖_F²
/// with tau1 = λ₁(Y_K)·λ₁(R+BᵀX*B) and tau2 = λₙ(Y*)/λ₁(R+BᵀX_K B).
struct DominanceBounds {
  double tau1;
  double tau2;
};

/// Throws NotStabilizing, or NonPositiveCurvature when λ₁(H_K) ≤ 0 (the
/// bounds are inapplicable at such K and this is surfaced, never clamped).
DominanceBounds dominance_bounds(const ProblemInstance& P, const Gain& g,
                                 const DareSolution& star);

}  // namespace lqropt
