#pragma once

#include <optional>
#include <vector>

#include "lqropt/dare.hpp"
#include "lqropt/lqr.hpp"

namespace lqropt {

enum class Method { GD, NGD, QN };

const char* method_name(Method m);

/// Update direction; the iteration is K_{j+1} = K_j − eta·matrix.
///   GD:  2·N·Y          (the gradient)
///   NGD: 2·N            (natural gradient)
///   QN:  2·(R+BᵀXB)⁻¹·N (quasi-Newton; with eta = 1/2 this is exactly the
///                        Riccati fixed-point update)
struct Direction {
  Method kind;
  Mat matrix;
};

/// Throws SingularCurvature for QN when λ₁(H) ≤ 1e-12·‖H‖₂. The QN solve is
/// a symmetric positive definite factorization, never an explicit inverse.
Direction direction(const ProblemInstance& P, const ValueBundle& bundle,
                    Method kind);

/// 1/(2·λₙ(R+BᵀXB)). Throws NonPositiveCurvature when λₙ ≤ 0 — the
/// guarantee behind this stepsize is undefined there and the condition is
/// surfaced, not patched.
double stepsize_ngd(const ValueBundle& bundle);

/// Constant 1/2, independent of the problem and the iterate.
constexpr double stepsize_qn() { return 0.5; }

/// The gradient-descent stepsize chain. All quantities are recomputed at
/// every iterate from the current bundle:
///   a     = λₙ(R+BᵀXB)
///   mu1   = ‖Y‖₂·‖BNY‖₂² / λ₁(Sigma)
///   mu2   = ‖Y‖₂·‖BNY‖₂·‖AK‖₂ / λ₁(Sigma)
///   eta0  = (sqrt(mu1+mu2²) − mu2) / (4·mu1)
///   beta0 = 1 / (1 − 4·mu1·eta0² − 4·mu2·eta0)          (always > 0)
///   a1    = a·beta0·‖Y‖₂ + 4‖N‖₂·beta0·‖Y‖₂²
///   a2    = a·4‖N‖₂·beta0·‖Y‖₂²
///   c0    = 0.99·(sqrt(1/a2 + a1²/(4a2²)) − a1/(2a2))
///   eta   = min(eta0, c0)
/// The 0.99 factor realizes the strict inequality c0 is defined by.
struct GdStepConstants {
  double a;
  double mu1;
  double mu2;
  double eta0;
  double beta0;
  double a1;
  double a2;
  double c0;
  double eta;
};

/// Throws DegenerateDirection when ‖BNY‖₂ = 0 while N ≠ 0 (the bound
/// degenerates; run() falls back to a halved trial step there).
GdStepConstants stepsize_gd(const ProblemInstance& P,
                            const ValueBundle& bundle);

/// Decrease certificate phi(eta) = Tr(NᵀN(Y·Y_eta − eta·a·Y·Y_eta·Y)) for
/// the gradient step K_eta = K − eta·2NY, where Y_eta is the correlation
/// matrix of the stepped gain and a = λₙ(R+BᵀXB). Satisfies
/// f(K) − f(K_eta) = 4·eta·phi(eta); the implementation cross-validates
/// that identity to 1e-7·(1+|f(K)|) before returning.
/// Throws LeftStabilityRegion if K_eta is not stabilizing.
double check_phi(const ProblemInstance& P, const ValueBundle& bundle,
                 double eta);

struct IterationRecord {
  long iter;
  Mat K;
  double cost;
  double rho;            // rho(A − BK), strictly < 1 at every record
  double eta;            // stepsize taken FROM this iterate (0 on the last)
  double n_norm;         // ‖N‖_F
  double gain_rel_err;   // ‖K − K*‖_F / ‖K*‖_F
  double cost_rel_err;   // (f(K) − f(K*)) / |f(K*)|
};

/// Per-accepted-step diagnostics kept for GD runs (decrease certificate and
/// the correlation-matrix perturbation bound ‖Y_eta‖₂ ≤ beta0·‖Y‖₂).
struct GdStepDiagnostics {
  long iter;
  double eta0;
  double beta0;
  double phi;
  double y_norm;       // ‖Y‖₂ at this iterate
  double y_next_norm;  // ‖Y_eta‖₂ at the accepted next iterate
  bool degenerate_fallback;
};

struct RateEstimate {
  enum class Model { Linear, Quadratic };
  Model model;
  double parameter;  // max tail ratio e_{j+1}/e_j (linear) or e_{j+1}/e_j²
  double cv;         // coefficient of variation of the tail ratios
  bool stable;       // cv < 0.5
  int points_used;
};

struct StopRule {
  double grad_tol = 1e-10;  // stop when ‖N‖_F ≤ grad_tol·(1+‖X‖_F)
  long max_iter = 500;
};

struct RunTrace {
  Method kind;
  std::vector<IterationRecord> records;
  std::vector<GdStepDiagnostics> gd_steps;  // empty unless kind == GD
  bool converged = false;
  std::optional<RateEstimate> rate;
};

/// Runs one optimizer from a stabilizing gain with the method's certified
/// stepsize, recording every iterate. Every accepted iterate is verified
/// stabilizing; an update that leaves the stabilizing set is a contract
/// violation (the stepsizes forbid it) and aborts with StabilityLost plus
/// diagnostics. NonPositiveCurvature / SingularCurvature propagate.
RunTrace run(const ProblemInstance& P, const Gain& K0, Method kind,
             const DareSolution& star, const StopRule& stop);

/// Fits the tail of the cost-error sequence e_j = cost_rel_err_j against a
/// linear (e_{j+1} ≤ q·e_j) and a quadratic (e_{j+1} ≤ q·e_j²) model and
/// selects whichever ratio sequence is stable (cv < 0.5 on the tail half).
/// Entries at or below the double-precision resolution of f(K) − f(K*)
/// (1e-14 relative) are excluded. Throws InsufficientData when fewer than
/// 4 usable records exist.
RateEstimate estimate_rate(const RunTrace& trace);

}  // namespace lqropt
