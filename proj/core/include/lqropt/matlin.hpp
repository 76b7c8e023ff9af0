#pragma once

#include <Eigen/Dense>

#include "lqropt/errors.hpp"

namespace lqropt {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Eigendecomposition of a real symmetric matrix, S = V diag(values) Vᵀ.
/// Eigenvalues are sorted ascending and the columns of `vectors` are
/// orthonormal.
struct SymEig {
  Vec values;
  Mat vectors;
};

/// Symmetric eigendecomposition. The input must be square and symmetric
/// within a 1e-12 relative tolerance; it is symmetrized before the solve.
/// Throws: NonSquare, AsymmetricInput.
SymEig sym_eig(const Mat& S);

/// Smallest / largest eigenvalue of a symmetric matrix.
double lambda_min(const Mat& S);
double lambda_max(const Mat& S);

/// Largest absolute value over the (possibly complex) spectrum of a square
/// matrix. Throws: NonSquare.
double spectral_radius(const Mat& M);

/// Largest singular value.
double spectral_norm(const Mat& M);

/// Frobenius norm.
double frob_norm(const Mat& M);

/// Solves AᵀXA + W = X for symmetric X, given Schur-stable A and symmetric
/// W (W may be indefinite, so X need not be positive semidefinite).
/// The solve is by vectorization: (I − Aᵀ⊗Aᵀ)·vec(X) = vec(W) with dense
/// partially pivoted LU, sized for n ≤ 32.
/// Throws: Unstable (ρ(A) ≥ 1 − 1e-9), IllConditioned (residual or symmetry
/// of the computed X out of tolerance), NonSquare, DimensionMismatch,
/// AsymmetricInput.
Mat solve_dlyap_transpose(const Mat& A, const Mat& W);

/// Solves A Y Aᵀ + S = Y for symmetric Y, given Schur-stable A and symmetric
/// positive semidefinite S. The solution satisfies Y ⪰ S; it is positive
/// definite whenever S is. Same error contract as solve_dlyap_transpose.
Mat solve_dlyap(const Mat& A, const Mat& S);

/// True when ‖S − Sᵀ‖_F ≤ rel_tol·(1 + ‖S‖_F).
bool is_symmetric(const Mat& S, double rel_tol = 1e-12);

inline Mat symmetrize(const Mat& S) { return 0.5 * (S + S.transpose()); }

/// Throws ValidationError if M contains NaN or Inf entries.
void require_finite(const Mat& M, const char* name);

}  // namespace lqropt
