#include "lqropt/matlin.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <sstream>

namespace lqropt {

namespace {

// Admission margin for the Lyapunov solvers: ρ must stay strictly below
// 1 − kAdmissionMargin or I − Aᵀ⊗Aᵀ is too close to singular for the
// vectorized solve. The raw spectral radius is still reported in messages.
constexpr double kAdmissionMargin = 1e-9;

Mat kron(const Mat& P, const Mat& Q) {
  Mat out(P.rows() * Q.rows(), P.cols() * Q.cols());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      out.block(i * Q.rows(), j * Q.cols(), Q.rows(), Q.cols()) = P(i, j) * Q;
    }
  }
  return out;
}

void require_square(const Mat& M, const char* name) {
  if (M.rows() != M.cols()) {
    std::ostringstream msg;
    msg << name << " is " << M.rows() << "x" << M.cols() << ", expected square";
    fail(ErrorCode::NonSquare, msg.str());
  }
}

std::string dims(const Mat& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

}  // namespace

void require_finite(const Mat& M, const char* name) {
  if (!M.allFinite()) {
    fail(ErrorCode::ValidationError,
         std::string(name) + " contains NaN or Inf entries");
  }
}

bool is_symmetric(const Mat& S, double rel_tol) {
  if (S.rows() != S.cols()) return false;
  return (S - S.transpose()).norm() <= rel_tol * (1.0 + S.norm());
}

SymEig sym_eig(const Mat& S) {
  require_square(S, "S");
  require_finite(S, "S");
  if (!is_symmetric(S)) {
    fail(ErrorCode::AsymmetricInput,
         "symmetry violation beyond 1e-12 relative tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetrize(S));
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::IllConditioned, "symmetric eigensolver did not converge");
  }
  SymEig out{solver.eigenvalues(), solver.eigenvectors()};
  const Eigen::Index n = S.rows();
  const double orth =
      (out.vectors.transpose() * out.vectors - Mat::Identity(n, n)).norm();
  if (orth > 1e-10) {
    fail(ErrorCode::IllConditioned, "eigenvector orthonormality lost");
  }
  return out;
}

double lambda_min(const Mat& S) { return sym_eig(S).values(0); }

double lambda_max(const Mat& S) {
  const SymEig eig = sym_eig(S);
  return eig.values(eig.values.size() - 1);
}

double spectral_radius(const Mat& M) {
  require_square(M, "M");
  require_finite(M, "M");
  Eigen::EigenSolver<Mat> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::IllConditioned, "general eigensolver did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Mat& M) {
  require_finite(M, "M");
  if (M.size() == 0) return 0.0;
  return M.jacobiSvd().singularValues()(0);
}

double frob_norm(const Mat& M) {
  require_finite(M, "M");
  return M.norm();
}

Mat solve_dlyap_transpose(const Mat& A, const Mat& W) {
  require_square(A, "A");
  require_finite(A, "A");
  if (W.rows() != A.rows() || W.cols() != A.cols()) {
    fail(ErrorCode::DimensionMismatch,
         "W is " + dims(W) + ", expected " + dims(A));
  }
  require_finite(W, "W");
  if (!is_symmetric(W, 1e-10)) {
    fail(ErrorCode::AsymmetricInput, "W must be symmetric");
  }

  const double rho = spectral_radius(A);
  if (rho >= 1.0 - kAdmissionMargin) {
    std::ostringstream msg;
    msg << "rho(A) = " << rho << " not admissible (needs rho < 1 - 1e-9)";
    fail(ErrorCode::Unstable, msg.str());
  }

  const Eigen::Index n = A.rows();
  const Mat At = A.transpose();
  Mat system = Mat::Identity(n * n, n * n) - kron(At, At);

  const Mat Ws = symmetrize(W);
  Eigen::Map<const Vec> w(Ws.data(), n * n);
  Vec x = system.partialPivLu().solve(w);
  Mat X = Eigen::Map<const Mat>(x.data(), n, n);

  if (!X.allFinite()) {
    fail(ErrorCode::IllConditioned, "vectorized solve produced non-finite X");
  }
  if ((X - X.transpose()).norm() > 1e-8 * (1.0 + X.norm())) {
    fail(ErrorCode::IllConditioned, "solution asymmetry beyond 1e-8 relative");
  }
  X = symmetrize(X);

  const double residual = (At * X * A + Ws - X).norm();
  if (residual > 1e-9 * (1.0 + X.norm())) {
    std::ostringstream msg;
    msg << "residual " << residual << " exceeds 1e-9*(1+|X|_F)";
    fail(ErrorCode::IllConditioned, msg.str());
  }
  return X;
}

Mat solve_dlyap(const Mat& A, const Mat& S) {
  // A Y Aᵀ + S = Y is the transpose-form equation in Aᵀ.
  return solve_dlyap_transpose(A.transpose(), S);
}

}  // namespace lqropt
