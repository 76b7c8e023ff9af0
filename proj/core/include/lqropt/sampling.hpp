#pragma once

#include <cstdint>
#include <random>

#include "lqropt/lqr.hpp"

namespace lqropt {

/// Deterministic random source. Built on mt19937_64 with hand-rolled
/// uniform mapping so that a given seed yields the same stream on every
/// platform and standard library (std distributions do not promise that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

  /// rows×cols matrix with entries uniform in [-scale, scale].
  Mat matrix(int rows, int cols, double scale);

  /// Symmetric n×n matrix with entries on the scale of `scale`.
  Mat symmetric(int n, double scale);

  /// Random orthogonal matrix (Q factor of a random square matrix).
  Mat orthogonal(int n);

 private:
  std::mt19937_64 gen_;
};

/// Random square matrix rescaled so that its spectral radius equals
/// rho_target (entries uniform before scaling).
Mat random_schur(Rng& rng, int n, double rho_target);

struct RandomInstanceOptions {
  int n_min = 2;
  int n_max = 6;
  double rho_max = 0.9;      // spectral radius of the generated A
  double q_neg_min = -0.4;   // most negative eigenvalue allowed in Q
  double r_perturbation = 0.1;
};

/// Random problem with Schur A (so the zero gain is a valid seed), random B,
/// symmetric Q with mixed spectrum (at least one negative eigenvalue),
/// R = I + small symmetric perturbation, Sigma = I. Such instances usually,
/// but not always, admit a certified DARE solution; callers filter.
ProblemInstance random_instance(Rng& rng,
                                const RandomInstanceOptions& opts = {});

/// Rejection-samples a stabilizing gain near `center` with closed-loop
/// spectral radius at most rho_cap. The perturbation radius shrinks after
/// repeated rejections. Throws SamplingFailure after max_tries rejections.
Gain random_stabilizing_gain(const ProblemInstance& P, const Mat& center,
                             Rng& rng, double radius = 0.5,
                             double rho_cap = 0.98, int max_tries = 2000);

}  // namespace lqropt
