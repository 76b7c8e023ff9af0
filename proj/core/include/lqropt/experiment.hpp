#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lqropt/policy_optim.hpp"

namespace lqropt {

// Process exit codes shared by the library runner and the CLI.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitInvariant = 4;

struct ExperimentConfig {
  ProblemInstance instance;
  Mat K0;
  std::vector<Method> methods;
  double grad_tol = 1e-10;
  long max_iter = 500;
  double dare_tol = 1e-13;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
};

/// Parses the JSON config format:
///   {"A": [[..]], "B": [[..]], "Q": [[..]], "R": [[..]], "Sigma": [[..]],
///    "K0": [[..]], "methods": ["gd","ngd","qn"],
///    "grad_tol": r, "max_iter": n, "dare_tol": r, "seed": n}
/// A, B, Q, R, Sigma are required. K0 defaults to the zero gain when A is
/// Schur stable (otherwise it must be supplied). methods defaults to all
/// three. Throws ParseError (with location) or ValidationError (naming the
/// offending field).
ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin);

/// parse_config over a file's contents. Throws ParseError if unreadable.
ExperimentConfig load_config(const std::filesystem::path& path);

/// The built-in `paper-sec5` scenario: A = 0.5·I₅, B = I₅, R = I₅, a fixed
/// indefinite 5×5 Q, Sigma = I₅ (spanning set = standard basis), K0 = 0.
ProblemInstance paper_sec5_instance();
ExperimentConfig paper_sec5_config();

struct ExperimentResult {
  int exit_code = kExitSuccess;
  std::string failure;  // named failing check; empty on success
  std::optional<DareSolution> star;
  std::vector<std::pair<Method, RunTrace>> traces;
};

/// Runs the configured methods, writes `<method>_trace.csv` per method and
/// a shared `summary.txt` under output_dir, re-checks the per-iterate
/// invariants (stability, cost/value-matrix monotonicity, the GD decrease
/// certificate and perturbation bound, and the gradient-dominance sandwich),
/// and reports the combined exit status. Output is byte-deterministic for a
/// fixed config and seed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Generates `count` random instances from `seed`, keeps those whose DARE
/// solve certifies, runs the randomized invariant checks on each, and
/// prints a pass/fail table to `out`. Returns kExitSuccess or
/// kExitInvariant.
int emit_property_suite(std::uint64_t seed, int count, std::ostream& out);

/// Serializes a trace in the fixed CSV schema
///   iter,cost,cost_rel_err,gain_rel_err,grad_norm,stepsize,spectral_radius
/// with 17-significant-digit floats and LF line endings.
void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);

}  // namespace lqropt
