#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lqropt/experiment.hpp"
#include "lqropt/sampling.hpp"

namespace {

int exit_code_for_cli(const lqropt::Error& e) {
  using lqropt::ErrorCode;
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonSquare:
    case ErrorCode::AsymmetricInput:
    case ErrorCode::NoStabilizingSeed:
      return lqropt::kExitValidation;
    case ErrorCode::MaxIterExceeded:
    case ErrorCode::CertificateFailure:
    case ErrorCode::NonPositiveCurvature:
    case ErrorCode::SingularCurvature:
    case ErrorCode::SamplingFailure:
    case ErrorCode::InsufficientData:
      return lqropt::kExitConvergence;
    default:
      return lqropt::kExitInvariant;
  }
}

int run_from_config(lqropt::ExperimentConfig cfg, const std::string& out_dir) {
  cfg.output_dir = out_dir;
  const lqropt::ExperimentResult res = lqropt::run_experiment(cfg);
  if (res.exit_code == lqropt::kExitSuccess) {
    std::cout << "ok: traces and summary written to " << out_dir << "\n";
  } else {
    std::cerr << "failed: " << res.failure << "\n";
  }
  return res.exit_code;
}

int run_dare(const lqropt::ExperimentConfig& cfg) {
  const lqropt::Gain g0 = lqropt::classify_gain(cfg.instance, cfg.K0);
  const lqropt::DareSolution sol =
      lqropt::solve_dare(cfg.instance, g0, cfg.dare_tol, 500);
  const double f_star = (sol.Xstar * cfg.instance.Sigma).trace();
  std::printf("dare: iterations=%d\n", sol.iterations);
  std::printf("residual=%.17g\n", sol.residual);
  std::printf("rho_star=%.17g\n", sol.rho_star);
  std::printf("lambda_min_H=%.17g\n", lqropt::lambda_min(sol.Hstar));
  std::printf("f_star=%.17g\n", f_star);
  return lqropt::kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy optimization for discrete-time LQR with possibly "
               "indefinite penalties: gradient, natural-gradient, and "
               "quasi-Newton iterations with certified stepsizes, plus a "
               "Riccati fixed-point oracle."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "./out";

  CLI::App* cmd_run =
      app.add_subcommand("run", "Run the optimizers described by a config");
  cmd_run->add_option("config", config_path, "JSON config file")->required();
  cmd_run->add_option("--out", out_dir, "output directory");

  CLI::App* cmd_p5 = app.add_subcommand(
      "paper-sec5", "Run the built-in 5-state indefinite-Q scenario");
  cmd_p5->add_option("--out", out_dir, "output directory");

  std::uint64_t seed = 0;
  int count = 10;
  CLI::App* cmd_prop = app.add_subcommand(
      "prop-suite", "Randomized invariant checks on generated instances");
  cmd_prop->add_option("--seed", seed, "RNG seed")->required();
  cmd_prop->add_option("--count", count, "number of instances")->required();

  CLI::App* cmd_dare = app.add_subcommand(
      "dare", "Solve the Riccati equation for a config and print certificates");
  cmd_dare->add_option("config", config_path, "JSON config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      return run_from_config(lqropt::load_config(config_path), out_dir);
    }
    if (cmd_p5->parsed()) {
      return run_from_config(lqropt::paper_sec5_config(), out_dir);
    }
    if (cmd_prop->parsed()) {
      return lqropt::emit_property_suite(seed, count, std::cout);
    }
    if (cmd_dare->parsed()) {
      return run_dare(lqropt::load_config(config_path));
    }
  } catch (const lqropt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for_cli(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lqropt::kExitInvariant;
  }
  return lqropt::kExitSuccess;
}
