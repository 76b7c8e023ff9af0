#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lqropt/experiment.hpp"
#include "support/oracles.hpp"

using namespace lqropt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("lqropt_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig golden_config() {
  const Mat one = Mat::Constant(1, 1, 1.0);
  ExperimentConfig cfg{oracles::golden_instance(), one,
                       {Method::GD, Method::NGD, Method::QN}};
  cfg.grad_tol = 1e-11;
  cfg.max_iter = 2000;
  return cfg;
}

constexpr const char* kCsvHeader =
    "iter,cost,cost_rel_err,gain_rel_err,grad_norm,stepsize,spectral_radius";

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("parse_config accepts a full document and applies defaults") {
  const std::string text = R"({
    "A": [[0.5]], "B": [[1]], "Q": [[1]], "R": [[1]], "Sigma": [[1]]
  })";
  const ExperimentConfig cfg = parse_config(text, "inline");
  CHECK(cfg.instance.n() == 1);
  CHECK(cfg.K0.isZero());        // A Schur, zero gain assumed
  CHECK(cfg.methods.size() == 3);
  CHECK(cfg.grad_tol == 1e-10);
  CHECK(cfg.max_iter == 500);
  CHECK(cfg.dare_tol == 1e-13);
  CHECK(cfg.seed == 0);
}

TEST_CASE("parse_config rejects malformed and invalid documents") {
  CHECK_THROWS_WITH_AS(parse_config("{not json", "inline"),
                       doctest::Contains("ParseError"), Error);
  CHECK_THROWS_WITH_AS(parse_config(R"({"A": [[0.5]]})", "inline"),
                       doctest::Contains("missing required field 'B'"), Error);
  // Sigma with a zero eigenvalue
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"A": [[0.5]], "B": [[1]], "Q": [[1]], "R": [[1]],
                       "Sigma": [[0]]})",
                   "inline"),
      doctest::Contains("ValidationError"), Error);
  // B with the wrong row count
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"A": [[0.5]], "B": [[1],[1]], "Q": [[1]], "R": [[1]],
                       "Sigma": [[1]]})",
                   "inline"),
      doctest::Contains("DimensionMismatch"), Error);
  // B with the wrong column count (R no longer matches the input count)
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"A": [[0.5]], "B": [[1, 0]], "Q": [[1]], "R": [[1]],
                       "Sigma": [[1]]})",
                   "inline"),
      doctest::Contains("DimensionMismatch"), Error);
  // ragged matrix rows
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"A": [[0.5, 1],[0.5]], "B": [[1],[1]], "Q": [[1]],
                       "R": [[1]], "Sigma": [[1]]})",
                   "inline"),
      doctest::Contains("inconsistent length"), Error);
  // unknown method name
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"A": [[0.5]], "B": [[1]], "Q": [[1]], "R": [[1]],
                       "Sigma": [[1]], "methods": ["sgd"]})",
                   "inline"),
      doctest::Contains("unknown method"), Error);
  // unstable A without an explicit K0
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"A": [[2]], "B": [[1]], "Q": [[1]], "R": [[1]],
                       "Sigma": [[1]]})",
                   "inline"),
      doctest::Contains("'K0' is required"), Error);
}

TEST_CASE("shipped config files parse and match the built-in scenario") {
  const fs::path cfg_dir = fs::path(LQROPT_SOURCE_DIR) / "configs";
  const ExperimentConfig cfg = load_config(cfg_dir / "paper_sec5.json");
  const ExperimentConfig builtin = paper_sec5_config();
  CHECK((cfg.instance.A - builtin.instance.A).norm() == 0.0);
  CHECK((cfg.instance.B - builtin.instance.B).norm() == 0.0);
  CHECK((cfg.instance.Q - builtin.instance.Q).norm() == 0.0);
  CHECK((cfg.instance.R - builtin.instance.R).norm() == 0.0);
  CHECK((cfg.instance.Sigma - builtin.instance.Sigma).norm() == 0.0);
  CHECK((cfg.K0 - builtin.K0).norm() == 0.0);
  CHECK(cfg.grad_tol == builtin.grad_tol);
  CHECK(cfg.max_iter == builtin.max_iter);
  CHECK(cfg.dare_tol == builtin.dare_tol);

  // the certified variant parses and differs only in Q's scale
  const ExperimentConfig scaled =
      load_config(cfg_dir / "paper_sec5_scaled.json");
  CHECK((scaled.instance.Q - 0.1 * builtin.instance.Q).norm() <= 1e-15);

  CHECK_THROWS_WITH_AS(load_config(cfg_dir / "does_not_exist.json"),
                       doctest::Contains("ParseError"), Error);
}

TEST_CASE("trace CSV serialization round-trips doubles") {
  RunTrace trace;
  trace.kind = Method::QN;
  IterationRecord rec{};
  rec.iter = 0;
  rec.cost = 4.0 / 3.0;
  rec.cost_rel_err = 1.2345678901234567e-17;
  rec.gain_rel_err = 0.1;
  rec.n_norm = 3.0;
  rec.eta = 0.5;
  rec.rho = 0.61803398874989479;
  trace.records.push_back(rec);

  const fs::path dir = fresh_dir("csv");
  write_trace_csv(dir / "qn_trace.csv", trace);
  const std::string text = slurp(dir / "qn_trace.csv");
  CHECK(text.find('\r') == std::string::npos);

  std::istringstream lines(text);
  std::string header, row;
  std::getline(lines, header);
  CHECK(header == kCsvHeader);
  std::getline(lines, row);
  std::vector<double> values;
  std::istringstream cells(row);
  std::string cell;
  while (std::getline(cells, cell, ',')) values.push_back(std::strtod(cell.c_str(), nullptr));
  REQUIRE(values.size() == 7);
  CHECK(values[1] == rec.cost);
  CHECK(values[2] == rec.cost_rel_err);
  CHECK(values[3] == rec.gain_rel_err);
  CHECK(values[6] == rec.rho);
}

TEST_CASE("run_experiment writes traces and a summary, and succeeds") {
  ExperimentConfig cfg = golden_config();
  cfg.output_dir = fresh_dir("golden");
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.exit_code == kExitSuccess);
  CHECK(res.failure.empty());
  REQUIRE(res.star.has_value());

  for (const char* name : {"gd_trace.csv", "ngd_trace.csv", "qn_trace.csv"}) {
    const std::string text = slurp(cfg.output_dir / name);
    CHECK(text.rfind(kCsvHeader, 0) == 0);
  }
  const std::string summary = slurp(cfg.output_dir / "summary.txt");
  CHECK(summary.find("status: ok") != std::string::npos);
  CHECK(summary.find("dare: iterations=") != std::string::npos);
}

TEST_CASE("run_experiment is byte-deterministic") {
  ExperimentConfig cfg = golden_config();
  cfg.output_dir = fresh_dir("det_a");
  run_experiment(cfg);
  ExperimentConfig cfg2 = golden_config();
  cfg2.output_dir = fresh_dir("det_b");
  run_experiment(cfg2);
  for (const char* name :
       {"gd_trace.csv", "ngd_trace.csv", "qn_trace.csv", "summary.txt"}) {
    CHECK(slurp(cfg.output_dir / name) == slurp(cfg2.output_dir / name));
  }
}

TEST_CASE("starting at the optimum yields single-row traces") {
  ExperimentConfig cfg = golden_config();
  cfg.K0 = Mat::Constant(1, 1, oracles::golden_k());
  cfg.output_dir = fresh_dir("atstar");
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.exit_code == kExitSuccess);
  for (const char* name : {"gd_trace.csv", "ngd_trace.csv", "qn_trace.csv"}) {
    const std::string text = slurp(cfg.output_dir / name);
    CHECK(std::count(text.begin(), text.end(), '\n') <= 2);
  }
}

TEST_CASE("non-stabilizing seed exits with the validation code") {
  ExperimentConfig cfg = golden_config();
  cfg.K0 = Mat::Zero(1, 1);  // A = 1 stays marginal
  cfg.output_dir = fresh_dir("badseed");
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.exit_code == kExitValidation);
  CHECK(res.failure.find("NoStabilizingSeed") != std::string::npos);
}

TEST_CASE("the built-in instance reports its certificate failure") {
  ExperimentConfig cfg = paper_sec5_config();
  cfg.output_dir = fresh_dir("sec5");
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.exit_code == kExitConvergence);
  CHECK(res.failure.find("CertificateFailure") != std::string::npos);
  const std::string summary = slurp(cfg.output_dir / "summary.txt");
  CHECK(summary.find("CertificateFailure") != std::string::npos);
}

TEST_CASE("the certified scaled variant runs end to end") {
  const fs::path cfg_dir = fs::path(LQROPT_SOURCE_DIR) / "configs";
  ExperimentConfig cfg = load_config(cfg_dir / "paper_sec5_scaled.json");
  cfg.output_dir = fresh_dir("scaled");
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.exit_code == kExitSuccess);
  REQUIRE(res.traces.size() == 3);
  for (const auto& [kind, trace] : res.traces) {
    CHECK(trace.converged);
  }
}

TEST_CASE("property suite is deterministic and passes") {
  std::ostringstream first, second;
  const int rc1 = emit_property_suite(42, 2, first);
  const int rc2 = emit_property_suite(42, 2, second);
  CHECK(rc1 == kExitSuccess);
  CHECK(rc2 == kExitSuccess);
  CHECK(first.str() == second.str());
  CHECK(first.str().find("certified") != std::string::npos);

  std::ostringstream other;
  emit_property_suite(43, 2, other);
  CHECK(other.str() != first.str());
}

TEST_SUITE_END();
