#include "lqropt/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lqropt/sampling.hpp"

namespace lqropt {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Mat parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    fail(ErrorCode::ValidationError,
         "field '" + field + "' must be a non-empty array of row arrays");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) {
    fail(ErrorCode::ValidationError,
         "field '" + field + "' rows must be non-empty arrays");
  }
  const std::size_t cols = j[0].size();
  Mat out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      fail(ErrorCode::ValidationError,
           "field '" + field + "' row " + std::to_string(i) +
               " has inconsistent length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) {
        fail(ErrorCode::ValidationError,
             "field '" + field + "' entry (" + std::to_string(i) + "," +
                 std::to_string(k) + ") is not a number");
      }
      out(i, k) = j[i][k].get<double>();
    }
  }
  return out;
}

Method parse_method(const std::string& name) {
  if (name == "gd") return Method::GD;
  if (name == "ngd") return Method::NGD;
  if (name == "qn") return Method::QN;
  fail(ErrorCode::ValidationError,
       "field 'methods': unknown method '" + name +
           "' (expected gd, ngd, or qn)");
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonSquare:
    case ErrorCode::AsymmetricInput:
    case ErrorCode::NoStabilizingSeed:
      return kExitValidation;
    case ErrorCode::MaxIterExceeded:
    case ErrorCode::CertificateFailure:
    case ErrorCode::NonPositiveCurvature:
    case ErrorCode::SingularCurvature:
    case ErrorCode::SamplingFailure:
    case ErrorCode::InsufficientData:
      return kExitConvergence;
    default:
      return kExitInvariant;
  }
}

const char* model_name(RateEstimate::Model m) {
  return m == RateEstimate::Model::Linear ? "linear" : "quadratic";
}

// Re-derives the per-iterate invariants from a finished trace. Returns a
// named failing check or an empty string.
std::string check_trace_invariants(const ProblemInstance& P,
                                   const DareSolution& star,
                                   const RunTrace& trace) {
  const std::string tag = method_name(trace.kind);
  const double f_star = (star.Xstar * P.Sigma).trace();
  const double y_star_max =
      lambda_max(evaluate(P, classify_gain(P, star.Kstar)).Y);

  Mat X_prev;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const IterationRecord& rec = trace.records[i];
    if (!(rec.rho < 1.0)) {
      return "stability(" + tag + ") at iter " + std::to_string(rec.iter);
    }
    const ValueBundle b = evaluate(P, classify_gain(P, rec.K));

    // Gradient-dominance sandwich at every iterate.
    const double h_min = lambda_min(b.H);
    if (h_min <= 0.0) {
      return "positive_curvature(" + tag + ") at iter " +
             std::to_string(rec.iter);
    }
    const double tau1 = lambda_min(b.Y) * lambda_min(star.Hstar);
    const double tau2 = y_star_max / h_min;
    const double gap = b.cost - f_star;
    const double slack = 1e-8 * (1.0 + std::abs(b.cost) + std::abs(f_star));
    const double dk2 = (rec.K - star.Kstar).squaredNorm();
    const double n2 = b.N.squaredNorm();
    if (tau1 * dk2 > gap + slack || gap > tau2 * n2 + slack) {
      return "dominance_sandwich(" + tag + ") at iter " +
             std::to_string(rec.iter);
    }

    if (i > 0) {
      const double prev_cost = trace.records[i - 1].cost;
      if (rec.cost > prev_cost + 1e-9 * (1.0 + std::abs(prev_cost))) {
        return "cost_monotonicity(" + tag + ") at iter " +
               std::to_string(rec.iter);
      }
      if (trace.kind != Method::GD) {
        // Value matrices decrease in the semidefinite order for NGD/QN.
        const double bump = lambda_max(b.X - X_prev);
        if (bump > 1e-9 * (1.0 + X_prev.norm())) {
          return "value_monotonicity(" + tag + ") at iter " +
                 std::to_string(rec.iter);
        }
      }
    }
    X_prev = b.X;
  }

  for (const GdStepDiagnostics& d : trace.gd_steps) {
    if (!(d.phi >= -1e-10)) {
      return "gd_phi at iter " + std::to_string(d.iter);
    }
    if (!d.degenerate_fallback) {
      if (d.y_next_norm > d.beta0 * d.y_norm * (1.0 + 1e-8)) {
        return "gd_perturbation_bound at iter " + std::to_string(d.iter);
      }
    }
  }
  return "";
}

void write_summary(const std::filesystem::path& path,
                   const ExperimentConfig& cfg, const ExperimentResult& res) {
  std::ofstream os(path, std::ios::binary);
  const ProblemInstance& P = cfg.instance;
  os << "lqropt experiment summary\n";
  os << "instance: n=" << P.n() << " m=" << P.m() << "\n";
  const bool sigma_identity = P.Sigma.isIdentity(0.0);
  os << "sigma: "
     << (sigma_identity ? "identity (spanning set = standard basis)"
                        : "custom positive definite matrix")
     << "\n";
  os << "grad_tol=" << fmt(cfg.grad_tol) << " max_iter=" << cfg.max_iter
     << " dare_tol=" << fmt(cfg.dare_tol) << " seed=" << cfg.seed << "\n";

  if (res.star) {
    const DareSolution& s = *res.star;
    const double f_star = (s.Xstar * P.Sigma).trace();
    const double n_star =
        (P.R * s.Kstar -
         P.B.transpose() * s.Xstar * (P.A - P.B * s.Kstar))
            .norm();
    os << "dare: iterations=" << s.iterations
       << " residual=" << fmt(s.residual)
       << " rho_star=" << fmt(s.rho_star)
       << " lambda_min_H=" << fmt(lambda_min(s.Hstar))
       << " grad_residual_norm=" << fmt(n_star) << "\n";
    os << "f_star=" << fmt(f_star) << "\n";
  } else {
    os << "dare: unavailable\n";
  }

  for (const auto& [kind, trace] : res.traces) {
    os << "method " << method_name(kind) << ":";
    os << " converged=" << (trace.converged ? "yes" : "no");
    os << " iterations=" << (trace.records.empty()
                                 ? 0
                                 : trace.records.back().iter);
    if (!trace.records.empty()) {
      const IterationRecord& last = trace.records.back();
      os << " final_cost=" << fmt(last.cost)
         << " final_gain_rel_err=" << fmt(last.gain_rel_err)
         << " final_cost_rel_err=" << fmt(last.cost_rel_err)
         << " final_grad_norm=" << fmt(last.n_norm);
    }
    if (trace.rate) {
      os << " rate_model=" << model_name(trace.rate->model)
         << " rate_parameter=" << fmt(trace.rate->parameter)
         << " rate_cv=" << fmt(trace.rate->cv)
         << " rate_stable=" << (trace.rate->stable ? "yes" : "no");
    }
    os << "\n";
  }
  os << "status: "
     << (res.exit_code == kExitSuccess ? "ok" : res.failure) << "\n";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text,
                              const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, origin + ": " + e.what());
  }
  if (!j.is_object()) {
    fail(ErrorCode::ParseError, origin + ": top level must be an object");
  }

  for (const char* field : {"A", "B", "Q", "R", "Sigma"}) {
    if (!j.contains(field)) {
      fail(ErrorCode::ValidationError,
           origin + ": missing required field '" + field + "'");
    }
  }
  const Mat A = parse_matrix(j["A"], "A");
  const Mat B = parse_matrix(j["B"], "B");
  const Mat Q = parse_matrix(j["Q"], "Q");
  const Mat R = parse_matrix(j["R"], "R");
  const Mat Sigma = parse_matrix(j["Sigma"], "Sigma");
  ProblemInstance instance(A, B, Q, R, Sigma);

  Mat K0;
  if (j.contains("K0")) {
    K0 = parse_matrix(j["K0"], "K0");
    if (K0.rows() != instance.m() || K0.cols() != instance.n()) {
      fail(ErrorCode::ValidationError,
           "field 'K0' must be " + std::to_string(instance.m()) + "x" +
               std::to_string(instance.n()));
    }
  } else {
    if (spectral_radius(A) >= 1.0) {
      fail(ErrorCode::ValidationError,
           "field 'K0' is required when A is not Schur stable (no automatic "
           "stabilization is attempted)");
    }
    K0 = Mat::Zero(instance.m(), instance.n());
  }

  std::vector<Method> methods;
  if (j.contains("methods")) {
    if (!j["methods"].is_array() || j["methods"].empty()) {
      fail(ErrorCode::ValidationError,
           "field 'methods' must be a non-empty array");
    }
    for (const auto& entry : j["methods"]) {
      if (!entry.is_string()) {
        fail(ErrorCode::ValidationError, "field 'methods' entries are strings");
      }
      methods.push_back(parse_method(entry.get<std::string>()));
    }
  } else {
    methods = {Method::GD, Method::NGD, Method::QN};
  }

  ExperimentConfig cfg{std::move(instance), std::move(K0), std::move(methods)};
  if (j.contains("grad_tol")) cfg.grad_tol = j["grad_tol"].get<double>();
  if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<long>();
  if (j.contains("dare_tol")) cfg.dare_tol = j["dare_tol"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (cfg.grad_tol <= 0.0 || cfg.dare_tol <= 0.0) {
    fail(ErrorCode::ValidationError, "tolerances must be positive");
  }
  if (cfg.max_iter < 1) {
    fail(ErrorCode::ValidationError, "field 'max_iter' must be >= 1");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::ParseError, "cannot open config file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

ProblemInstance paper_sec5_instance() {
  const Mat A = 0.5 * Mat::Identity(5, 5);
  const Mat B = Mat::Identity(5, 5);
  const Mat R = Mat::Identity(5, 5);
  const Mat Sigma = Mat::Identity(5, 5);
  Mat Q(5, 5);
  Q << 1.62370842, 0.36712592, -1.31209102, 1.97803823, -0.49297266,
      0.36712592, 2.21878741, 0.47525552, -1.07142839, 1.04343275,
      -1.31209102, 0.47525552, 1.90887732, -0.83057818, 0.3818043,
      1.97803823, -1.07142839, -0.83057818, 0.93847322, -0.90779531,
      -0.49297266, 1.04343275, 0.3818043, -0.90779531, -1.06295748;
  return ProblemInstance(A, B, Q, R, Sigma);
}

ExperimentConfig paper_sec5_config() {
  ExperimentConfig cfg{paper_sec5_instance(), Mat::Zero(5, 5),
                       {Method::GD, Method::NGD, Method::QN}};
  cfg.grad_tol = 1e-12;
  cfg.max_iter = 100000;
  cfg.dare_tol = 1e-13;
  return cfg;
}

void write_trace_csv(const std::filesystem::path& path,
                     const RunTrace& trace) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    fail(ErrorCode::ValidationError, "cannot open " + path.string());
  }
  os << "iter,cost,cost_rel_err,gain_rel_err,grad_norm,stepsize,"
        "spectral_radius\n";
  for (const IterationRecord& rec : trace.records) {
    os << rec.iter << ',' << fmt(rec.cost) << ',' << fmt(rec.cost_rel_err)
       << ',' << fmt(rec.gain_rel_err) << ',' << fmt(rec.n_norm) << ','
       << fmt(rec.eta) << ',' << fmt(rec.rho) << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  std::filesystem::create_directories(cfg.output_dir);

  const auto finish = [&](int code, const std::string& why) {
    res.exit_code = code;
    res.failure = why;
    write_summary(cfg.output_dir / "summary.txt", cfg, res);
    return res;
  };

  Gain g0 = classify_gain(cfg.instance, cfg.K0);
  if (!g0.stabilizing) {
    return finish(kExitValidation,
                  "NoStabilizingSeed: rho(A-BK0) = " + fmt(g0.rho));
  }

  try {
    res.star = solve_dare(cfg.instance, g0, cfg.dare_tol, 500);
  } catch (const Error& e) {
    return finish(exit_code_for(e.code()), e.what());
  }

  for (Method kind : cfg.methods) {
    RunTrace trace;
    try {
      trace = run(cfg.instance, g0, kind, *res.star,
                  StopRule{cfg.grad_tol, cfg.max_iter});
    } catch (const Error& e) {
      return finish(exit_code_for(e.code()), e.what());
    }
    write_trace_csv(cfg.output_dir /
                        (std::string(method_name(kind)) + "_trace.csv"),
                    trace);
    res.traces.emplace_back(kind, std::move(trace));
  }

  for (const auto& [kind, trace] : res.traces) {
    if (!trace.converged) {
      return finish(kExitConvergence,
                    std::string("ConvergenceFailure(") + method_name(kind) +
                        ")");
    }
    const std::string bad =
        check_trace_invariants(cfg.instance, *res.star, trace);
    if (!bad.empty()) {
      return finish(kExitInvariant, "InvariantViolation: " + bad);
    }
  }
  return finish(kExitSuccess, "");
}

int emit_property_suite(std::uint64_t seed, int count, std::ostream& out) {
  if (count < 1) {
    fail(ErrorCode::ValidationError, "count must be >= 1");
  }
  Rng rng(seed);
  out << "property suite: seed=" << seed << " count=" << count << "\n";
  out << "instance | dims | certificate | fd_grad | monotone | gd_cert | "
         "value_diff | sandwich | y_floor\n";

  int certified = 0;
  bool all_passed = true;
  for (int i = 0; i < count; ++i) {
    const ProblemInstance P = random_instance(rng);
    std::ostringstream row;
    row << i << " | n=" << P.n() << " m=" << P.m() << " | ";

    const Gain g0 = classify_gain(P, Mat::Zero(P.m(), P.n()));
    DareSolution star;
    try {
      star = solve_dare(P, g0, 1e-13, 300);
    } catch (const Error& e) {
      row << "failed (" << to_string(e.code()) << ") | skipped";
      out << row.str() << "\n";
      continue;
    }
    ++certified;
    row << "ok | ";

    bool ok_all = true;
    const auto verdict = [&](bool ok) {
      ok_all = ok_all && ok;
      return ok ? "pass | " : "FAIL | ";
    };

    // Gradient vs central finite differences.
    bool fd_ok = true;
    for (int t = 0; t < 3 && fd_ok; ++t) {
      const Gain g = random_stabilizing_gain(P, star.Kstar, rng, 0.3, 0.9);
      const ValueBundle b = evaluate(P, g);
      for (int d = 0; d < 2 && fd_ok; ++d) {
        Mat D = rng.matrix(P.m(), P.n(), 1.0);
        D /= D.norm();
        const double h = 1e-5;
        const double fp = evaluate(P, classify_gain(P, g.K + h * D)).cost;
        const double fm = evaluate(P, classify_gain(P, g.K - h * D)).cost;
        const double fd = (fp - fm) / (2.0 * h);
        const double ip = (b.grad.array() * D.array()).sum();
        fd_ok = std::abs(fd - ip) <= 1e-5 * (1.0 + std::abs(ip));
      }
    }
    row << verdict(fd_ok);

    // NGD/QN monotonicity and stability.
    bool mono_ok = true;
    for (Method kind : {Method::NGD, Method::QN}) {
      const RunTrace trace = run(P, g0, kind, star, StopRule{1e-9, 300});
      const std::string bad = check_trace_invariants(P, star, trace);
      mono_ok = mono_ok && bad.empty();
    }
    row << verdict(mono_ok);

    // GD decrease certificate, perturbation bound, sandwich along the run.
    bool gd_ok = true;
    {
      const RunTrace trace = run(P, g0, Method::GD, star, StopRule{1e-6, 300});
      const std::string bad = check_trace_invariants(P, star, trace);
      gd_ok = bad.empty();
    }
    row << verdict(gd_ok);

    // Value-difference identity on random stabilizing pairs.
    bool vd_ok = true;
    for (int t = 0; t < 10 && vd_ok; ++t) {
      const Gain ga = random_stabilizing_gain(P, star.Kstar, rng, 0.4, 0.95);
      const Gain gb = random_stabilizing_gain(P, star.Kstar, rng, 0.4, 0.95);
      const double r = value_difference_residual(P, ga, gb);
      const double scale = 1.0 + evaluate(P, ga).X.norm() +
                           evaluate(P, gb).X.norm();
      vd_ok = r <= 1e-8 * scale;
    }
    row << verdict(vd_ok);

    // Gradient-dominance sandwich and Y ⪰ Sigma at sampled gains.
    bool sandwich_ok = true;
    bool y_ok = true;
    const double f_star = (star.Xstar * P.Sigma).trace();
    const double sigma_min = lambda_min(P.Sigma);
    for (int t = 0; t < 10; ++t) {
      const Gain g = random_stabilizing_gain(P, star.Kstar, rng, 0.4, 0.95);
      const ValueBundle b = evaluate(P, g);
      const DominanceBounds tb = dominance_bounds(P, g, star);
      const double gap = b.cost - f_star;
      const double slack = 1e-8 * (1.0 + std::abs(b.cost) + std::abs(f_star));
      sandwich_ok = sandwich_ok &&
                    tb.tau1 * (g.K - star.Kstar).squaredNorm() <= gap + slack &&
                    gap <= tb.tau2 * b.N.squaredNorm() + slack;
      y_ok = y_ok && lambda_min(b.Y) >= sigma_min - 1e-10;
    }
    row << verdict(sandwich_ok);
    row << (y_ok ? "pass" : "FAIL");
    ok_all = ok_all && y_ok;

    out << row.str() << "\n";
    all_passed = all_passed && ok_all;
  }
  out << "certified " << certified << "/" << count << ", "
      << (all_passed ? "all checks passed" : "CHECK FAILURES PRESENT") << "\n";
  return all_passed ? kExitSuccess : kExitInvariant;
}

}  // namespace lqropt
