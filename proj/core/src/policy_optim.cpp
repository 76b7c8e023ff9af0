#include "lqropt/policy_optim.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lqropt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Relative cost errors below this are dominated by rounding in
// f(K) − f(K*) (two O(1) numbers differenced in double precision) and
// carry no rate information.
constexpr double kRateFloor = 1e-14;

std::string format_gain(const Mat& K) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    os << (i == 0 ? "[" : "; ");
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      if (j) os << ", ";
      os << K(i, j);
    }
  }
  os << "]";
  return os.str();
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::GD:
      return "gd";
    case Method::NGD:
      return "ngd";
    case Method::QN:
      return "qn";
  }
  return "?";
}

Direction direction(const ProblemInstance& P, const ValueBundle& bundle,
                    Method kind) {
  (void)P;
  switch (kind) {
    case Method::GD:
      return {kind, 2.0 * bundle.N * bundle.Y};
    case Method::NGD:
      return {kind, 2.0 * bundle.N};
    case Method::QN: {
      const double h_min = lambda_min(bundle.H);
      if (h_min <= 1e-12 * spectral_norm(bundle.H)) {
        std::ostringstream msg;
        msg << "lambda_min(R+B'XB) = " << h_min
            << " too small for the quasi-Newton solve";
        fail(ErrorCode::SingularCurvature, msg.str());
      }
      Eigen::LLT<Mat> llt(bundle.H);
      if (llt.info() != Eigen::Success) {
        fail(ErrorCode::SingularCurvature, "Cholesky of R+B'XB failed");
      }
      return {kind, llt.solve(2.0 * bundle.N)};
    }
  }
  fail(ErrorCode::ValidationError, "unknown method");
}

double stepsize_ngd(const ValueBundle& bundle) {
  const double h_max = lambda_max(bundle.H);
  if (h_max <= 0.0) {
    std::ostringstream msg;
    msg << "lambda_max(R+B'XB) = " << h_max << "; stepsize undefined";
    fail(ErrorCode::NonPositiveCurvature, msg.str());
  }
  return 1.0 / (2.0 * h_max);
}

GdStepConstants stepsize_gd(const ProblemInstance& P,
                            const ValueBundle& bundle) {
  GdStepConstants c{};
  c.a = lambda_max(bundle.H);
  const double y_norm = spectral_norm(bundle.Y);
  const double n_norm = spectral_norm(bundle.N);
  const double bny_norm = spectral_norm(P.B * bundle.N * bundle.Y);
  const double ak_norm = spectral_norm(bundle.AK);
  const double sigma_min = lambda_min(P.Sigma);

  if (bny_norm == 0.0) {
    if (n_norm == 0.0) {
      fail(ErrorCode::ValidationError,
           "stepsize requested at a stationary point (N = 0)");
    }
    fail(ErrorCode::DegenerateDirection,
         "|B N Y| = 0 with N != 0; the perturbation bound is vacuous");
  }
  if (c.a <= 0.0) {
    fail(ErrorCode::NonPositiveCurvature,
         "lambda_max(R+B'XB) <= 0; decrease constants undefined");
  }

  c.mu1 = y_norm * bny_norm * bny_norm / sigma_min;
  c.mu2 = y_norm * bny_norm * ak_norm / sigma_min;
  c.eta0 = (std::sqrt(c.mu1 + c.mu2 * c.mu2) - c.mu2) / (4.0 * c.mu1);
  c.beta0 = 1.0 / (1.0 - 4.0 * c.mu1 * c.eta0 * c.eta0 - 4.0 * c.mu2 * c.eta0);
  if (!(c.beta0 > 0.0) || !std::isfinite(c.beta0)) {
    fail(ErrorCode::IllConditioned, "beta0 not positive");
  }
  c.a1 = c.a * c.beta0 * y_norm + 4.0 * n_norm * c.beta0 * y_norm * y_norm;
  c.a2 = c.a * 4.0 * n_norm * c.beta0 * y_norm * y_norm;

  constexpr double kStrictness = 0.99;  // c0 is defined by a strict bound
  c.c0 = kStrictness * (std::sqrt(1.0 / c.a2 + c.a1 * c.a1 / (4.0 * c.a2 * c.a2)) -
                        c.a1 / (2.0 * c.a2));
  c.eta = std::min(c.eta0, c.c0);
  return c;
}

double check_phi(const ProblemInstance& P, const ValueBundle& bundle,
                 double eta) {
  const Mat K_eta = bundle.K - eta * 2.0 * bundle.N * bundle.Y;
  const Gain g_eta = classify_gain(P, K_eta);
  if (!g_eta.stabilizing) {
    std::ostringstream msg;
    msg << "K_eta has rho = " << g_eta.rho << " at eta = " << eta;
    fail(ErrorCode::LeftStabilityRegion, msg.str());
  }
  const Mat Y_eta = solve_dlyap(P.A - P.B * K_eta, P.Sigma);
  const double a = lambda_max(bundle.H);
  const Mat NtN = bundle.N.transpose() * bundle.N;
  const Mat YYeY = bundle.Y * Y_eta * bundle.Y;
  const double phi =
      ((NtN * bundle.Y * Y_eta).trace() - eta * a * (NtN * YYeY).trace());

  // Cross-validate against the exact cost difference
  //   f(K) − f(K_eta) = 4η·Tr(NᵀN·Y·Y_eta) − 4η²·Tr(NᵀHN·Y·Y_eta·Y),
  // of which phi is the certified lower bound (NᵀHN ⪯ λₙ(H)·NᵀN).
  const Mat NtHN = bundle.N.transpose() * bundle.H * bundle.N;
  const double exact = 4.0 * eta * (NtN * bundle.Y * Y_eta).trace() -
                       4.0 * eta * eta * (NtHN * YYeY).trace();
  const double f_eta = evaluate(P, g_eta).cost;
  const double tol = 1e-7 * (1.0 + std::abs(bundle.cost));
  const double identity_defect = std::abs(bundle.cost - f_eta - exact);
  if (identity_defect > tol) {
    std::ostringstream msg;
    msg << "cost-difference identity defect " << identity_defect
        << " at eta = " << eta;
    fail(ErrorCode::IllConditioned, msg.str());
  }
  if (bundle.cost - f_eta < 4.0 * eta * phi - tol) {
    std::ostringstream msg;
    msg << "decrease fell short of the phi certificate at eta = " << eta;
    fail(ErrorCode::IllConditioned, msg.str());
  }
  return phi;
}

namespace {

struct GdStep {
  double eta;
  GdStepDiagnostics diag;
};

GdStep gd_step(const ProblemInstance& P, const ValueBundle& bundle, long iter) {
  GdStep out;
  out.diag = GdStepDiagnostics{iter, kNaN, kNaN, kNaN,
                               spectral_norm(bundle.Y), kNaN, false};
  try {
    const GdStepConstants c = stepsize_gd(P, bundle);
    if (c.eta < 1e-12) {
      fail(ErrorCode::IllConditioned, "GD stepsize collapsed below 1e-12");
    }
    out.eta = c.eta;
    out.diag.eta0 = c.eta0;
    out.diag.beta0 = c.beta0;
    return out;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateDirection) throw;
  }
  // |BNY| = 0 with N != 0: the closed loop is insensitive to this step
  // direction's bound, so probe directly — halve a unit trial step until
  // the stepped gain is stabilizing and the decrease certificate holds.
  out.diag.degenerate_fallback = true;
  double eta = 1.0;
  for (int halvings = 0; halvings < 80; ++halvings, eta *= 0.5) {
    try {
      const double phi = check_phi(P, bundle, eta);
      if (phi >= 0.0) {
        out.eta = eta;
        return out;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LeftStabilityRegion) throw;
    }
  }
  fail(ErrorCode::DegenerateDirection,
       "fallback found no stabilizing decreasing step");
}

}  // namespace

RunTrace run(const ProblemInstance& P, const Gain& K0, Method kind,
             const DareSolution& star, const StopRule& stop) {
  if (!K0.stabilizing) {
    std::ostringstream msg;
    msg << "rho(A-BK0) = " << K0.rho;
    fail(ErrorCode::NotStabilizing, msg.str());
  }
  const double f_star = (star.Xstar * P.Sigma).trace();
  const double f_star_abs = std::abs(f_star);
  const double kstar_norm = star.Kstar.norm();
  // K* = 0 only in degenerate instances; report absolute error there.
  const double gain_denom = kstar_norm > 0.0 ? kstar_norm : 1.0;

  RunTrace trace;
  trace.kind = kind;
  Gain g = K0;
  for (long j = 0; j <= stop.max_iter; ++j) {
    const ValueBundle bundle = evaluate(P, g);
    IterationRecord rec;
    rec.iter = j;
    rec.K = g.K;
    rec.cost = bundle.cost;
    rec.rho = g.rho;
    rec.eta = 0.0;
    rec.n_norm = bundle.N.norm();
    rec.gain_rel_err = (g.K - star.Kstar).norm() / gain_denom;
    rec.cost_rel_err = (bundle.cost - f_star) / f_star_abs;

    if (rec.n_norm <= stop.grad_tol * (1.0 + bundle.X.norm())) {
      trace.records.push_back(rec);
      trace.converged = true;
      break;
    }
    if (j == stop.max_iter) {  // iteration budget exhausted, no further step
      trace.records.push_back(rec);
      break;
    }

    double eta = 0.0;
    Mat dir;
    GdStepDiagnostics diag{};
    bool have_diag = false;
    switch (kind) {
      case Method::NGD:
        eta = stepsize_ngd(bundle);
        dir = 2.0 * bundle.N;
        break;
      case Method::QN:
        eta = stepsize_qn();
        dir = direction(P, bundle, Method::QN).matrix;
        break;
      case Method::GD: {
        dir = bundle.grad;
        GdStep step = gd_step(P, bundle, j);
        eta = step.eta;
        diag = step.diag;
        have_diag = true;
        break;
      }
    }

    const Mat K_next = g.K - eta * dir;
    const Gain g_next = classify_gain(P, K_next);
    if (!g_next.stabilizing) {
      // The certified stepsizes forbid this; treat as a bug, not a state.
      std::ostringstream msg;
      msg << "update left the stabilizing set at iteration " << j
          << ": eta = " << eta << ", rho(A-BK_next) = " << g_next.rho
          << ", |N| = " << rec.n_norm << ", K = " << format_gain(g.K);
      fail(ErrorCode::StabilityLost, msg.str());
    }
    if (kind == Method::GD) {
      diag.phi = check_phi(P, bundle, eta);
      diag.y_next_norm =
          spectral_norm(solve_dlyap(P.A - P.B * K_next, P.Sigma));
    }

    rec.eta = eta;
    trace.records.push_back(rec);
    if (have_diag) trace.gd_steps.push_back(diag);
    g = g_next;
  }

  try {
    trace.rate = estimate_rate(trace);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
  }
  return trace;
}

RateEstimate estimate_rate(const RunTrace& trace) {
  std::vector<double> e;
  for (const auto& rec : trace.records) {
    if (!(rec.cost_rel_err > kRateFloor)) break;
    e.push_back(rec.cost_rel_err);
  }
  if (e.size() < 4) {
    fail(ErrorCode::InsufficientData,
         "need >= 4 records with usable positive cost_rel_err, have " +
             std::to_string(e.size()));
  }

  std::vector<double> lin, quad;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    lin.push_back(e[i + 1] / e[i]);
    quad.push_back(e[i + 1] / (e[i] * e[i]));
  }

  struct Fit {
    double param;
    double cv;
  };
  const auto fit_tail = [](const std::vector<double>& ratios) {
    const std::size_t keep = (ratios.size() + 1) / 2;
    const std::vector<double> tail(ratios.end() - keep, ratios.end());
    const double mean =
        std::accumulate(tail.begin(), tail.end(), 0.0) / tail.size();
    double var = 0.0;
    for (double r : tail) var += (r - mean) * (r - mean);
    var /= tail.size();
    const double cv = mean > 0.0 ? std::sqrt(var) / mean
                                 : std::numeric_limits<double>::infinity();
    return Fit{*std::max_element(tail.begin(), tail.end()), cv};
  };
  const Fit fl = fit_tail(lin);
  const Fit fq = fit_tail(quad);

  RateEstimate out;
  out.points_used = static_cast<int>(e.size());
  const bool lin_stable = fl.cv < 0.5;
  const bool quad_stable = fq.cv < 0.5;
  if (quad_stable && (!lin_stable || fq.cv < fl.cv)) {
    out.model = RateEstimate::Model::Quadratic;
    out.parameter = fq.param;
    out.cv = fq.cv;
    out.stable = true;
  } else if (lin_stable) {
    out.model = RateEstimate::Model::Linear;
    out.parameter = fl.param;
    out.cv = fl.cv;
    out.stable = true;
  } else {
    const bool pick_lin = fl.cv <= fq.cv;
    out.model = pick_lin ? RateEstimate::Model::Linear
                         : RateEstimate::Model::Quadratic;
    out.parameter = pick_lin ? fl.param : fq.param;
    out.cv = pick_lin ? fl.cv : fq.cv;
    out.stable = false;
  }
  return out;
}

}  // namespace lqropt
