#include "mfe/estimator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

namespace mfe {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXd> window_svd(const Eigen::MatrixXd& e) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

void require_full_rank(const Eigen::JacobiSVD<Eigen::MatrixXd>& svd, Eigen::Index m,
                       double tol_rank) {
  const Eigen::VectorXd s = svd.singularValues();
  const double smin = s.size() >= m ? s(m - 1) : 0.0;
  const double smax = s.size() > 0 ? s(0) : 0.0;
  if (s.size() < m || smin <= tol_rank * smax) {
    std::ostringstream os;
    os << "window is rank deficient: s_min " << smin << " vs s_max " << smax;
    throw RankDeficientWindow(os.str(), smin);
  }
}

}  // namespace

Eigen::VectorXd ls_estimate(const EstimationWindow& w, double tol_rank) {
  if (w.E.rows() != w.R.size()) throw DimensionError("ls_estimate: row counts disagree");
  if (w.E.rows() < w.E.cols())
    throw RankDeficientWindow("ls_estimate: fewer rows than unknowns", 0.0);
  const auto svd = window_svd(w.E);
  require_full_rank(svd, w.E.cols(), tol_rank);
  return svd.solve(w.R);
}

double effective_singular_value(const EstimationWindow& w) {
  if (w.E.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w.E);
  const Eigen::VectorXd s = svd.singularValues();
  const double smin = s.size() >= w.E.cols() ? s(w.E.cols() - 1) : 0.0;
  return smin / std::sqrt(static_cast<double>(w.E.rows()));
}

EstimateTrajectory run_estimator(const ScenarioResult& res, int window, int stride) {
  return run_estimator_columns(res.t, res.r, res.e, res.h, window, stride);
}

EstimateTrajectory run_estimator_columns(const Eigen::VectorXd& t, const Eigen::VectorXd& r,
                                         const Eigen::MatrixXd& e, double h, int window,
                                         int stride) {
  if (window < 1 || stride < 1) throw ConfigError("run_estimator: bad window or stride");
  if (e.rows() != t.size() || r.size() != t.size())
    throw DimensionError("run_estimator: trajectory lengths disagree");
  const Eigen::Index m = e.cols();
  std::vector<Eigen::Index> steps;
  for (Eigen::Index k = window - 1; k < t.size(); k += stride) steps.push_back(k);

  EstimateTrajectory out;
  out.window = window;
  out.stride = stride;
  out.t.resize(static_cast<Eigen::Index>(steps.size()));
  out.f_hat.resize(static_cast<Eigen::Index>(steps.size()), m);
  out.effective_sv.resize(static_cast<Eigen::Index>(steps.size()));
  out.valid.resize(steps.size(), false);

  for (size_t i = 0; i < steps.size(); ++i) {
    const Eigen::Index k = steps[i];
    EstimationWindow w;
    w.E = e.middleRows(k - window + 1, window);
    w.R = r.segment(k - window + 1, window);
    w.h = h;
    w.N = window;
    out.t(static_cast<Eigen::Index>(i)) = t(k);
    out.effective_sv(static_cast<Eigen::Index>(i)) = effective_singular_value(w);
    try {
      out.f_hat.row(static_cast<Eigen::Index>(i)) = ls_estimate(w).transpose();
      out.valid[i] = true;
    } catch (const RankDeficientWindow&) {
      out.f_hat.row(static_cast<Eigen::Index>(i))
          .setConstant(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

Eigen::VectorXd first_order_error(const Eigen::MatrixXd& e, const Eigen::MatrixXd& e_w,
                                  const Eigen::VectorXd& r_w, const Eigen::VectorXd& r_nl,
                                  const Eigen::VectorXd& f, double tol_rank) {
  const auto svd = window_svd(e);
  require_full_rank(svd, e.cols(), tol_rank);
  const Eigen::MatrixXd u = svd.matrixU();
  const Eigen::MatrixXd v = svd.matrixV();
  const Eigen::VectorXd s_inv = svd.singularValues().cwiseInverse();
  // E^dagger x = V S^-1 U^T x
  auto pinv_apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return v * (s_inv.asDiagonal() * (u.transpose() * x));
  };
  const Eigen::VectorXd p_perp_rnl = r_nl - u * (u.transpose() * r_nl);
  const Eigen::VectorXd pinv_rnl = pinv_apply(r_nl);
  // (E^T E)^-1 E_w^T P_perp R_NL
  const Eigen::VectorXd gram_term =
      v * (s_inv.cwiseAbs2().asDiagonal() * (v.transpose() * (e_w.transpose() * p_perp_rnl)));
  const Eigen::VectorXd mixed_term = pinv_apply(e_w * pinv_rnl);
  // Expansion of (E + E_w)^dagger (E f + R_NL + R_w) around E_w = R_w = 0;
  // the noise groups enter with a plus sign (the variance analysis is
  // insensitive to this sign since the noise is zero-mean).
  return pinv_rnl + pinv_apply(r_w - e_w * f) + (gram_term - mixed_term);
}

double bias_bound(const BoundInputs& b) {
  if (!(b.s_min() > 0.0)) throw RankDeficientWindow("bias_bound: s_min is zero", 0.0);
  return b.A * std::sqrt(static_cast<double>(b.N) * b.m) * b.f_norm * b.f_norm /
         b.s_min() * b.signal_peak;
}

double bias_bound_derivation_form(const BoundInputs& b) {
  if (!(b.s_min() > 0.0)) throw RankDeficientWindow("bias_bound: s_min is zero", 0.0);
  return b.A * b.m * std::sqrt(static_cast<double>(b.N)) * b.f_norm * b.f_norm / b.s_min() *
         b.signal_peak;
}

double variance_bound(const BoundInputs& b, double bias) {
  const double sum_inv2 = b.s.cwiseInverse().squaredNorm();
  const double smin_inv2 = 1.0 / (b.s_min() * b.s_min());
  const double eta2 = b.eta() * b.eta();
  return b.sigma * b.sigma *
         (2.0 * (b.f_norm * b.f_norm + 1.0) * eta2 * sum_inv2 +
          bias * bias * b.eta_F * b.eta_F * (2.0 * sum_inv2 + smin_inv2));
}

double variance_bound_output_faults(const BoundInputs& b) {
  const double sum_inv2 = b.s.cwiseInverse().squaredNorm();
  return (b.f_norm * b.f_norm + 1.0) * b.eta() * b.eta() * b.sigma * b.sigma * sum_inv2;
}

double snr_metric(const BoundInputs& b) {
  if (!(b.s_min() > 0.0)) throw RankDeficientWindow("snr_metric: s_min is zero", 0.0);
  return std::sqrt(2.0 * b.N) / b.s_min() * b.sigma * b.gamma_F;
}

BoundInputs compute_bound_inputs(const DaeModel& m, const GeneratorSet& gen,
                                 const ScenarioResult& res, int window, double sigma) {
  if (!gen.has_denominator()) throw ConfigError("compute_bound_inputs: denominator missing");
  BoundInputs b;
  b.sigma = sigma;
  b.N = window;
  b.m = m.fault_count();

  auto discretize = [&](const PolyMatrix& num) {
    StateSpace ss = realize(gen.denominator, num, m.time_domain);
    if (m.time_domain == TimeDomain::kContinuous) ss = c2d_exact(ss, res.h);
    return ss;
  };

  // Peak-to-peak gains of the second-order channels.
  double a_max = 0.0;
  for (const auto& row : gen.J)
    for (const auto& jij : row)
      if (!jij.is_zero(1e-300)) a_max = std::max(a_max, peak_to_peak_bound(discretize(jij)));
  b.A = a_max;

  // Noise channels: stacked fault channels and the direct channel.
  bool any_f = false;
  for (const auto& fi : gen.F) any_f = any_f || !fi.is_zero(1e-300);
  if (any_f) {
    const PolyMatrix f_stack = vcat(gen.F);
    const StateSpace tf = discretize(f_stack);
    b.eta_F = hinfF_norm(tf);
    b.gamma_F = h2_norm(tf);
  }
  b.eta_W = hinfF_norm(discretize(-mul(gen.N, m.W)));

  // Window singular values and signal peak from the noise-free run.
  const Eigen::Index last = res.t.size() - 1;
  if (last + 1 < window) throw ConfigError("compute_bound_inputs: trajectory shorter than window");
  const Eigen::MatrixXd e = res.e_clean.middleRows(last - window + 1, window);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  b.s = svd.singularValues();

  double peak = 0.0;
  for (Eigen::Index k = 0; k < res.t.size(); ++k) {
    const double norm2 = res.xi.row(k).squaredNorm() + res.z_clean.row(k).squaredNorm();
    peak = std::max(peak, std::sqrt(norm2));
  }
  b.signal_peak = peak;
  b.f_norm = res.f_applied.row(last).norm();
  return b;
}

std::vector<GaussNewtonStep> run_gauss_newton(const DaeModel& m, const ScenarioConfig& cfg,
                                              const GaussNewtonOptions& opts) {
  if (opts.iterations < 1) throw ConfigError("run_gauss_newton: need at least one iteration");
  const Eigen::Index seg_len = static_cast<Eigen::Index>(std::llround(opts.segment_seconds / cfg.h));
  if (seg_len < opts.window)
    throw ConfigError("run_gauss_newton: segment shorter than the estimation window");

  DaeModel current = m;
  GeneratorSet gen = design(current, opts.design);
  const int num_degree = std::max(mul(gen.N, current.L).degree(), gen.M.degree());
  gen.denominator = make_denominator(opts.poles, opts.normalize_dc, m.time_domain, num_degree);

  // One engine for the whole experiment: the true plant rolls on while the
  // estimator's filters are swapped after each relinearization.
  ScenarioEngine engine(m, gen, cfg);

  std::vector<GaussNewtonStep> trace;
  Eigen::VectorXd cumulative = Eigen::VectorXd::Zero(m.fault_count());

  for (int it = 0; it < opts.iterations; ++it) {
    engine.run(it == 0 ? seg_len + 1 : seg_len);
    const ScenarioResult& res = engine.result();

    GaussNewtonStep step;
    EstimationWindow w;
    w.E = res.e.bottomRows(opts.window);
    w.R = res.r.tail(opts.window);
    w.h = cfg.h;
    w.N = opts.window;
    step.increment = ls_estimate(w);
    cumulative += step.increment;
    step.cumulative = cumulative;
    step.residual_norm = std::sqrt(res.r.tail(opts.window).squaredNorm() / opts.window);
    trace.push_back(step);

    if (it + 1 == opts.iterations) break;
    try {
      current = gauss_newton_update(current, step.increment);
      GeneratorSet next = design(current, opts.design);
      next.denominator = gen.denominator;
      gen = std::move(next);
      engine.swap_generators(current, gen);
    } catch (const Error& err) {
      trace.back().redesign_failed = true;
      trace.back().message = err.what();
      break;
    }
  }
  return trace;
}

}  // namespace mfe
