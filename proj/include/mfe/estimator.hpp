#pragma once

#include <optional>
#include <vector>

#include "mfe/scenario.hpp"

namespace mfe {

/// Sampled regressor/residual window, rows in chronological order.
struct EstimationWindow {
  Eigen::MatrixXd E;  // N x m
  Eigen::VectorXd R;  // N
  double h = 0.0;
  int N = 0;
};

inline constexpr double kWindowTolRank = 1e-8;

/// Minimum-norm least-squares solution; equals (E^T E)^-1 E^T R at full rank.
/// Throws RankDeficientWindow when the smallest singular value of E falls
/// under tol_rank times the largest.
Eigen::VectorXd ls_estimate(const EstimationWindow& w, double tol_rank = kWindowTolRank);

/// s_min(E) / sqrt(N): window-size-invariant richness score.
double effective_singular_value(const EstimationWindow& w);

struct EstimateTrajectory {
  Eigen::VectorXd t;            // one entry per estimation step
  Eigen::MatrixXd f_hat;        // NaN rows where the window was rank deficient
  std::vector<bool> valid;
  Eigen::VectorXd effective_sv;
  int window = 0;
  int stride = 1;
};

/// Sliding-window estimation over a scenario's residual/regressor outputs.
EstimateTrajectory run_estimator(const ScenarioResult& res, int window, int stride = 1);

/// Same sliding-window pass over an arbitrary regressor matrix (time-varying
/// parameter banks).
EstimateTrajectory run_estimator_columns(const Eigen::VectorXd& t, const Eigen::VectorXd& r,
                                         const Eigen::MatrixXd& e, double h, int window,
                                         int stride = 1);

/// First-order expansion of the least-squares error: returns f_check - f.
Eigen::VectorXd first_order_error(const Eigen::MatrixXd& e, const Eigen::MatrixXd& e_w,
                                  const Eigen::VectorXd& r_w, const Eigen::VectorXd& r_nl,
                                  const Eigen::VectorXd& f, double tol_rank = kWindowTolRank);

/// Norm and window data feeding the bias/variance/SNR bounds.
struct BoundInputs {
  double A = 0.0;        // max peak-to-peak gain over the second-order channels
  double eta_F = 0.0;    // HinfF norm of the stacked fault-noise channels
  double eta_W = 0.0;    // HinfF norm of the direct noise channel
  double gamma_F = 0.0;  // H2 norm of the stacked fault-noise channels
  double sigma = 0.0;
  Eigen::VectorXd s;     // window singular values, descending
  double signal_peak = 0.0;  // sup_t |[xi; z]|
  double f_norm = 0.0;
  int N = 0;
  int m = 0;

  double eta() const { return std::sqrt(eta_F * eta_F + eta_W * eta_W); }
  double s_min() const { return s.size() > 0 ? s(s.size() - 1) : 0.0; }
};

/// Bias bound B = A sqrt(N m) |f|^2 s_m^-1 |[xi; z]|_inf, as stated.
double bias_bound(const BoundInputs& b);

/// Companion form A m sqrt(N) |f|^2 s_m^-1 |[xi; z]|_inf from the derivation;
/// reported alongside the headline bound.
double bias_bound_derivation_form(const BoundInputs& b);

/// sigma^2 (2(|f|^2+1) eta^2 sum s_i^-2 + B^2 eta_F^2 (2 sum s_i^-2 + s_m^-2)).
double variance_bound(const BoundInputs& b, double bias);

/// Special case with every H'_i == 0: (|f|^2+1) eta^2 sigma^2 sum s_i^-2.
double variance_bound_output_faults(const BoundInputs& b);

/// c = sqrt(2N) s_m^-1 sigma gamma_F; the first-order analysis is trusted when
/// c is well below one.
double snr_metric(const BoundInputs& b);

inline constexpr double kSnrValidityThreshold = 0.3;

/// Assembles BoundInputs for a scenario: realizes the second-order and noise
/// channels over the denominator, discretizes them at h, and measures the
/// window singular values and signal peak from the noise-free trajectories.
BoundInputs compute_bound_inputs(const DaeModel& m, const GeneratorSet& gen,
                                 const ScenarioResult& res, int window, double sigma);

/// One Gauss-Newton outer iteration record.
struct GaussNewtonStep {
  Eigen::VectorXd increment;
  Eigen::VectorXd cumulative;
  double residual_norm = 0.0;  // RMS of the residual over the segment tail
  bool redesign_failed = false;
  std::string message;
};

struct GaussNewtonOptions {
  int iterations = 3;
  double segment_seconds = 40.0;
  int window = 400;
  DesignOptions design;
  std::vector<std::complex<double>> poles;
  bool normalize_dc = true;
};

/// Iterative large-fault estimation: estimate on a segment, relinearize the
/// model at the cumulative estimate, re-design the generators (same
/// denominator), and continue on the same plant trajectory.
std::vector<GaussNewtonStep> run_gauss_newton(const DaeModel& m, const ScenarioConfig& cfg,
                                              const GaussNewtonOptions& opts);

}  // namespace mfe
