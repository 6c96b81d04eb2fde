#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "mfe/filter_design.hpp"
#include "mfe/ltisim.hpp"
#include "mfe/model.hpp"

namespace mfe {

/// Deterministic test signal: zero, per-channel sinusoid, or ZOH samples.
struct SignalSpec {
  enum class Type { kZero, kSinusoid, kSamples };
  Type type = Type::kZero;

  std::vector<double> amplitude, omega, phase;  // sinusoid, per channel

  Eigen::MatrixXd samples;  // rows are time steps
  double sample_h = 0.0;
  bool periodic = false;

  static SignalSpec zero();
  static SignalSpec sinusoid(std::vector<double> amplitude, std::vector<double> omega,
                             std::vector<double> phase);
  /// ZOH playback of a sample table; wraps around when periodic.
  static SignalSpec zoh(Eigen::MatrixXd samples, double sample_h, bool periodic);

  Eigen::VectorXd value(double t, Eigen::Index channels) const;
};

/// Fault trajectory: constant vector, or per-fault combinations of dictionary
/// basis signals with known coefficients.
struct FaultSignal {
  Eigen::VectorXd constant;
  bool time_varying = false;
  std::shared_ptr<TvDictionary> dict;
  // components[i] lists (coefficient, dictionary index) pairs for fault i.
  std::vector<std::vector<std::pair<double, int>>> components;

  static FaultSignal constants(Eigen::VectorXd f);
  Eigen::VectorXd value(double t) const;
  Eigen::Index size() const;
};

struct ScenarioConfig {
  FaultSignal fault;
  SignalSpec input;
  SignalSpec disturbance;
  double sigma = 0.0;
  double h = 0.05;
  double t_end = 40.0;
  int oversample = 10;  // plant sub-stepping factor for continuous models
  std::uint64_t seed = 0;
};

struct ScenarioResult {
  Eigen::VectorXd t;
  Eigen::MatrixXd z, z_clean;  // N_t x n_z sampled known signals
  Eigen::VectorXd r, r_clean;  // residual
  Eigen::MatrixXd e, e_clean;  // N_t x m regressors
  Eigen::MatrixXd xi;          // N_t x n_xi noise-free latent trajectory
  Eigen::MatrixXd f_applied;   // N_t x m
  std::uint64_t seed = 0;
  double h = 0.0;
};

/// Simulates the fault-perturbed plant together with the residual and
/// regressor generators as one interconnection. Continuous models are
/// sub-stepped at h/oversample with ZOH exogenous inputs (the filters see the
/// plant output through the interconnection, not through samples); discrete
/// models run exactly at h. Measurement noise is i.i.d. Gaussian of variance
/// sigma^2, injected at the estimator rate h through the W channels and held
/// over each interval. Trajectories are reported at interval h.
ScenarioResult simulate_scenario(const DaeModel& m, const GeneratorSet& gen,
                                 const ScenarioConfig& cfg);

/// Stateful scenario engine: runs in segments so the generator filters can be
/// swapped mid-experiment (the plant and its state roll on untouched, and the
/// filter states carry over, which a re-designed bank over the same
/// denominator expects).
class ScenarioEngine {
 public:
  ScenarioEngine(const DaeModel& m, const GeneratorSet& gen, const ScenarioConfig& cfg);

  /// Advances by the given number of h-steps and appends to the result.
  void run(Eigen::Index steps);

  /// Replaces N and M, keeping the filter states and the denominator.
  void swap_generators(const DaeModel& m, const GeneratorSet& gen);

  const ScenarioResult& result() const { return result_; }

  /// Fine-grid filter-input trajectory (noisy), one row per sub-step, for
  /// auxiliary filter banks; equals z at every oversample-th row.
  const Eigen::MatrixXd& fine_z() const { return fine_z_; }
  const Eigen::MatrixXd& fine_z_clean() const { return fine_z_clean_; }
  double fine_h() const { return fine_h_; }
  Eigen::Index steps_done() const { return step_; }

 private:
  void rebuild_combined(const Eigen::VectorXd& f);

  DaeModel model_;
  GeneratorSet gen_;
  ScenarioConfig cfg_;
  bool continuous_ = false;
  int oversample_ = 1;
  double fine_h_ = 0.0;

  StateSpace residual_c_, regressor_c_;  // realized in the model's time domain

  // Combined discrete-time step matrices: state [x_p; x_r; x_e],
  // inputs [u; d; w].
  Eigen::MatrixXd ad_, bd_;
  // Output maps at sample instants.
  Eigen::MatrixXd cy_, dy_u_, dy_d_, dy_w_;  // measured y
  Eigen::MatrixXd cr_, dr_u_, dr_d_, dr_w_;  // residual
  Eigen::MatrixXd ce_, de_u_, de_d_, de_w_;  // regressors
  Eigen::Index n_xp_ = 0, n_xr_ = 0, n_xe_ = 0;

  Eigen::VectorXd x_, x_clean_;
  Eigen::Index step_ = 0;
  std::mt19937_64 rng_;
  ScenarioResult result_;
  Eigen::MatrixXd fine_z_, fine_z_clean_;
};

/// One column of the time-varying regressor bank: the filtered sum of
/// d^-1 (N G'_k) applied to phi'_k-weighted z.
struct TvRegressorColumn {
  int fault_index = 0;
  int basis_index = 0;  // index within the fault's component list
  std::vector<std::pair<StateSpace, int>> filters;  // (filter at fine step, dict index)
};

/// Builds the expanded regressor bank for time-varying fault estimation; the
/// filters are discretized at the engine's fine step.
std::vector<TvRegressorColumn> build_tv_regressor_bank(const DaeModel& m,
                                                       const GeneratorSet& gen,
                                                       const FaultSignal& fault, double fine_h);

/// Runs the bank over the fine-grid z and downsamples to every keep_every-th
/// row: returns N_t x (#columns) regressors.
Eigen::MatrixXd run_tv_regressors(const std::vector<TvRegressorColumn>& bank,
                                  const TvDictionary& dict, double fine_h,
                                  const Eigen::MatrixXd& fine_z, int keep_every);

}  // namespace mfe
