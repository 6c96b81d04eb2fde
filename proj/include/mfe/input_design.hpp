#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "mfe/filter_design.hpp"
#include "mfe/ltisim.hpp"

namespace mfe {

/// Discrete map from the plant input to the regressors: the nominal plant
/// response stacked with a direct input feedthrough, composed with the
/// regressor generator, and discretized exactly at h. Requires a state-space
/// backed model.
StateSpace regressor_input_map(const DaeModel& m, const GeneratorSet& gen, double h);

/// Componentwise bounds lo <= u <= hi on the stacked input.
struct BoxConstraint {
  Eigen::VectorXd lo, hi;
};

/// Per-channel 2-norm bounds over one period; channel i collects the samples
/// u_i(0..N-1) out of the time-major stacked vector.
struct ChannelEnergyConstraint {
  Eigen::VectorXd radius;  // one entry per input channel
  int n_u = 0;
  int N = 0;
};

/// 2-norm bound on the whole stacked input.
struct TotalEnergyConstraint {
  double radius = 1.0;
};

/// u^T S_i u <= 1 with S_i >= 0.
struct QuadraticConstraint {
  Eigen::MatrixXd S;
};

struct ConstraintSet;

/// Intersection handled by Dykstra's alternating projections.
struct IntersectionConstraint {
  std::vector<ConstraintSet> parts;
};

struct ConstraintSet {
  std::variant<BoxConstraint, ChannelEnergyConstraint, TotalEnergyConstraint,
               std::vector<QuadraticConstraint>, IntersectionConstraint>
      v;
};

/// Euclidean projection onto the set. Box clips, energy balls rescale,
/// a quadratic list or intersection runs Dykstra sweeps.
Eigen::VectorXd project(const ConstraintSet& c, const Eigen::VectorXd& x);

bool is_feasible(const ConstraintSet& c, const Eigen::VectorXd& x, double tol = 1e-9);

/// Quadratic-form description u^T S u <= 1 covering the set; boxes become one
/// form per component. Throws ConversionUnsupported when no such form exists.
std::vector<QuadraticConstraint> to_quadratic_list(const ConstraintSet& c, Eigen::Index dim);

struct OptimizeParams {
  double tau = 10.0;
  double step_l = 50.0;
  double eps_u = 1e-3;
  double eps_lambda = 1e-5;
  int max_iter = 20000;
};

/// Stacked-period data of the regressor response map: e'(i) = P'_i u_bar.
struct DesignProblem {
  StateSpace ss;  // minimal discrete realization of the input-to-regressor map
  int N = 0;
  int n_u = 0;
  int m = 0;
  std::vector<Eigen::MatrixXd> P;   // N of m x N*n_u
  Eigen::MatrixXd P_x;              // n x N*n_u
  std::vector<Eigen::MatrixXd> Pp;  // N of m x N*n_u
  Eigen::MatrixXd Pp_stacked;       // (N m) x (N n_u)
  ConstraintSet constraints;
  OptimizeParams params;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(N) * n_u; }
};

/// Builds the period matrices for a stable discrete system after a minimal
/// realization pass. Throws UnstableSystem or SingularPeriodMatrix.
DesignProblem build_problem(const StateSpace& t_discrete, int period, ConstraintSet constraints,
                            OptimizeParams params = {});

/// J = lambda_min(sum_i P'_i u u^T P'_i^T) and a subgradient
/// g = 2 sum_i (v^T P'_i u) P'_i^T v for a unit minimal eigenvector v.
std::pair<double, Eigen::VectorXd> objective_subgradient(const DesignProblem& p,
                                                         const Eigen::VectorXd& u_bar);

/// Objective only (cheaper; used by finite differences).
double objective(const DesignProblem& p, const Eigen::VectorXd& u_bar);

/// Smallest-eigenvalue gap of the information matrix, for simple-eigenvalue
/// checks in derivative tests.
double smallest_eigen_gap(const DesignProblem& p, const Eigen::VectorXd& u_bar);

struct DesignResult {
  Eigen::VectorXd u_bar;
  double J = 0.0;
  int iterations = 0;
  std::vector<double> lambda_history;
  std::optional<double> sdp_upper;
  std::optional<double> gap;
  Eigen::VectorXd x0_periodic;
  std::uint64_t seed = 0;
};

/// Projected subgradient ascent with step tau*L/(L+k); returns the best
/// iterate by J. Stops when the iterate moves less than eps_u, when the
/// running mean of the objective settles within eps_lambda, or at max_iter.
DesignResult optimize(const DesignProblem& p, std::uint64_t seed);

/// Best of several seeded runs (seed, seed+1, ...), ties to the first.
DesignResult optimize_multistart(const DesignProblem& p, std::uint64_t seed, int starts);

/// x0 = (I - A^N)^-1 P_x u_bar: simulating from it makes the regressor
/// exactly N-periodic from the start.
Eigen::VectorXd periodic_initial_state(const DesignProblem& p, const Eigen::VectorXd& u_bar);

/// Simulates the periodically repeated input from zero initial state until
/// the transient has died and returns s_min^2 of the last window.
double verify_asymptotic(const DesignProblem& p, const Eigen::VectorXd& u_bar,
                         int n_periods = -1, int window_offset = 0);

struct SdpOptions {
  double tau = 2.0;
  double step_l = 300.0;
  int max_iter = 50000;
  double tol = 1e-4;
  int stall_window = 400;
  double rank_tol = 1e-6;
  int dykstra_max_sweeps = 40;
  double dykstra_tol = 1e-9;
};

struct SdpResult {
  double lambda_sdp = 0.0;
  int rank = 0;
  int iterations = 0;
  std::optional<Eigen::VectorXd> u_extracted;  // only when the lift is rank one
};

/// Semidefinite relaxation bound: supergradient ascent over the lifted matrix
/// with Dykstra projection onto the PSD cone intersected with the trace
/// half-spaces. Warm-started at the rank-one lift of warm_u when provided, so
/// the bound never falls below J(warm_u).
SdpResult sdp_bound(const DesignProblem& p, const SdpOptions& opts = {},
                    const std::optional<Eigen::VectorXd>& warm_u = std::nullopt);

/// Writes the relaxation in sparse SDPA format (block 1: richness LMI,
/// block 2: the lifted matrix itself, block 3: diagonal trace slacks).
void export_sdpa(const DesignProblem& p, const std::string& path);

}  // namespace mfe
