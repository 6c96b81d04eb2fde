#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mfe/polymat.hpp"

namespace mfe {

enum class TimeDomain { kContinuous, kDiscrete };

/// Column bookkeeping: xi = [states; disturbances], z = [outputs; inputs].
struct Partition {
  Eigen::Index n_states = 0;
  Eigen::Index n_disturbances = 0;
  Eigen::Index n_outputs = 0;
  Eigen::Index n_inputs = 0;
};

/// Per-fault direction matrices of a state-space model. Any member may be
/// empty, meaning zero.
struct StateSpaceFault {
  std::string name;
  Eigen::MatrixXd G, A, B_u, B_d, C, D_u, D_d;
};

/// G x' = A x + B_u u + B_d d + B_w w ; y = C x + D_u u + D_d d + D_w w,
/// with every fault scaling its direction matrices.
struct StateSpaceModel {
  Eigen::MatrixXd G, A, B_u, B_d, B_w, C, D_u, D_d, D_w;
  std::vector<StateSpaceFault> faults;
  TimeDomain time_domain = TimeDomain::kContinuous;

  Eigen::Index n_x() const { return A.rows(); }
  Eigen::Index n_u() const { return B_u.cols(); }
  Eigen::Index n_d() const { return B_d.cols(); }
  Eigen::Index n_w() const { return B_w.cols(); }
  Eigen::Index n_y() const { return C.rows(); }

  void validate() const;
};

struct FaultDirection {
  std::string name;
  PolyMatrix H;  // n_r x n_xi
  PolyMatrix L;  // n_r x n_z
};

/// The model (H + sum f_i H'_i) xi + (L + sum f_i L'_i) z + W w = 0.
struct DaeModel {
  PolyMatrix H;  // n_r x n_xi
  PolyMatrix L;  // n_r x n_z
  PolyMatrix W;  // n_r x n_w
  std::vector<FaultDirection> faults;
  TimeDomain time_domain = TimeDomain::kContinuous;
  Partition partition;
  std::optional<StateSpaceModel> source;  // kept when built from a state-space model

  Eigen::Index n_r() const { return H.rows(); }
  Eigen::Index n_xi() const { return H.cols(); }
  Eigen::Index n_z() const { return L.cols(); }
  Eigen::Index n_w() const { return W.cols(); }
  int fault_count() const { return static_cast<int>(faults.size()); }

  void validate() const;
};

/// Builds H = [[-qG+A, B_d],[C, D_d]], L = [[0, B_u],[-I, D_u]], W = [B_w; D_w]
/// and the matching fault directions; z = [y; u], xi = [x; d].
DaeModel to_dae(const StateSpaceModel& ss);

struct ObservabilityReport {
  bool observable = false;
  std::optional<PolyMatrix> left_inv;
  int k_max = 0;
  std::string detail;
};

/// Attempts a polynomial left inverse of H up to degree k_max.
ObservabilityReport check_nominal_observability(const DaeModel& m, int k_max);

/// H <- H + sum f_i H'_i, L <- L + sum f_i L'_i; fault directions retained.
/// A state-space source, when present, is perturbed consistently.
DaeModel perturb(const DaeModel& m, const Eigen::VectorXd& f);

}  // namespace mfe
