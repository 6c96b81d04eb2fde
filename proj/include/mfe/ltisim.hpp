#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "mfe/model.hpp"
#include "mfe/polymat.hpp"

namespace mfe {

/// State-space realization x' = A x + B u, y = C x + D u.
struct StateSpace {
  Eigen::MatrixXd A, B, C, D;
  TimeDomain time_domain = TimeDomain::kDiscrete;
  double h = 0.0;  // sample interval, discrete only

  Eigen::Index n_states() const { return A.rows(); }
  Eigen::Index n_inputs() const { return B.cols(); }
  Eigen::Index n_outputs() const { return C.rows(); }
};

/// Spectral abscissa (continuous) below zero / spectral radius (discrete)
/// below one.
bool is_stable(const StateSpace& ss);
double spectral_radius(const Eigen::MatrixXd& a);

/// Controllable-canonical realization of d(q)^-1 P(q), one companion block per
/// input column with the shared denominator. Throws ImproperFilter when
/// degree(P) > degree(d).
StateSpace realize(const PolyMatrix& d, const PolyMatrix& p, TimeDomain td);

/// Zero-order-hold discretization via the augmented matrix exponential.
StateSpace c2d_exact(const StateSpace& ss, double h);

/// LTI recursion; U is N_t x n_inputs, returns N_t x n_outputs.
Eigen::MatrixXd simulate(const StateSpace& ss, const Eigen::MatrixXd& u,
                         const Eigen::VectorXd& x0);

/// Like simulate but also reports the final state.
Eigen::MatrixXd simulate_keep_state(const StateSpace& ss, const Eigen::MatrixXd& u,
                                    Eigen::VectorXd& x_inout);

/// Frequency response C (zI - A)^-1 B + D.
Eigen::MatrixXcd freq_response(const StateSpace& ss, std::complex<double> z);

/// Response at angular frequency w: z = jw (continuous) or exp(jwh) (discrete).
Eigen::MatrixXcd freq_response_at(const StateSpace& ss, double omega);

struct HinfOptions {
  int grid_points = 2048;
  double omega_min = 1e-3;
  double omega_max_continuous = 1e3;
  double rel_tol = 1e-4;
};

/// Sup over frequency of the Frobenius norm of the frequency response,
/// on a log grid with golden-section refinement around the grid maximum.
double hinfF_norm(const StateSpace& ss, const HinfOptions& opts = {});

/// sqrt(trace(C X C^T + D D^T)) with X the discrete controllability Gramian.
double h2_norm(const StateSpace& ss);

/// Upper bound on the peak-to-peak (l-infinity induced) gain via a truncated
/// impulse-response l1 sum plus a geometric tail bound.
double peak_to_peak_bound(const StateSpace& ss, double tail_tol = 1e-6);

/// Discrete controllability Gramian sum_k A^k B B^T A^k^T (doubling iteration).
Eigen::MatrixXd discrete_gramian(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Balanced truncation of numerically unreachable/unobservable states of a
/// stable discrete system; Hankel values below tol * largest are dropped.
StateSpace minimal_realization(const StateSpace& ss, double tol = 1e-10);

/// Block-diagonal stack sharing the input vector: y = [sys1; sys2] u.
StateSpace stack_outputs(const StateSpace& top, const StateSpace& bottom);

/// Series interconnection second(first(u)).
StateSpace series(const StateSpace& first, const StateSpace& second);

}  // namespace mfe
