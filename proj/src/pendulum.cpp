#include "mfe/pendulum.hpp"

#include <Eigen/Dense>

namespace mfe {

StateSpaceModel pendulum_state_space(const PendulumParams& p) {
  const double mt = p.cart_mass + p.pend_mass;       // total mass
  const double ml = p.pend_mass * p.length;          // coupling
  const double jp = p.inertia + p.pend_mass * p.length * p.length;
  const double mgl = p.pend_mass * p.gravity * p.length;

  // Mass-matrix form in [v, phi, omega]: rows are the cart equation, the
  // angle definition, and the pendulum torque balance.
  Eigen::Matrix3d e;
  e << mt, 0, ml, 0, 1, 0, ml, 0, jp;
  Eigen::Matrix3d k;
  k << -p.friction, 0, 0, 0, 0, 1, 0, -mgl, 0;
  Eigen::Matrix<double, 3, 2> bu_raw;
  bu_raw << 1, 0, 0, 0, 0, p.torque_gain;

  const Eigen::Matrix3d e_inv = e.inverse();

  StateSpaceModel ss;
  ss.time_domain = TimeDomain::kContinuous;
  ss.G = Eigen::Matrix3d::Identity();
  ss.A = e_inv * k;
  ss.B_u = e_inv * bu_raw;
  // Slope disturbance: kinematic deceleration of the cart plus the matching
  // angular acceleration pull on the pendulum.
  ss.B_d = Eigen::Vector3d(-p.gravity, 0.0, -p.gravity * ml / jp);
  ss.B_w = Eigen::MatrixXd::Zero(3, 2);
  ss.C = Eigen::MatrixXd::Zero(2, 3);
  ss.C(0, 0) = 1.0;
  ss.C(1, 1) = 1.0;
  ss.D_u = Eigen::MatrixXd::Zero(2, 2);
  ss.D_d = Eigen::MatrixXd::Zero(2, 1);
  ss.D_w = Eigen::MatrixXd::Identity(2, 2);

  // Fault 1: friction change along the friction sensitivity of the solved
  // dynamics, normalized by direction_gain.
  StateSpaceFault friction;
  friction.name = "friction";
  Eigen::Matrix3d k_b = Eigen::Matrix3d::Zero();
  k_b(0, 0) = -p.friction;
  friction.A = p.direction_gain * (e_inv * k_b);
  ss.faults.push_back(friction);

  // Fault 2: pendulum-mass change; state direction is the exact first-order
  // sensitivity of the solved dynamics, and the slope channel carries the
  // mass coupling [m_p; -m_p g] resolved through the mass matrix.
  StateSpaceFault mass;
  mass.name = "pendulum_mass";
  Eigen::Matrix3d e_m = Eigen::Matrix3d::Zero();
  e_m(0, 0) = p.pend_mass;
  e_m(0, 2) = ml;
  e_m(2, 0) = ml;
  e_m(2, 2) = p.pend_mass * p.length * p.length;
  Eigen::Matrix3d k_m = Eigen::Matrix3d::Zero();
  k_m(2, 1) = -mgl;
  mass.A = e_inv * (k_m - e_m * ss.A);
  Eigen::Matrix2d e2;
  e2 << mt, ml, ml, jp;
  const Eigen::Vector2d slope_coupling =
      e2.inverse() * Eigen::Vector2d(p.pend_mass, -p.pend_mass * p.gravity);
  mass.B_d = Eigen::Vector3d(slope_coupling(0), 0.0, slope_coupling(1));
  ss.faults.push_back(mass);

  // Fault 3: actuation power on both input channels, same normalization as
  // the friction direction.
  StateSpaceFault battery;
  battery.name = "battery";
  battery.B_u = p.direction_gain * ss.B_u;
  ss.faults.push_back(battery);

  return ss;
}

DaeModel pendulum_model(const PendulumParams& p) { return to_dae(pendulum_state_space(p)); }

DaeModel output_fault_model() {
  StateSpaceModel ss;
  ss.time_domain = TimeDomain::kDiscrete;
  ss.G = Eigen::Matrix2d::Identity();
  ss.A = (Eigen::Matrix2d() << 0.5, 0.1, 0.0, 0.3).finished();
  ss.B_u = (Eigen::Vector2d() << 1.0, 0.5).finished();
  ss.B_d = Eigen::MatrixXd::Zero(2, 0);
  ss.B_w = Eigen::MatrixXd::Zero(2, 2);
  ss.C = Eigen::Matrix2d::Identity();
  ss.D_u = (Eigen::Vector2d() << 0.2, 0.1).finished();
  ss.D_d = Eigen::MatrixXd::Zero(2, 0);
  ss.D_w = Eigen::MatrixXd::Identity(2, 2);

  StateSpaceFault gain;
  gain.name = "input_gain";
  gain.B_u = ss.B_u;
  gain.D_u = ss.D_u;
  ss.faults.push_back(gain);

  StateSpaceFault feedthrough;
  feedthrough.name = "feedthrough";
  feedthrough.D_u = (Eigen::Vector2d() << 1.0, 0.0).finished();
  ss.faults.push_back(feedthrough);

  return to_dae(ss);
}

}  // namespace mfe
