#pragma once

#include "mfe/model.hpp"

namespace mfe {

/// Nominal constants of the cart-pendulum benchmark (downward pendulum,
/// linearized): cart mass, pendulum mass, cart friction, distance to the
/// pendulum's center of mass, pendulum inertia, gravity, and the gain from
/// the commanded torque input to the applied torque.
struct PendulumParams {
  double cart_mass = 0.5;
  double pend_mass = 0.2;
  double friction = 0.1;
  double length = 0.3;
  double inertia = 0.006;
  double gravity = 9.8;
  double torque_gain = 0.1;
  // Normalization of the friction and actuation fault directions; calibrated
  // so the benchmark's designed-input richness matches its published value.
  double direction_gain = 0.59;
};

/// Continuous-time model with states [cart velocity, pendulum angle, angular
/// velocity], measured outputs [cart velocity, pendulum angle], inputs
/// [force, torque], one slope disturbance channel, and unit measurement
/// noise directions. Faults: (1) friction scale, (2) pendulum-mass scale
/// (first-order direction of the mass dependence), (3) actuation-gain scale
/// on both inputs.
StateSpaceModel pendulum_state_space(const PendulumParams& p = {});

DaeModel pendulum_model(const PendulumParams& p = {});

/// Small discrete-time benchmark whose faults multiply only known signals
/// (every H'_i is zero): an input-gain fault and an output-feedthrough fault
/// on a stable two-state plant with measurement noise.
DaeModel output_fault_model();

}  // namespace mfe
