#pragma once

#include "modsynth/modlib.hpp"
#include "modsynth/types.hpp"

namespace modsynth {

struct Trajectory;

inline const Vec3 default_gravity{0.0, 0.0, -9.81};

struct DynState {
    VecX q;
    VecX qd;
    VecX qdd;
    Vec3 gravity = default_gravity;
};

/// Recursive Newton-Euler joint torques (forces for prismatic joints).
VecX inverse_dynamics(const Assembly& assembly, const DynState& state,
                      const Transform& base = Transform::Identity());

/// |tau| <= tau_max at every sample 0, dt, 2 dt, ... and at t_max, with the
/// state interpolated from the trajectory.
bool torque_feasible(const Assembly& assembly, const Trajectory& trajectory, double dt_check = 0.01,
                     const Vec3& gravity = default_gravity, const Transform& base = Transform::Identity());

}  // namespace modsynth
