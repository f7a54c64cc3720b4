#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "modsynth/dynamics.hpp"
#include "modsynth/geometry.hpp"
#include "modsynth/kinematics.hpp"
#include "modsynth/tasks.hpp"

namespace modsynth {

struct Path {
    std::vector<VecX> waypoints;
};

/// Time-ordered samples. qdd at a sample is the acceleration of the interval
/// that starts there (the last sample carries the final interval's value).
struct Trajectory {
    std::vector<double> t;
    std::vector<VecX> q;
    std::vector<VecX> qd;
    std::vector<VecX> qdd;
    std::vector<double> goal_times;

    std::size_t size() const { return t.size(); }
    double t_max() const { return t.empty() ? 0.0 : t.back(); }
    /// State at time `time` (clamped to [0, t_max]), exact for piecewise
    /// constant acceleration between samples.
    DynState state_at(double time) const;
};

struct PlanOptions {
    double timeout_s = 3.0;
    /// Deterministic budget of RRT-Connect iterations per plan_path call.
    int max_iterations = 4000;
    /// When false only max_iterations bounds planning, which keeps runs
    /// reproducible independent of machine load.
    bool use_wall_clock = true;
    double extend_step = 0.1;
    double edge_resolution = 0.01;
    int shortcut_iterations = 200;
    double sample_dt = 0.01;
    double torque_dt = 0.01;
    bool self_collision = true;
    Vec3 gravity = default_gravity;
    IkOptions ik;
};

/// RRT-Connect with greedy shortcutting. Throws InvalidEndpoint if an
/// endpoint is outside the limits or in collision.
std::optional<Path> plan_path(const Assembly& assembly, const VecX& q_start, const VecX& q_goal, const Scene& scene,
                              const PlanOptions& opts, std::uint64_t seed,
                              const Transform& base = Transform::Identity());

/// True when the straight joint-space segment is collision free when sampled
/// at `resolution` (max-norm).
bool segment_valid(const Assembly& assembly, const VecX& a, const VecX& b, const Scene& scene, double resolution,
                   bool self_check, const Transform& base = Transform::Identity());

/// Trapezoidal profile per segment, zero velocity at every waypoint, all
/// joints synchronized along the straight segment. Throws EmptyPath.
Trajectory time_parameterize(const Assembly& assembly, const Path& path, double sample_dt = 0.01);
/// As above; also reports the time at which each waypoint is reached.
Trajectory time_parameterize(const Assembly& assembly, const Path& path, double sample_dt,
                             std::vector<double>* waypoint_times);

struct FeasibilityReport {
    bool in_limits = true;
    bool collision_free = true;
    bool velocity_ok = true;
    bool acceleration_ok = true;
    bool torque_ok = true;
    bool goals_ok = true;

    bool ok() const
    {
        return in_limits && collision_free && velocity_ok && acceleration_ok && torque_ok && goals_ok;
    }
};

FeasibilityReport check_trajectory(const Assembly& assembly, const Task& task, const Trajectory& trajectory,
                                   const PlanOptions& opts);

/// IK witnesses per goal, path planning between them from home, time
/// parameterization and a final feasibility check.
std::optional<Trajectory> solve_task(const Assembly& assembly, const Task& task, const PlanOptions& opts,
                                     std::uint64_t seed);

}  // namespace modsynth
