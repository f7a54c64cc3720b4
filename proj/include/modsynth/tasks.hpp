#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modsynth/geometry.hpp"
#include "modsynth/kinematics.hpp"

namespace modsynth {

struct Trajectory;

struct Goal {
    std::string id;
    Pose pose;
    std::optional<Tolerances> tolerances;  // per-goal override
};

struct Task {
    std::string name;
    std::vector<Goal> goals;
    Tolerances tol;
    Scene scene;
    Transform base_pose = Transform::Identity();

    const Tolerances& tolerances_for(std::size_t goal) const;
};

bool reached(const Assembly& assembly, const VecX& q, const Goal& goal, const Tolerances& tol,
             const Transform& base = Transform::Identity());

/// Ordered-goal predicate over the trajectory samples; the last goal must
/// hold at t_max.
bool all_goals_reached(const Assembly& assembly, const Trajectory& trajectory, const Task& task);

Task generate_synthetic1(int d, std::uint64_t seed);
Task generate_synthetic2(int d, std::uint64_t seed);

bool plausibly_solvable(const Task& task, double reach_estimate);

enum class TolerancePreset { sphere_like, partially_symmetric, arbitrary };

Tolerances tolerance_preset(TolerancePreset preset);
std::optional<TolerancePreset> parse_tolerance_preset(const std::string& name);

}  // namespace modsynth
