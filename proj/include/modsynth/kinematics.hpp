#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "modsynth/modlib.hpp"
#include "modsynth/types.hpp"

namespace modsynth {

struct Pose {
    Vec3 p = Vec3::Zero();
    Quat n = Quat::Identity();

    Transform to_transform() const;
    static Pose from_transform(const Transform& t);
};

struct AxisAngle {
    Vec3 axis = Vec3::UnitX();
    double angle = 0.0;
};

/// Position tolerance t_p and the orientation tolerance <t_axis, phi>.
struct Tolerances {
    double t_p = 1e-3;
    Vec3 t_axis = Vec3::Ones();
    double phi = M_PI / 360.0;

    void validate() const;
};

/// Relative rotation n1^-1 * n2 as a unit axis and an angle in [0, pi].
AxisAngle rot(const Quat& n1, const Quat& n2);

/// The goal predicate on poses: position within t_p and theta * |e| <= phi * t_axis.
bool pose_within(const Pose& tcp, const Pose& goal, const Tolerances& tol);

/// Link frames, joint axes and origins in world coordinates for one configuration.
struct ChainState {
    std::vector<Transform> links;
    std::vector<Vec3> joint_axes;
    std::vector<Vec3> joint_origins;
    Transform tcp = Transform::Identity();
};

ChainState chain_state(const Assembly& assembly, const VecX& q, const Transform& base = Transform::Identity());

Pose fk(const Assembly& assembly, const VecX& q, const Transform& base = Transform::Identity());

/// Geometric 6 x n_J Jacobian at the TCP in world coordinates; rows are
/// linear velocity then angular velocity.
MatX jacobian(const Assembly& assembly, const VecX& q, const Transform& base = Transform::Identity());

struct IkOptions {
    int max_restarts = 20;
    int max_iterations = 150;
    double initial_damping = 1e-2;
    /// Start of the first attempt; the home configuration if unset.
    std::optional<VecX> initial_guess;
};

using ConfigPredicate = std::function<bool(const VecX&)>;

struct IkReport {
    std::optional<VecX> solution;
    VecX best;                    // lowest-residual configuration seen
    double position_error = 0.0;  // residual of `best`
    double angular_error = 0.0;
    int attempts = 0;
};

/// Damped least squares with random restarts. Returns q in the joint limits
/// with pose_within(fk(q), goal, tol) and !reject(q), or nothing.
std::optional<VecX> ik(const Assembly& assembly, const Pose& goal, const Tolerances& tol, const IkOptions& opts,
                       std::uint64_t seed, const ConfigPredicate& reject = {},
                       const Transform& base = Transform::Identity());

IkReport ik_detailed(const Assembly& assembly, const Pose& goal, const Tolerances& tol, const IkOptions& opts,
                     std::uint64_t seed, const ConfigPredicate& reject = {},
                     const Transform& base = Transform::Identity());

}  // namespace modsynth
