#pragma once

#include <string>
#include <vector>

#include "modsynth/dynamics.hpp"
#include "modsynth/io.hpp"
#include "modsynth/kinematics.hpp"
#include "modsynth/modlib.hpp"
#include "modsynth/planner.hpp"
#include "modsynth/random.hpp"
#include "modsynth/tasks.hpp"

namespace fixtures {

using namespace modsynth;

inline std::string data_path(const std::string& rel) { return std::string(MODSYNTH_DATA_DIR) + "/" + rel; }

inline const ModuleLibrary& standard()
{
    static const ModuleLibrary lib = load_library(data_path("modules/standard.json"));
    return lib;
}

inline const ModuleLibrary& tiny()
{
    static const ModuleLibrary lib = load_library(data_path("modules/tiny.json"));
    return lib;
}

inline const ModuleLibrary& planar()
{
    static const ModuleLibrary lib = load_library(data_path("modules/planar.json"));
    return lib;
}

// Module ids in the standard library.
inline const std::vector<int> arm6{1, 4, 5, 8, 5, 9, 12, 6, 7, 6, 13};
inline const std::vector<int> arm3{1, 4, 5, 8, 5, 9, 12, 11, 13};
inline const std::vector<int> arm_prismatic{1, 4, 14, 5, 8, 12, 7, 13};
// Planar 2-DoF arm in the y-z plane.
inline const std::vector<int> planar2{1, 2, 3, 2, 3, 4};

inline Assembly build(const ModuleLibrary& lib, const std::vector<int>& ids)
{
    return assemble(lib, std::span<const int>(ids));
}

inline VecX random_q(const Assembly& a, Rng& rng)
{
    VecX q(a.dof());
    for (int i = 0; i < a.dof(); ++i) {
        q[i] = uniform(rng, a.limits().q_lo[i], a.limits().q_hi[i]);
    }
    return q;
}

inline Transform rot_x(double a)
{
    Transform t = Transform::Identity();
    t.linear() = Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix();
    return t;
}

inline JointSpec revolute(const Vec3& axis, double tau_max = 100.0)
{
    JointSpec j;
    j.kind = JointKind::revolute;
    j.axis = axis;
    j.q_limits = {-M_PI, M_PI};
    j.qd_limits = {-1.0, 1.0};
    j.qdd_limits = {-1.0, 1.0};
    j.tau_max = tau_max;
    return j;
}

inline Module base_module(int id, const std::string& type, const Transform& distal = Transform::Identity())
{
    Module m;
    m.id = id;
    m.name = "base";
    m.kind = ModuleKind::base;
    m.bodies.push_back(Body{});
    m.proximal = {"mount", Gender::proximal, Transform::Identity()};
    m.distal = {type, Gender::distal, distal};
    return m;
}

inline Module eef_module(int id, const std::string& type, const Transform& tcp = Transform::Identity())
{
    Module m;
    m.id = id;
    m.name = "eef";
    m.kind = ModuleKind::end_effector;
    m.bodies.push_back(Body{});
    m.proximal = {type, Gender::proximal, rot_x(M_PI)};
    m.distal = {"tool", Gender::distal, tcp};
    return m;
}

inline Module link_module(int id, const std::string& type, const Transform& distal)
{
    Module m;
    m.id = id;
    m.name = "link";
    m.kind = ModuleKind::regular;
    m.bodies.push_back(Body{});
    m.proximal = {type, Gender::proximal, rot_x(M_PI)};
    m.distal = {type, Gender::distal, distal};
    return m;
}

/// One-joint module with an empty first body; the moving body carries `payload`.
inline Module joint_module(int id, const std::string& type, const JointSpec& joint, const Body& payload,
                           const Transform& distal)
{
    Module m;
    m.id = id;
    m.name = "joint";
    m.kind = ModuleKind::regular;
    m.bodies = {Body{}, payload};
    m.joints = {joint};
    m.proximal = {type, Gender::proximal, rot_x(M_PI)};
    m.distal = {type, Gender::distal, distal};
    return m;
}

inline Body point_mass(double mass, const Vec3& at)
{
    Body b;
    b.mass = mass;
    b.com = at;
    return b;
}

/// Single-joint arm: base, joint module, zero-length end effector.
inline ModuleLibrary one_joint_library(const JointSpec& joint, const Body& payload, const Transform& distal)
{
    return ModuleLibrary({base_module(1, "c"), joint_module(2, "c", joint, payload, distal), eef_module(3, "c")});
}

/// Task whose goals are the TCP poses of the given configurations.
inline Task fk_task(const Assembly& a, const std::vector<VecX>& qs, const Tolerances& tol)
{
    Task t;
    t.name = "fk_task";
    t.tol = tol;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        Goal g;
        g.id = "g" + std::to_string(i + 1);
        g.pose = fk(a, qs[i]);
        t.goals.push_back(g);
    }
    return t;
}

}  // namespace fixtures
