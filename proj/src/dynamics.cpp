#include "modsynth/dynamics.hpp"

#include <cmath>

#include "modsynth/errors.hpp"
#include "modsynth/kinematics.hpp"
#include "modsynth/planner.hpp"

namespace modsynth {

// Newton-Euler in world coordinates. Gravity enters as an upward
// acceleration of the base; moments are accumulated about the world origin
// and shifted onto each joint in the backward pass.
VecX inverse_dynamics(const Assembly& assembly, const DynState& state, const Transform& base)
{
    const auto n = static_cast<Eigen::Index>(assembly.dof());
    for (const VecX* v : {&state.q, &state.qd, &state.qdd}) {
        if (v->size() != n) {
            throw DimensionMismatch(static_cast<std::size_t>(n), static_cast<std::size_t>(v->size()));
        }
    }
    const Chain& chain = assembly.chain();
    const ChainState cs = chain_state(assembly, state.q, base);
    const std::size_t links = chain.links.size();

    std::vector<Vec3> force(links), moment(links);
    Vec3 omega = Vec3::Zero();
    Vec3 alpha = Vec3::Zero();
    Vec3 acc = -state.gravity;  // acceleration of the previous frame origin
    Vec3 origin = base.translation();

    for (std::size_t i = 0; i < links; ++i) {
        const Link& link = chain.links[i];
        const Vec3 o = cs.links[i].translation();
        if (link.joint < 0) {
            const Vec3 r = o - origin;
            acc = acc + alpha.cross(r) + omega.cross(omega.cross(r));
        } else {
            const auto j = static_cast<std::size_t>(link.joint);
            const Vec3& a = cs.joint_axes[j];
            const double qd = state.qd[link.joint];
            const double qdd = state.qdd[link.joint];
            if (chain.joints[j].kind == JointKind::revolute) {
                const Vec3 p = cs.joint_origins[j];
                const Vec3 rp = p - origin;
                const Vec3 acc_p = acc + alpha.cross(rp) + omega.cross(omega.cross(rp));
                alpha = alpha + a * qdd + omega.cross(a * qd);
                omega = omega + a * qd;
                const Vec3 r = o - p;
                acc = acc_p + alpha.cross(r) + omega.cross(omega.cross(r));
            } else {
                const Vec3 r = o - origin;
                acc = acc + alpha.cross(r) + omega.cross(omega.cross(r)) + 2.0 * omega.cross(a * qd) + a * qdd;
            }
        }
        origin = o;

        const Body& body = link.body;
        if (body.mass == 0.0 && body.inertia.isZero()) {
            force[i].setZero();
            moment[i].setZero();
            continue;
        }
        const Mat3 rot = cs.links[i].linear();
        const Vec3 c = cs.links[i] * body.com;
        const Vec3 rc = c - o;
        const Vec3 acc_c = acc + alpha.cross(rc) + omega.cross(omega.cross(rc));
        const Mat3 inertia = rot * body.inertia * rot.transpose();
        force[i] = body.mass * acc_c;
        moment[i] = inertia * alpha + omega.cross(inertia * omega) + c.cross(force[i]);
    }

    VecX tau = VecX::Zero(n);
    Vec3 f_total = Vec3::Zero();
    Vec3 m_total = Vec3::Zero();
    for (std::size_t k = links; k-- > 0;) {
        f_total += force[k];
        m_total += moment[k];
        const Link& link = chain.links[k];
        if (link.joint < 0) {
            continue;
        }
        const auto j = static_cast<std::size_t>(link.joint);
        const Vec3& a = cs.joint_axes[j];
        if (chain.joints[j].kind == JointKind::revolute) {
            tau[link.joint] = a.dot(m_total - cs.joint_origins[j].cross(f_total));
        } else {
            tau[link.joint] = a.dot(f_total);
        }
    }
    return tau;
}

bool torque_feasible(const Assembly& assembly, const Trajectory& trajectory, double dt_check, const Vec3& gravity,
                     const Transform& base)
{
    if (!(dt_check > 0.0)) {
        throw Error("dt_check must be positive");
    }
    if (trajectory.size() == 0) {
        return true;
    }
    const VecX& tau_max = assembly.limits().tau_max;
    const double t_max = trajectory.t_max();
    auto ok_at = [&](double t) {
        DynState s = trajectory.state_at(t);
        s.gravity = gravity;
        const VecX tau = inverse_dynamics(assembly, s, base);
        return (tau.cwiseAbs().array() <= tau_max.array()).all();
    };
    const auto steps = static_cast<long>(std::floor(t_max / dt_check + 1e-9));
    for (long k = 0; k <= steps; ++k) {
        if (!ok_at(static_cast<double>(k) * dt_check)) {
            return false;
        }
    }
    return ok_at(t_max);
}

}  // namespace modsynth
