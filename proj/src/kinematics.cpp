#include "modsynth/kinematics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "modsynth/errors.hpp"
#include "modsynth/random.hpp"

namespace modsynth {

Transform Pose::to_transform() const
{
    Transform t = Transform::Identity();
    t.linear() = n.normalized().toRotationMatrix();
    t.translation() = p;
    return t;
}

Pose Pose::from_transform(const Transform& t)
{
    Pose out;
    out.p = t.translation();
    out.n = Quat(t.rotation());
    out.n.normalize();
    return out;
}

void Tolerances::validate() const
{
    if (!(t_p > 0.0)) {
        throw Error("position tolerance must be positive");
    }
    if ((t_axis.array() < 0.0).any() || t_axis.maxCoeff() > 1.0) {
        throw Error("axis tolerance components must lie in [0, 1]");
    }
    if (!(phi > 0.0 && phi <= M_PI)) {
        throw Error("phi must lie in (0, pi]");
    }
}

AxisAngle rot(const Quat& n1, const Quat& n2)
{
    Quat d = n1.normalized().conjugate() * n2.normalized();
    if (d.w() < 0.0) {
        d.coeffs() = -d.coeffs();
    }
    const double s = d.vec().norm();
    AxisAngle out;
    out.angle = 2.0 * std::atan2(s, d.w());
    if (out.angle < 1e-12 || s == 0.0) {
        out.axis = Vec3::UnitX();
        out.angle = 0.0;
    } else {
        out.axis = d.vec() / s;
    }
    return out;
}

bool pose_within(const Pose& tcp, const Pose& goal, const Tolerances& tol)
{
    if ((tcp.p - goal.p).norm() > tol.t_p) {
        return false;
    }
    const AxisAngle r = rot(goal.n, tcp.n);
    return ((r.angle * r.axis.cwiseAbs()).array() <= (tol.phi * tol.t_axis).array()).all();
}

namespace {

Transform joint_motion(const ChainJoint& j, double q)
{
    Transform m = Transform::Identity();
    if (j.kind == JointKind::revolute) {
        m.linear() = Eigen::AngleAxisd(q, j.axis).toRotationMatrix();
    } else {
        m.translation() = j.axis * q;
    }
    return m;
}

void check_dim(const Assembly& assembly, const VecX& q)
{
    if (q.size() != assembly.dof()) {
        throw DimensionMismatch(static_cast<std::size_t>(assembly.dof()), static_cast<std::size_t>(q.size()));
    }
}

}  // namespace

ChainState chain_state(const Assembly& assembly, const VecX& q, const Transform& base)
{
    check_dim(assembly, q);
    const Chain& chain = assembly.chain();
    ChainState s;
    s.links.reserve(chain.links.size());
    s.joint_axes.resize(chain.joints.size());
    s.joint_origins.resize(chain.joints.size());
    Transform current = base;
    for (const Link& link : chain.links) {
        current = current * link.origin;
        if (link.joint >= 0) {
            const ChainJoint& j = chain.joints[static_cast<std::size_t>(link.joint)];
            s.joint_axes[static_cast<std::size_t>(link.joint)] = current.linear() * j.axis;
            s.joint_origins[static_cast<std::size_t>(link.joint)] = current.translation();
            current = current * joint_motion(j, q[link.joint]) * link.child;
        }
        s.links.push_back(current);
    }
    s.tcp = current * chain.tcp;
    return s;
}

Pose fk(const Assembly& assembly, const VecX& q, const Transform& base)
{
    return Pose::from_transform(chain_state(assembly, q, base).tcp);
}

namespace {

MatX jacobian_from(const Assembly& assembly, const ChainState& s)
{
    const auto n = static_cast<Eigen::Index>(assembly.dof());
    MatX jac(6, n);
    const Vec3 p = s.tcp.translation();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const Vec3& a = s.joint_axes[idx];
        if (assembly.chain().joints[idx].kind == JointKind::revolute) {
            jac.block<3, 1>(0, i) = a.cross(p - s.joint_origins[idx]);
            jac.block<3, 1>(3, i) = a;
        } else {
            jac.block<3, 1>(0, i) = a;
            jac.block<3, 1>(3, i).setZero();
        }
    }
    return jac;
}

/// Point of the tolerance region nearest to the current TCP, shrunk by
/// `margin` so that a converged iterate satisfies the predicate strictly.
struct TargetError {
    // Position rows in world coordinates, rotation rows in the goal frame.
    Eigen::Matrix<double, 6, 1> e;
    // Rows already inside their tolerance are left free.
    std::array<bool, 6> active{};
    double position = 0.0;
    double angle = 0.0;
};

TargetError target_error(const Transform& tcp, const Pose& goal, const Tolerances& tol)
{
    constexpr double margin = 0.5;
    TargetError out;
    const Vec3 dp = tcp.translation() - goal.p;
    out.position = dp.norm();
    const double allowed = margin * tol.t_p;
    Vec3 ep = Vec3::Zero();
    if (out.position > allowed) {
        ep = -dp * (1.0 - allowed / out.position);
        out.active[0] = out.active[1] = out.active[2] = true;
    }

    const Quat n_tcp(tcp.rotation());
    const AxisAngle r = rot(goal.n, n_tcp);
    out.angle = r.angle;
    const Vec3 w = r.angle * r.axis;  // goal frame
    const Vec3 bound = margin * tol.phi * tol.t_axis;
    const Vec3 w_target = w.cwiseMax(-bound).cwiseMin(bound);
    Mat3 r_target = goal.n.toRotationMatrix();
    if (const double wn = w_target.norm(); wn > 0.0) {
        r_target = r_target * Eigen::AngleAxisd(wn, w_target / wn).toRotationMatrix();
    }
    const Eigen::AngleAxisd err(Mat3(r_target * tcp.rotation().transpose()));
    Vec3 er = goal.n.toRotationMatrix().transpose() * (err.angle() * err.axis());
    for (int k = 0; k < 3; ++k) {
        out.active[static_cast<std::size_t>(3 + k)] = std::abs(w[k]) > bound[k];
        if (!out.active[static_cast<std::size_t>(3 + k)]) {
            er[k] = 0.0;
        }
    }
    out.e.head<3>() = ep;
    out.e.tail<3>() = er;
    return out;
}

}  // namespace

MatX jacobian(const Assembly& assembly, const VecX& q, const Transform& base)
{
    return jacobian_from(assembly, chain_state(assembly, q, base));
}

IkReport ik_detailed(const Assembly& assembly, const Pose& goal, const Tolerances& tol, const IkOptions& opts,
                     std::uint64_t seed, const ConfigPredicate& reject, const Transform& base)
{
    IkReport report;
    const auto n = static_cast<Eigen::Index>(assembly.dof());
    const auto& lim = assembly.limits();
    Rng rng(seed);
    double best_score = std::numeric_limits<double>::infinity();

    auto note_best = [&](const VecX& q, const TargetError& te) {
        const double score = te.position + te.angle;
        if (score < best_score) {
            best_score = score;
            report.best = q;
            report.position_error = te.position;
            report.angular_error = te.angle;
        }
    };

    if (n == 0) {
        const VecX q(0);
        const ChainState s = chain_state(assembly, q, base);
        note_best(q, target_error(s.tcp, goal, tol));
        report.attempts = 1;
        if (pose_within(Pose::from_transform(s.tcp), goal, tol) && !(reject && reject(q))) {
            report.solution = q;
        }
        return report;
    }

    const int attempts = std::max(opts.max_restarts, 1);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        VecX q(n);
        if (attempt == 0) {
            q = assembly.clamp(opts.initial_guess && opts.initial_guess->size() == n ? *opts.initial_guess
                                                                                     : assembly.home());
        } else {
            for (Eigen::Index i = 0; i < n; ++i) {
                q[i] = uniform(rng, lim.q_lo[i], lim.q_hi[i]);
            }
        }
        ++report.attempts;
        double damping = opts.initial_damping;
        ChainState state = chain_state(assembly, q, base);
        TargetError err = target_error(state.tcp, goal, tol);
        note_best(q, err);
        for (int it = 0; it <= opts.max_iterations; ++it) {
            if (pose_within(Pose::from_transform(state.tcp), goal, tol)) {
                if (reject && reject(q)) {
                    break;
                }
                report.solution = q;
                report.best = q;
                report.position_error = err.position;
                report.angular_error = err.angle;
                return report;
            }
            if (it == opts.max_iterations) {
                break;
            }
            MatX jac = jacobian_from(assembly, state);
            jac.bottomRows<3>() = goal.n.toRotationMatrix().transpose() * jac.bottomRows<3>();
            std::vector<Eigen::Index> rows;
            for (Eigen::Index r = 0; r < 6; ++r) {
                if (err.active[static_cast<std::size_t>(r)]) {
                    rows.push_back(r);
                }
            }
            if (rows.empty()) {
                break;
            }
            const MatX js = jac(rows, Eigen::all);
            const VecX es = err.e(rows);
            const MatX jjt = js * js.transpose() + damping * MatX::Identity(js.rows(), js.rows());
            const VecX dq = js.transpose() * jjt.ldlt().solve(es);
            const VecX q_new = assembly.clamp(q + dq);
            const ChainState s_new = chain_state(assembly, q_new, base);
            const TargetError e_new = target_error(s_new.tcp, goal, tol);
            if (e_new.e.norm() < err.e.norm()) {
                q = q_new;
                state = s_new;
                err = e_new;
                note_best(q, err);
                damping = std::max(damping * 0.5, 1e-9);
            } else {
                damping = std::min(damping * 2.0, 1e6);
                if (damping >= 1e6) {
                    break;
                }
            }
        }
    }
    return report;
}

std::optional<VecX> ik(const Assembly& assembly, const Pose& goal, const Tolerances& tol, const IkOptions& opts,
                       std::uint64_t seed, const ConfigPredicate& reject, const Transform& base)
{
    return ik_detailed(assembly, goal, tol, opts, seed, reject, base).solution;
}

}  // namespace modsynth
