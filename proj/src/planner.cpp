#include "modsynth/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "modsynth/errors.hpp"
#include "modsynth/random.hpp"

namespace modsynth {

DynState Trajectory::state_at(double time) const
{
    DynState s;
    if (t.empty()) {
        return s;
    }
    if (time >= t.back()) {
        s.q = q.back();
        s.qd = qd.back();
        s.qdd = qdd.back();
        return s;
    }
    time = std::max(time, 0.0);
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - t.begin() - 1, 0));
    const double tau = time - t[k];
    s.q = q[k] + qd[k] * tau + 0.5 * qdd[k] * tau * tau;
    s.qd = qd[k] + qdd[k] * tau;
    s.qdd = qdd[k];
    return s;
}

bool segment_valid(const Assembly& assembly, const VecX& a, const VecX& b, const Scene& scene, double resolution,
                   bool self_check, const Transform& base)
{
    const double span = (b - a).cwiseAbs().maxCoeff();
    const int steps = std::max(1, static_cast<int>(std::ceil(span / resolution)));
    // Endpoints first; they fail most often.
    if (in_collision(assembly, b, scene, self_check, base)) {
        return false;
    }
    for (int i = 0; i < steps; ++i) {
        const double s = static_cast<double>(i) / steps;
        if (in_collision(assembly, a + s * (b - a), scene, self_check, base)) {
            return false;
        }
    }
    return true;
}

namespace {

struct Tree {
    std::vector<VecX> q;
    std::vector<int> parent;

    std::size_t nearest(const VecX& x) const
    {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double d = (q[i] - x).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    std::vector<VecX> branch(std::size_t leaf) const
    {
        std::vector<VecX> out;
        for (int i = static_cast<int>(leaf); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
            out.push_back(q[static_cast<std::size_t>(i)]);
        }
        return out;  // leaf to root
    }
};

enum class Extend { trapped, advanced, reached };

}  // namespace

std::optional<Path> plan_path(const Assembly& assembly, const VecX& q_start, const VecX& q_goal, const Scene& scene,
                              const PlanOptions& opts, std::uint64_t seed, const Transform& base)
{
    const bool self = opts.self_collision;
    for (const VecX* q : {&q_start, &q_goal}) {
        if (q->size() != assembly.dof() || !assembly.within_limits(*q, 1e-12)) {
            throw InvalidEndpoint("path endpoint outside the joint limits");
        }
        if (in_collision(assembly, *q, scene, self, base)) {
            throw InvalidEndpoint("path endpoint in collision");
        }
    }
    if ((q_goal - q_start).norm() < 1e-12) {
        return Path{{q_start}};
    }
    auto valid = [&](const VecX& a, const VecX& b) {
        return segment_valid(assembly, a, b, scene, opts.edge_resolution, self, base);
    };
    if (valid(q_start, q_goal)) {
        return Path{{q_start, q_goal}};
    }

    Rng rng(seed);
    const auto& lim = assembly.limits();
    const auto n = q_start.size();
    const auto started = std::chrono::steady_clock::now();
    auto timed_out = [&] {
        if (!opts.use_wall_clock) {
            return false;
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        return elapsed.count() > opts.timeout_s;
    };

    Tree ta{{q_start}, {-1}};
    Tree tb{{q_goal}, {-1}};
    bool a_is_start = true;

    auto extend = [&](Tree& tree, const VecX& target) {
        const std::size_t near = tree.nearest(target);
        const VecX& from = tree.q[near];
        const VecX dir = target - from;
        const double dist = dir.norm();
        const bool reach = dist <= opts.extend_step;
        const VecX next = reach ? target : VecX(from + dir * (opts.extend_step / dist));
        if (!valid(from, next)) {
            return Extend::trapped;
        }
        tree.q.push_back(next);
        tree.parent.push_back(static_cast<int>(near));
        return reach ? Extend::reached : Extend::advanced;
    };

    std::optional<Path> found;
    for (int iter = 0; iter < opts.max_iterations && !timed_out(); ++iter) {
        VecX sample(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            sample[i] = uniform(rng, lim.q_lo[i], lim.q_hi[i]);
        }
        if (extend(ta, sample) != Extend::trapped) {
            const VecX target = ta.q.back();
            Extend e = Extend::advanced;
            while (e == Extend::advanced) {
                e = extend(tb, target);
            }
            if (e == Extend::reached) {
                std::vector<VecX> a = ta.branch(ta.q.size() - 1);
                std::vector<VecX> b = tb.branch(tb.q.size() - 1);
                std::reverse(a.begin(), a.end());
                a.insert(a.end(), b.begin() + 1, b.end());  // shared junction
                if (!a_is_start) {
                    std::reverse(a.begin(), a.end());
                }
                found = Path{std::move(a)};
                break;
            }
        }
        if (ta.q.size() > tb.q.size()) {
            std::swap(ta, tb);
            a_is_start = !a_is_start;
        }
    }
    if (!found) {
        return std::nullopt;
    }

    auto& w = found->waypoints;
    for (int i = 0; i < opts.shortcut_iterations && w.size() > 2; ++i) {
        std::size_t a = uniform_index(rng, w.size());
        std::size_t b = uniform_index(rng, w.size());
        if (a > b) {
            std::swap(a, b);
        }
        if (b < a + 2) {
            continue;
        }
        if (valid(w[a], w[b])) {
            w.erase(w.begin() + static_cast<std::ptrdiff_t>(a + 1), w.begin() + static_cast<std::ptrdiff_t>(b));
        }
    }
    return found;
}

namespace {

/// Rest-to-rest trapezoidal profile of the path parameter s from 0 to 1.
struct Profile {
    double accel = 0.0;
    double peak = 0.0;
    double t_acc = 0.0;
    double t_cruise = 0.0;

    double duration() const { return 2.0 * t_acc + t_cruise; }

    // s, ds/dt, d2s/dt2 at local time tau, right-continuous. Phase
    // boundaries are recomputed as start + offset, so allow for round-off.
    void eval(double tau, double& s, double& sd, double& sdd) const
    {
        constexpr double eps = 1e-12;
        if (tau < t_acc - eps) {
            sdd = accel;
            sd = accel * tau;
            s = 0.5 * accel * tau * tau;
        } else if (tau < t_acc + t_cruise - eps) {
            sdd = 0.0;
            sd = peak;
            s = 0.5 * accel * t_acc * t_acc + peak * (tau - t_acc);
        } else {
            const double td = std::clamp(tau - t_acc - t_cruise, 0.0, t_acc);
            sdd = -accel;
            sd = std::max(peak - accel * td, 0.0);
            s = std::min(0.5 * accel * t_acc * t_acc + peak * t_cruise + peak * td - 0.5 * accel * td * td, 1.0);
        }
    }
};

Profile make_profile(const Assembly& assembly, const VecX& delta)
{
    const auto& lim = assembly.limits();
    double vs = std::numeric_limits<double>::infinity();
    double as = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < delta.size(); ++j) {
        const double d = std::abs(delta[j]);
        if (d == 0.0) {
            continue;
        }
        vs = std::min(vs, std::min(-lim.qd_lo[j], lim.qd_hi[j]) / d);
        as = std::min(as, std::min(-lim.qdd_lo[j], lim.qdd_hi[j]) / d);
    }
    Profile p;
    if (!std::isfinite(vs)) {
        return p;  // zero-length segment
    }
    p.accel = as;
    if (vs * vs / as >= 1.0) {
        p.t_acc = std::sqrt(1.0 / as);
        p.peak = as * p.t_acc;
    } else {
        p.t_acc = vs / as;
        p.peak = vs;
        p.t_cruise = (1.0 - vs * vs / as) / vs;
    }
    return p;
}

}  // namespace

Trajectory time_parameterize(const Assembly& assembly, const Path& path, double sample_dt,
                             std::vector<double>* waypoint_times)
{
    if (path.waypoints.empty()) {
        throw EmptyPath();
    }
    const auto& w = path.waypoints;
    const std::size_t segments = w.size() - 1;
    std::vector<Profile> profiles(segments);
    std::vector<double> start(segments + 1, 0.0);
    std::vector<double> boundaries{0.0};
    for (std::size_t i = 0; i < segments; ++i) {
        profiles[i] = make_profile(assembly, w[i + 1] - w[i]);
        start[i + 1] = start[i] + profiles[i].duration();
        boundaries.push_back(start[i] + profiles[i].t_acc);
        boundaries.push_back(start[i] + profiles[i].t_acc + profiles[i].t_cruise);
        boundaries.push_back(start[i + 1]);
    }
    if (waypoint_times != nullptr) {
        *waypoint_times = start;
    }
    const double t_max = start.back();

    std::vector<double> times = boundaries;
    for (long k = 0; static_cast<double>(k) * sample_dt < t_max; ++k) {
        times.push_back(static_cast<double>(k) * sample_dt);
    }
    std::sort(times.begin(), times.end());
    std::vector<double> unique;
    for (double t : times) {
        if (unique.empty() || t - unique.back() > 1e-9) {
            unique.push_back(t);
        } else if (std::find(boundaries.begin(), boundaries.end(), t) != boundaries.end()) {
            unique.back() = t;  // keep exact boundary times
        }
    }
    if (unique.back() < t_max) {
        unique.push_back(t_max);
    }

    Trajectory traj;
    const auto n = w.front().size();
    for (std::size_t k = 0; k < unique.size(); ++k) {
        const double t = unique[k];
        const bool last = k + 1 == unique.size();
        VecX q, qd, qdd;
        if (last) {
            // Final sample: at rest on the last waypoint, decelerating.
            q = w.back();
            qd = VecX::Zero(n);
            qdd = VecX::Zero(n);
            for (std::size_t i = segments; i-- > 0;) {
                if (profiles[i].duration() > 0.0) {
                    qdd = -profiles[i].accel * (w[i + 1] - w[i]);
                    break;
                }
            }
        } else {
            // Last segment that starts at or before t and has positive length.
            std::size_t seg = 0;
            for (std::size_t i = 0; i < segments; ++i) {
                if (start[i] <= t && profiles[i].duration() > 0.0) {
                    seg = i;
                }
            }
            double s = 0.0, sd = 0.0, sdd = 0.0;
            profiles[seg].eval(t - start[seg], s, sd, sdd);
            const VecX delta = w[seg + 1] - w[seg];
            q = w[seg] + s * delta;
            qd = sd * delta;
            qdd = sdd * delta;
        }
        traj.t.push_back(t);
        traj.q.push_back(std::move(q));
        traj.qd.push_back(std::move(qd));
        traj.qdd.push_back(std::move(qdd));
    }
    return traj;
}

Trajectory time_parameterize(const Assembly& assembly, const Path& path, double sample_dt)
{
    return time_parameterize(assembly, path, sample_dt, nullptr);
}

FeasibilityReport check_trajectory(const Assembly& assembly, const Task& task, const Trajectory& traj,
                                   const PlanOptions& opts)
{
    FeasibilityReport r;
    const auto& lim = assembly.limits();
    constexpr double slack = 1e-9;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        r.in_limits = r.in_limits && assembly.within_limits(traj.q[k], slack);
        r.velocity_ok = r.velocity_ok && ((traj.qd[k] - lim.qd_lo).array() >= -slack).all() &&
                        ((lim.qd_hi - traj.qd[k]).array() >= -slack).all();
        r.acceleration_ok = r.acceleration_ok && ((traj.qdd[k] - lim.qdd_lo).array() >= -slack).all() &&
                            ((lim.qdd_hi - traj.qdd[k]).array() >= -slack).all();
        if (r.collision_free && in_collision(assembly, traj.q[k], task.scene, opts.self_collision, task.base_pose)) {
            r.collision_free = false;
        }
    }
    r.torque_ok = torque_feasible(assembly, traj, opts.torque_dt, opts.gravity, task.base_pose);
    r.goals_ok = all_goals_reached(assembly, traj, task);
    return r;
}

std::optional<Trajectory> solve_task(const Assembly& assembly, const Task& task, const PlanOptions& opts,
                                     std::uint64_t seed)
{
    if (task.goals.empty()) {
        return std::nullopt;
    }
    const Transform& base = task.base_pose;
    const ConfigPredicate colliding = [&](const VecX& q) {
        return in_collision(assembly, q, task.scene, opts.self_collision, base);
    };

    const VecX home = assembly.home();
    std::vector<VecX> witnesses;
    VecX previous = home;
    for (std::size_t i = 0; i < task.goals.size(); ++i) {
        IkOptions ik_opts = opts.ik;
        ik_opts.initial_guess = previous;
        auto w = ik(assembly, task.goals[i].pose, task.tolerances_for(i), ik_opts, derive_seed(seed, {1, i}),
                    colliding, base);
        if (!w) {
            return std::nullopt;
        }
        witnesses.push_back(*w);
        previous = *w;
    }

    // A colliding home configuration cannot start a valid trajectory; the
    // robot then starts on the first witness.
    const bool from_home = !colliding(home);
    std::vector<VecX> full{from_home ? home : witnesses.front()};
    std::vector<std::size_t> witness_index;
    for (std::size_t i = 0; i < witnesses.size(); ++i) {
        if (i == 0 && !from_home) {
            witness_index.push_back(0);
            continue;
        }
        std::optional<Path> p;
        try {
            p = plan_path(assembly, full.back(), witnesses[i], task.scene, opts, derive_seed(seed, {2, i}), base);
        } catch (const InvalidEndpoint&) {
            return std::nullopt;
        }
        if (!p) {
            return std::nullopt;
        }
        full.insert(full.end(), p->waypoints.begin() + 1, p->waypoints.end());
        witness_index.push_back(full.size() - 1);
    }

    std::vector<double> times;
    Trajectory traj = time_parameterize(assembly, Path{full}, opts.sample_dt, &times);
    for (std::size_t idx : witness_index) {
        traj.goal_times.push_back(times[idx]);
    }
    if (!check_trajectory(assembly, task, traj, opts).ok()) {
        return std::nullopt;
    }
    return traj;
}

}  // namespace modsynth
