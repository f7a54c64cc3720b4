#include "modsynth/fitness.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "modsynth/geometry.hpp"
#include "modsynth/random.hpp"

namespace modsynth {

namespace {

template <typename T>
Ordering compare_field(const std::optional<T>& a, const std::optional<T>& b)
{
    // An unset field was never reached and ranks below every value.
    if (!a && !b) {
        return Ordering::equal;
    }
    if (!a) {
        return Ordering::less;
    }
    if (!b) {
        return Ordering::greater;
    }
    if (*a < *b) {
        return Ordering::less;
    }
    if (*b < *a) {
        return Ordering::greater;
    }
    return Ordering::equal;
}

double elapsed_ms(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

Ordering lex_compare(const FitnessVector& a, const FitnessVector& b)
{
    if (a.f1 != b.f1) {
        return a.f1 < b.f1 ? Ordering::less : Ordering::greater;
    }
    if (auto o = compare_field(a.f2, b.f2); o != Ordering::equal) {
        return o;
    }
    if (auto o = compare_field(a.f3, b.f3); o != Ordering::equal) {
        return o;
    }
    return compare_field(a.f4, b.f4);
}

std::string to_string(const FitnessVector& f)
{
    std::ostringstream out;
    out << '(' << f.f1;
    auto field = [&](const auto& v) {
        out << ", ";
        if (v) {
            out << *v;
        } else {
            out << '_';
        }
    };
    field(f.f2);
    field(f.f3);
    field(f.f4);
    out << ')';
    return out.str();
}

double max_connector_distance(const Module& module)
{
    const Vec3 proximal = module.proximal.frame.translation();
    if (!module.has_joint()) {
        return (module.distal.frame.translation() - proximal).norm();
    }
    const std::size_t k = module.joint_count();
    const int per_joint = std::max(2, static_cast<int>(std::floor(std::pow(101.0, 1.0 / static_cast<double>(k)))));
    std::vector<int> index(k, 0);
    double best = 0.0;
    while (true) {
        Transform body = Transform::Identity();
        for (std::size_t j = 0; j < k; ++j) {
            const JointSpec& js = module.joints[j];
            const double s = static_cast<double>(index[j]) / (per_joint - 1);
            const double q = js.q_limits.lo + s * (js.q_limits.hi - js.q_limits.lo);
            Transform motion = Transform::Identity();
            if (js.kind == JointKind::revolute) {
                motion.linear() = Eigen::AngleAxisd(q, js.axis.normalized()).toRotationMatrix();
            } else {
                motion.translation() = js.axis.normalized() * q;
            }
            body = body * js.parent_frame * motion * js.child_frame;
        }
        best = std::max(best, ((body * module.distal.frame).translation() - proximal).norm());
        std::size_t j = 0;
        while (j < k && ++index[j] == per_joint) {
            index[j++] = 0;
        }
        if (j == k) {
            break;
        }
    }
    return best;
}

int f1_reach_upper_bound(const Assembly& assembly, const Task& task)
{
    double reach = 0.0;
    for (const auto& m : assembly.modules()) {
        reach += max_connector_distance(*m);
    }
    const Transform to_base = task.base_pose.inverse();
    double farthest = 0.0;
    for (const auto& g : task.goals) {
        farthest = std::max(farthest, (to_base * g.pose.p).norm());
    }
    return reach >= farthest ? 1 : 0;
}

std::optional<VecX> reach_witness(const Assembly& assembly, const Task& task, const EvalOptions& opts,
                                  std::uint64_t seed, std::size_t goal)
{
    return ik(assembly, task.goals[goal].pose, task.tolerances_for(goal), opts.plan.ik,
              derive_seed(derive_seed(seed, {2}), {goal}), {}, task.base_pose);
}

std::optional<VecX> collision_free_witness(const Assembly& assembly, const Task& task, const EvalOptions& opts,
                                           std::uint64_t seed, std::size_t goal, const std::optional<VecX>* reach)
{
    const std::optional<VecX> own = reach == nullptr ? reach_witness(assembly, task, opts, seed, goal) : std::nullopt;
    const std::optional<VecX>& start = reach == nullptr ? own : *reach;
    if (!start) {
        return std::nullopt;
    }
    const ConfigPredicate colliding = [&](const VecX& q) {
        return in_collision(assembly, q, task.scene, opts.self_collision_f3, task.base_pose);
    };
    if (!colliding(*start)) {
        return start;
    }
    IkOptions ik_opts = opts.plan.ik;
    ik_opts.initial_guess = start;
    return ik(assembly, task.goals[goal].pose, task.tolerances_for(goal), ik_opts,
              derive_seed(derive_seed(seed, {3}), {goal}), colliding, task.base_pose);
}

int f2_reachable_goals(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed)
{
    int count = 0;
    for (std::size_t i = 0; i < task.goals.size(); ++i) {
        count += reach_witness(assembly, task, opts, seed, i) ? 1 : 0;
    }
    return count;
}

int f3_collision_free_goals(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed)
{
    int count = 0;
    for (std::size_t i = 0; i < task.goals.size(); ++i) {
        count += collision_free_witness(assembly, task, opts, seed, i) ? 1 : 0;
    }
    return count;
}

double f4_cost(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed,
               std::optional<Trajectory>* trajectory_out)
{
    auto traj = solve_task(assembly, task, opts.plan, derive_seed(seed, {4}));
    if (!traj) {
        if (trajectory_out != nullptr) {
            trajectory_out->reset();
        }
        return -std::numeric_limits<double>::infinity();
    }
    const double cost = opts.weights.task_cost(assembly.dof(), assembly.module_count(), traj->t_max());
    if (trajectory_out != nullptr) {
        *trajectory_out = std::move(traj);
    }
    return -cost;
}

Evaluation evaluate(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed)
{
    Evaluation ev;
    const int goals = static_cast<int>(task.goals.size());
    auto& f = ev.fitness;

    auto start = std::chrono::steady_clock::now();
    f.f1 = f1_reach_upper_bound(assembly, task);
    f.depth = 1;
    ev.stage_ms[0] = elapsed_ms(start);
    if (f.f1 < 1 && !opts.force_full) {
        return ev;
    }

    start = std::chrono::steady_clock::now();
    std::vector<std::optional<VecX>> reach(task.goals.size());
    int reached_goals = 0;
    for (std::size_t i = 0; i < reach.size(); ++i) {
        reach[i] = reach_witness(assembly, task, opts, seed, i);
        reached_goals += reach[i] ? 1 : 0;
    }
    f.f2 = reached_goals;
    f.depth = 2;
    ev.stage_ms[1] = elapsed_ms(start);
    if (*f.f2 < goals && !opts.force_full) {
        return ev;
    }

    start = std::chrono::steady_clock::now();
    int free_goals = 0;
    for (std::size_t i = 0; i < reach.size(); ++i) {
        free_goals += collision_free_witness(assembly, task, opts, seed, i, &reach[i]) ? 1 : 0;
    }
    f.f3 = free_goals;
    f.depth = 3;
    ev.stage_ms[2] = elapsed_ms(start);
    if (*f.f3 < goals && !opts.force_full) {
        return ev;
    }

    start = std::chrono::steady_clock::now();
    f.f4 = f4_cost(assembly, task, opts, seed, &ev.trajectory);
    f.depth = 4;
    ev.stage_ms[3] = elapsed_ms(start);
    if (std::isfinite(*f.f4)) {
        ev.cost = -*f.f4;
    }
    return ev;
}

std::size_t IdSequenceHash::operator()(const std::vector<int>& ids) const noexcept
{
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (int id : ids) {
        h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(id)));
    }
    return static_cast<std::size_t>(h);
}

std::shared_ptr<const Assembly> ModelCache::get(const ModuleLibrary& library, const std::vector<int>& ids)
{
    if (auto hit = cache_.get(ids)) {
        return *hit;
    }
    auto model = std::make_shared<const Assembly>(assemble(library, std::span<const int>(ids)));
    cache_.put(ids, model);
    return model;
}

Evaluation cached_evaluate(ModelCache& cache, const ModuleLibrary& library, const std::vector<int>& ids,
                           const Task& task, const EvalOptions& opts, std::uint64_t seed)
{
    return evaluate(*cache.get(library, ids), task, opts, seed);
}

}  // namespace modsynth
