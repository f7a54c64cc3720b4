#include "doctest.h"
#include "fixtures.hpp"

#include "modsynth/evolve.hpp"
#include "modsynth/fitness.hpp"

using namespace modsynth;
using fixtures::build;

namespace {

FitnessVector fv(int f1, std::optional<int> f2 = {}, std::optional<int> f3 = {}, std::optional<double> f4 = {})
{
    FitnessVector f;
    f.f1 = f1;
    f.f2 = f2;
    f.f3 = f3;
    f.f4 = f4;
    f.depth = f4 ? 4 : f3 ? 3 : f2 ? 2 : 1;
    return f;
}

EvalOptions quick_options()
{
    EvalOptions o;
    o.plan.use_wall_clock = false;
    return o;
}

Task single_goal(const Vec3& p)
{
    Task t;
    Goal g;
    g.id = "g";
    g.pose.p = p;
    t.goals = {g};
    return t;
}

// Two-link planar pocket: the goal position is free, both elbow branches are blocked.
struct Pocket {
    Assembly arm = build(fixtures::planar(), fixtures::planar2);
    Task task;
    VecX q_star = (VecX(2) << 0.6, 1.0).finished();
};

Pocket make_pocket()
{
    Pocket p;
    const ChainState s = chain_state(p.arm, p.q_star);
    const Vec3 shoulder = s.joint_origins[0];
    const Vec3 elbow = s.joint_origins[1];
    const Vec3 tcp = s.tcp.translation();
    // Reflect the elbow across the shoulder-TCP line for the other branch.
    const Vec3 u = (tcp - shoulder).normalized();
    const Vec3 rel = elbow - shoulder;
    const Vec3 mirrored = shoulder + 2.0 * rel.dot(u) * u - rel;
    Goal g;
    g.id = "pocket";
    g.pose.p = tcp;
    p.task.goals = {g};
    p.task.tol = Tolerances{5e-3, Vec3::Ones(), M_PI};
    p.task.scene.obstacles = {Primitive::sphere(0.06, translation(elbow)), Primitive::sphere(0.06, translation(mirrored))};
    return p;
}

}  // namespace

TEST_CASE("lexicographic comparison")
{
    CHECK(lex_compare(fv(1, 3, 2), fv(1, 3, 3)) == Ordering::less);
    CHECK(lex_compare(fv(0), fv(1)) == Ordering::less);
    CHECK(lex_compare(fv(1, 3, 3, -10.9), fv(1, 3, 3, -10.9)) == Ordering::equal);
    CHECK(lex_compare(fv(1, 3, 3, -10.0), fv(1, 3, 3, -10.9)) == Ordering::greater);
    CHECK(lex_compare(fv(1, 3, 3, -std::numeric_limits<double>::infinity()), fv(1, 3, 2)) == Ordering::greater);
    CHECK(lex_compare(fv(1, 2), fv(1, 2)) == Ordering::equal);
    CHECK(lex_less(fv(1, 2), fv(1, 3, 1)));
    CHECK(to_string(fv(1, 2)) == "(1, 2, _, _)");
}

TEST_CASE("comparator is a total preorder")
{
    Rng rng(51);
    auto random_fv = [&]() {
        const int depth = 1 + static_cast<int>(uniform_index(rng, 4));
        FitnessVector f;
        f.f1 = static_cast<int>(uniform_index(rng, 2));
        if (depth >= 2) {
            f.f2 = static_cast<int>(uniform_index(rng, 3));
        }
        if (depth >= 3) {
            f.f3 = static_cast<int>(uniform_index(rng, 3));
        }
        if (depth >= 4) {
            f.f4 = uniform_index(rng, 4) == 0 ? -std::numeric_limits<double>::infinity()
                                              : -static_cast<double>(uniform_index(rng, 3));
        }
        f.depth = depth;
        return f;
    };
    auto flip = [](Ordering o) {
        return o == Ordering::less ? Ordering::greater : o == Ordering::greater ? Ordering::less : o;
    };
    for (int i = 0; i < 20000; ++i) {
        const auto a = random_fv(), b = random_fv(), c = random_fv();
        CHECK(lex_compare(a, a) == Ordering::equal);
        CHECK(lex_compare(a, b) == flip(lex_compare(b, a)));
        const auto ab = lex_compare(a, b), bc = lex_compare(b, c);
        if (ab != Ordering::greater && bc != Ordering::greater) {
            CHECK(lex_compare(a, c) != Ordering::greater);
        }
        if (ab == Ordering::less && bc != Ordering::greater) {
            CHECK(lex_compare(a, c) == Ordering::less);
        }
    }
}

TEST_CASE("connector distance over the joint range")
{
    const auto& lib = fixtures::standard();
    CHECK(max_connector_distance(lib.by_id(8)) == doctest::Approx(0.4));
    CHECK(max_connector_distance(lib.by_id(10)) == doctest::Approx(std::hypot(0.15, 0.2)));
    // Prismatic joint: compare with a 100-point sweep of the joint range.
    const Module& slide = lib.by_id(14);
    const JointSpec& j = slide.joints[0];
    double oracle = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double q = j.q_limits.lo + (j.q_limits.hi - j.q_limits.lo) * i / 99.0;
        const Vec3 distal = (j.parent_frame * translation(j.axis * q) * j.child_frame * slide.distal.frame).translation();
        oracle = std::max(oracle, (distal - slide.proximal.frame.translation()).norm());
    }
    CHECK(max_connector_distance(slide) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(0.7));
}

TEST_CASE("reach upper bound")
{
    const Assembly a = build(fixtures::standard(), fixtures::arm6);
    double reach = 0.0;
    for (const auto& m : a.modules()) {
        reach += max_connector_distance(*m);
    }
    CHECK(f1_reach_upper_bound(a, single_goal(Vec3(0.9 * reach, 0, 0))) == 1);
    CHECK(f1_reach_upper_bound(a, single_goal(Vec3(0, 0, 1.1 * reach))) == 0);
    // Measured from the base.
    Task moved = single_goal(Vec3(5.0 + 0.9 * reach, 0, 0));
    moved.base_pose = translation(5, 0, 0);
    CHECK(f1_reach_upper_bound(a, moved) == 1);
    // Upper-bound soundness: unreachable by the bound means no IK solution.
    const EvalOptions opts = quick_options();
    CHECK(f2_reachable_goals(a, single_goal(Vec3(0, 0, 1.1 * reach)), opts, 1) == 0);
}

TEST_CASE("reachability counts")
{
    const Assembly a = build(fixtures::standard(), fixtures::arm6);
    const EvalOptions opts = quick_options();
    Rng rng(52);
    std::vector<VecX> qs;
    for (int i = 0; i < 3; ++i) {
        qs.push_back(fixtures::random_q(a, rng));
    }
    Task task = fixtures::fk_task(a, qs, tolerance_preset(TolerancePreset::arbitrary));
    CHECK(f2_reachable_goals(a, task, opts, 1) == 3);
    CHECK(f3_collision_free_goals(a, task, opts, 1) == 3);
    Goal far;
    far.pose.p = Vec3(4, 0, 0);
    task.goals.push_back(far);
    CHECK(f2_reachable_goals(a, task, opts, 1) == 3);
    CHECK(f2_reachable_goals(a, Task{}, opts, 1) == 0);
}

TEST_CASE("pocket goal is reachable only through collisions")
{
    const Pocket p = make_pocket();
    const EvalOptions opts = quick_options();
    CHECK(f2_reachable_goals(p.arm, p.task, opts, 3) == 1);
    CHECK(f3_collision_free_goals(p.arm, p.task, opts, 3) == 0);

    // Exhaustive grid over Q at 0.01 rad.
    const auto& lim = p.arm.limits();
    const Vec3 goal = p.task.goals[0].pose.p;
    int within = 0, free_near = 0;
    for (double a = lim.q_lo[0]; a <= lim.q_hi[0]; a += 0.01) {
        for (double b = lim.q_lo[1]; b <= lim.q_hi[1]; b += 0.01) {
            const VecX q = (VecX(2) << a, b).finished();
            const double d = (fk(p.arm, q).p - goal).norm();
            if (d <= 5e-3) {
                ++within;
            }
            if (d <= 0.02 && !in_collision(p.arm, q, p.task.scene, true)) {
                ++free_near;
            }
        }
    }
    CHECK(within > 0);
    CHECK(free_near == 0);
}

TEST_CASE("obstacle-free scenes give equal f2 and f3")
{
    const EvalOptions opts = quick_options();
    for (int i = 0; i < 5; ++i) {
        const Task t = generate_synthetic2(3, 100 + static_cast<std::uint64_t>(i));
        Task free = t;
        free.scene.obstacles.clear();
        free.tol = tolerance_preset(TolerancePreset::sphere_like);
        const Assembly a = build(fixtures::standard(), fixtures::arm6);
        CHECK(f3_collision_free_goals(a, free, opts, 7) == f2_reachable_goals(a, free, opts, 7));
    }
}

TEST_CASE("task cost")
{
    const CostWeights w;
    CHECK(w.task_cost(6, 9, 3.1) == doctest::Approx(10.9));
    const CostWeights sweep = CostWeights::joint_time_tradeoff(2.0);
    CHECK(sweep.task_cost(4, 11, 2.5) == doctest::Approx(2.0 * 4 + 3.0 * 2.5));
    CHECK(sweep.c_M == 0.0);
}

TEST_CASE("staged evaluation depths")
{
    const EvalOptions opts = quick_options();
    const auto& lib = fixtures::standard();
    const Task task = load_task(fixtures::data_path("tasks/manufacturing1.json"));

    const Evaluation shorty = evaluate(assemble(lib, {3, 13}), task, opts, 1);
    CHECK(shorty.fitness.depth == 1);
    CHECK(shorty.fitness.f1 == 0);
    CHECK_FALSE(shorty.fitness.f2.has_value());

    const Assembly arm = build(lib, fixtures::arm6);
    const Evaluation full = evaluate(arm, task, opts, 1);
    CHECK(full.fitness.depth == 4);
    REQUIRE(full.cost);
    CHECK(std::isfinite(*full.fitness.f4));
    REQUIRE(full.trajectory);
    CHECK(*full.cost == doctest::Approx(CostWeights{}.task_cost(6, 11, full.trajectory->t_max())));

    // Block the place goal.
    Task blocked = task;
    blocked.scene.obstacles.push_back(Primitive::sphere(0.05, translation(task.goals[1].pose.p)));
    const Evaluation b = evaluate(arm, blocked, opts, 1);
    CHECK(b.fitness.depth == 3);
    CHECK(*b.fitness.f2 == 2);
    CHECK(*b.fitness.f3 == 1);
    CHECK(lex_compare(full.fitness, b.fitness) == Ordering::greater);
    CHECK(lex_compare(b.fitness, shorty.fitness) == Ordering::greater);

    const Evaluation forced = [&] {
        EvalOptions o = opts;
        o.force_full = true;
        return evaluate(assemble(lib, {3, 13}), task, o, 1);
    }();
    CHECK(forced.fitness.depth == 4);
    CHECK(*forced.fitness.f2 == 0);
}

TEST_CASE("early stopping preserves the order")
{
    const auto& lib = fixtures::tiny();
    VecX q(2);
    q << 0.7, 0.9;
    const Task task = fixtures::fk_task(build(lib, {1, 2, 3, 4, 6}), {q}, tolerance_preset(TolerancePreset::sphere_like));
    GaConfig cfg;
    cfg.chromosome_length = 6;
    cfg.population = 12;
    Rng rng(54);
    const auto pop = init_population(lib, cfg, rng);
    EvalOptions early = quick_options();
    early.plan.ik.max_restarts = 5;
    EvalOptions full = early;
    full.force_full = true;
    std::vector<FitnessVector> e, f;
    for (const auto& c : pop) {
        const Assembly a = decode(lib, c);
        e.push_back(evaluate(a, task, early, 9).fitness);
        f.push_back(evaluate(a, task, full, 9).fitness);
        CHECK(*f.back().f3 <= *f.back().f2);
        if (f.back().f1 == 0) {
            CHECK(*f.back().f2 == 0);
        }
    }
    for (std::size_t i = 0; i < pop.size(); ++i) {
        for (std::size_t j = 0; j < pop.size(); ++j) {
            const Ordering o = lex_compare(e[i], e[j]);
            if (o != Ordering::equal) {
                CHECK(lex_compare(f[i], f[j]) == o);
            }
        }
    }
}

TEST_CASE("model cache")
{
    const auto& lib = fixtures::tiny();
    ModelCache cache;
    const std::vector<int> ids{1, 2, 3, 4, 6};
    cache.get(lib, ids);
    cache.get(lib, ids);
    CHECK(cache.hits() == 1);
    CHECK(cache.misses() == 1);

    // Evict the oldest entry once the capacity is exceeded.
    std::vector<Module> many;
    many.push_back(fixtures::base_module(1, "c"));
    many.push_back(fixtures::eef_module(2, "c"));
    for (int i = 0; i < 1001; ++i) {
        many.push_back(fixtures::link_module(10 + i, "c", translation(0, 0, 0.1)));
    }
    const ModuleLibrary big(many);
    ModelCache lru(1000);
    for (int i = 0; i < 1001; ++i) {
        lru.get(big, {1, 10 + i, 2});
    }
    CHECK(lru.size() == 1000);
    CHECK_FALSE(lru.contains({1, 10, 2}));
    CHECK(lru.contains({1, 1010, 2}));

    ModelCache off(0);
    const EvalOptions opts = quick_options();
    VecX q(2);
    q << 0.3, 0.4;
    const Task task = fixtures::fk_task(build(lib, ids), {q}, tolerance_preset(TolerancePreset::sphere_like));
    const Evaluation with = cached_evaluate(cache, lib, ids, task, opts, 5);
    const Evaluation without = cached_evaluate(off, lib, ids, task, opts, 5);
    CHECK(off.size() == 0);
    CHECK(lex_compare(with.fitness, without.fitness) == Ordering::equal);
    CHECK(with.fitness.depth == without.fitness.depth);
}
