#include "modsynth/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modsynth/errors.hpp"
#include "modsynth/planner.hpp"
#include "modsynth/random.hpp"

namespace modsynth {

const Tolerances& Task::tolerances_for(std::size_t goal) const
{
    const auto& g = goals.at(goal);
    return g.tolerances ? *g.tolerances : tol;
}

bool reached(const Assembly& assembly, const VecX& q, const Goal& goal, const Tolerances& tol, const Transform& base)
{
    return pose_within(fk(assembly, q, base), goal.pose, tol);
}

bool all_goals_reached(const Assembly& assembly, const Trajectory& trajectory, const Task& task)
{
    const std::size_t n = task.goals.size();
    if (n == 0 || trajectory.size() == 0) {
        return false;
    }
    auto hits = [&](std::size_t sample, std::size_t goal) {
        return reached(assembly, trajectory.q[sample], task.goals[goal], task.tolerances_for(goal), task.base_pose);
    };
    // Earliest-match scan: every goal but the last may be matched at any
    // sample not before its predecessor's; the last must hold at t_max.
    std::size_t next = 0;
    for (std::size_t k = 0; k < trajectory.size() && next + 1 < n; ++k) {
        while (next + 1 < n && hits(k, next)) {
            ++next;
        }
    }
    return next + 1 == n && hits(trajectory.size() - 1, n - 1);
}

Tolerances tolerance_preset(TolerancePreset preset)
{
    Tolerances t;
    t.t_p = 1e-3;
    switch (preset) {
    case TolerancePreset::sphere_like:
        t.t_axis = Vec3::Ones();
        t.phi = M_PI / 2.0;
        break;
    case TolerancePreset::partially_symmetric:
        t.t_axis = Vec3(1.0 / 360.0, 1.0 / 360.0, 1.0);
        t.phi = M_PI;
        break;
    case TolerancePreset::arbitrary:
        t.t_axis = Vec3::Ones();
        t.phi = M_PI / 360.0;
        break;
    }
    return t;
}

std::optional<TolerancePreset> parse_tolerance_preset(const std::string& name)
{
    if (name == "sphere_like") {
        return TolerancePreset::sphere_like;
    }
    if (name == "partially_symmetric") {
        return TolerancePreset::partially_symmetric;
    }
    if (name == "arbitrary") {
        return TolerancePreset::arbitrary;
    }
    return std::nullopt;
}

Task generate_synthetic1(int d, std::uint64_t seed)
{
    constexpr int cells = 5;
    constexpr double edge = 0.25;
    if (d < 1) {
        throw Error("d must be at least 1");
    }
    if (2 * d > cells * cells * cells) {
        throw Unsatisfiable("not enough voxels for disjoint goals and obstacles");
    }
    Rng rng(seed);
    std::vector<int> voxels(cells * cells * cells);
    std::iota(voxels.begin(), voxels.end(), 0);
    // Partial Fisher-Yates: the first 2d entries are a uniform sample.
    for (int i = 0; i < 2 * d; ++i) {
        const auto j = static_cast<std::size_t>(i) + uniform_index(rng, voxels.size() - static_cast<std::size_t>(i));
        std::swap(voxels[static_cast<std::size_t>(i)], voxels[j]);
    }
    auto center = [&](int v) {
        const int ix = v % cells;
        const int iy = (v / cells) % cells;
        const int iz = v / (cells * cells);
        const double lo = -0.5 * cells * edge;
        return Vec3(lo + (ix + 0.5) * edge, lo + (iy + 0.5) * edge, (iz + 0.5) * edge);
    };

    Task task;
    task.name = "synthetic1_d" + std::to_string(d) + "_s" + std::to_string(seed);
    task.tol = tolerance_preset(TolerancePreset::arbitrary);
    for (int i = 0; i < d; ++i) {
        task.scene.obstacles.push_back(
            Primitive::box(Vec3::Constant(edge / 2.0), translation(center(voxels[static_cast<std::size_t>(i)]))));
    }
    for (int i = 0; i < d; ++i) {
        Goal g;
        g.id = "g" + std::to_string(i + 1);
        g.pose.p = center(voxels[static_cast<std::size_t>(d + i)]);
        g.pose.n = random_rotation(rng);
        task.goals.push_back(g);
    }
    return task;
}

namespace {

Vec3 sample_half_ball(Rng& rng, double radius)
{
    while (true) {
        const Vec3 p(uniform(rng, -radius, radius), uniform(rng, -radius, radius), uniform(rng, 0.0, radius));
        if (p.norm() <= radius) {
            return p;
        }
    }
}

}  // namespace

Task generate_synthetic2(int d, std::uint64_t seed)
{
    constexpr double radius = 1.2;
    constexpr double dim_lo = 0.05;
    constexpr double dim_hi = 0.3;
    if (d < 1) {
        throw Error("d must be at least 1");
    }
    Rng rng(seed);
    Task task;
    task.name = "synthetic2_d" + std::to_string(d) + "_s" + std::to_string(seed);
    task.tol = tolerance_preset(TolerancePreset::arbitrary);
    for (int i = 0; i < d; ++i) {
        Transform pose = Transform::Identity();
        pose.translation() = sample_half_ball(rng, radius);
        pose.linear() = random_rotation(rng).toRotationMatrix();
        const auto kind = uniform_index(rng, 3);
        const double a = uniform(rng, dim_lo, dim_hi);
        const double b = uniform(rng, dim_lo, dim_hi);
        const double c = uniform(rng, dim_lo, dim_hi);
        if (kind == 0) {
            task.scene.obstacles.push_back(Primitive::sphere(a, pose));
        } else if (kind == 1) {
            task.scene.obstacles.push_back(Primitive::box(Vec3(a, b, c), pose));
        } else {
            task.scene.obstacles.push_back(Primitive::cylinder(a, b, pose));
        }
    }
    for (int i = 0; i < d; ++i) {
        Goal g;
        g.id = "g" + std::to_string(i + 1);
        g.pose.p = sample_half_ball(rng, radius);
        g.pose.n = random_rotation(rng);
        task.goals.push_back(g);
    }
    return task;
}

bool plausibly_solvable(const Task& task, double reach_estimate)
{
    if (!(reach_estimate > 0.0)) {
        throw Error("reach estimate must be positive");
    }
    const Vec3 base = task.base_pose.translation();
    for (const auto& o : task.scene.obstacles) {
        if (point_distance(o, base) <= task.tol.t_p) {
            return false;
        }
    }
    for (std::size_t i = 0; i < task.goals.size(); ++i) {
        const Vec3& p = task.goals[i].pose.p;
        if ((p - base).norm() > reach_estimate) {
            return false;
        }
        const double inflate = task.tolerances_for(i).t_p;
        for (const auto& o : task.scene.obstacles) {
            if (point_distance(o, p) <= inflate) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace modsynth
