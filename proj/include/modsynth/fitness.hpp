#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modsynth/lru_cache.hpp"
#include "modsynth/modlib.hpp"
#include "modsynth/planner.hpp"
#include "modsynth/tasks.hpp"

namespace modsynth {

/// Lexicographic objective tuple. Fields past `depth` were never evaluated.
struct FitnessVector {
    int f1 = 0;
    std::optional<int> f2;
    std::optional<int> f3;
    std::optional<double> f4;
    int depth = 1;
};

enum class Ordering { less, equal, greater };

Ordering lex_compare(const FitnessVector& a, const FitnessVector& b);
inline bool lex_less(const FitnessVector& a, const FitnessVector& b) { return lex_compare(a, b) == Ordering::less; }

std::string to_string(const FitnessVector& f);

/// C_T = c_J n_J + c_M n_M + c_t t_max, i.e. setup cost c_J n_J + c_M n_M
/// plus process cost c_t t_max.
struct CostWeights {
    double c_J = 1.0;
    double c_M = 0.2;
    double c_t = 1.0;

    /// C_T(w_J) = w_J n_J + (5 - w_J) t_max.
    static CostWeights joint_time_tradeoff(double w_J) { return {w_J, 0.0, 5.0 - w_J}; }

    double setup_cost(int n_J, int n_M) const { return c_J * n_J + c_M * n_M; }
    double process_cost(double t_max) const { return c_t * t_max; }
    double task_cost(int n_J, int n_M, double t_max) const { return setup_cost(n_J, n_M) + process_cost(t_max); }
};

struct EvalOptions {
    PlanOptions plan;
    CostWeights weights;
    /// Include self collisions in the collision-aware reachability stage.
    bool self_collision_f3 = true;
    /// Disable early stopping (diagnostics only).
    bool force_full = false;
};

struct Evaluation {
    FitnessVector fitness;
    std::optional<Trajectory> trajectory;
    std::optional<double> cost;  // C_T when depth 4 and feasible
    std::array<double, 4> stage_ms{0, 0, 0, 0};
};

/// Largest distance between the proximal and distal connector origins over
/// the joint range of the module.
double max_connector_distance(const Module& module);

int f1_reach_upper_bound(const Assembly& assembly, const Task& task);

/// Collision-ignoring IK witness for one goal, as counted by f2.
std::optional<VecX> reach_witness(const Assembly& assembly, const Task& task, const EvalOptions& opts,
                                  std::uint64_t seed, std::size_t goal);
/// Collision-free witness for one goal, as counted by f3. Only goals with a
/// reach witness qualify, which keeps f3 <= f2 under the same seed. Pass the
/// reach witness when it is already known.
std::optional<VecX> collision_free_witness(const Assembly& assembly, const Task& task, const EvalOptions& opts,
                                           std::uint64_t seed, std::size_t goal,
                                           const std::optional<VecX>* reach = nullptr);
int f2_reachable_goals(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed);
int f3_collision_free_goals(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed);
/// -infinity when no feasible trajectory is found, else -C_T.
double f4_cost(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed,
               std::optional<Trajectory>* trajectory_out = nullptr);

/// Staged evaluation with early stopping after any of f1..f3 misses its maximum.
Evaluation evaluate(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed);

struct IdSequenceHash {
    std::size_t operator()(const std::vector<int>& ids) const noexcept;
};

/// Caches derived assembly models by module-id sequence. Fitness values are
/// always recomputed.
class ModelCache {
public:
    explicit ModelCache(std::size_t capacity = 1000) : cache_(capacity) {}

    std::shared_ptr<const Assembly> get(const ModuleLibrary& library, const std::vector<int>& ids);

    std::size_t hits() const { return cache_.hits(); }
    std::size_t misses() const { return cache_.misses(); }
    std::size_t size() const { return cache_.size(); }
    bool contains(const std::vector<int>& ids) const { return cache_.contains(ids); }

private:
    LruCache<std::vector<int>, std::shared_ptr<const Assembly>, IdSequenceHash> cache_;
};

Evaluation cached_evaluate(ModelCache& cache, const ModuleLibrary& library, const std::vector<int>& ids,
                           const Task& task, const EvalOptions& opts, std::uint64_t seed);

}  // namespace modsynth
