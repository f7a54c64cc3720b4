#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "modsynth/evolve.hpp"

namespace modsynth {

/// Weights k1..k8 of the scalar fitness
/// f_B = exp(-(k1 R + k2 L + k3 A + k4 D + k5 n_M + k6 n_J + k7 V)) + k8 P.
struct BaselineWeights {
    std::array<double, 8> k{0.0, 1.0, 1.0, 0.1, 0.1, 0.5, 0.1, 1.0};
};

/// Per-goal IK outcome used by the criteria.
struct GoalAttempt {
    bool reached = false;
    VecX q;
    double position_error = 0.0;
    double angular_error = 0.0;
};

struct CriteriaInput {
    const Assembly& assembly;
    const Task& task;
    const std::vector<GoalAttempt>& attempts;
};

struct BaselineCriteria {
    double R = 0.0;
    double L = 0.0;
    double A = 0.0;
    double D = 0.0;
    double n_M = 0.0;
    double n_J = 0.0;
    double V = 0.0;
    double P = 0.0;
};

using Criterion = std::function<double(const CriteriaInput&)>;

/// Each criterion can be swapped independently.
struct CriteriaSet {
    Criterion reliability;
    Criterion linear_distance;
    Criterion angular_distance;
    Criterion dexterity;
    Criterion joint_differences;
    Criterion reachable_fraction;

    static CriteriaSet defaults();
};

inline constexpr double max_inverse_manipulability = 1e3;

double inverse_manipulability(const Assembly& assembly, const VecX& q, const Transform& base);

double baseline_formula(const BaselineCriteria& c, const BaselineWeights& w);

/// True (keep) iff collision-aware IK succeeds for the first and last goal.
bool eliminate(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed);

std::vector<GoalAttempt> attempt_goals(const Assembly& assembly, const Task& task, const EvalOptions& opts,
                                       std::uint64_t seed);

BaselineCriteria compute_criteria(const Assembly& assembly, const Task& task, const std::vector<GoalAttempt>& attempts,
                                  const CriteriaSet& criteria = CriteriaSet::defaults());

double baseline_fitness(const Assembly& assembly, const Task& task, const BaselineWeights& weights,
                        const EvalOptions& opts, std::uint64_t seed,
                        const CriteriaSet& criteria = CriteriaSet::defaults());

struct Finalist {
    std::vector<int> ids;
    double f_B = 0.0;
    int n_J = 0;
    int n_M = 0;
    std::optional<double> cost;
    std::optional<Trajectory> trajectory;
};

struct BaselineResult {
    RunResult run;  // best_* fields refer to the second-stage winner
    std::vector<Finalist> finalists;
};

inline constexpr std::size_t baseline_finalists = 25;

BaselineResult run_baseline(const ModuleLibrary& library, const Task& task, const GaConfig& config,
                            const EvalOptions& opts, const BaselineWeights& weights = {},
                            const CriteriaSet& criteria = CriteriaSet::defaults());

}  // namespace modsynth
