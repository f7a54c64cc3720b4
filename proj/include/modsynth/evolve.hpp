#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "modsynth/fitness.hpp"
#include "modsynth/modlib.hpp"
#include "modsynth/random.hpp"
#include "modsynth/tasks.hpp"

namespace modsynth {

struct GaConfig {
    int chromosome_length = 12;
    int population = 25;
    int generations = 200;
    double mutation_prob = 0.1;
    double joint_bias = 0.9;
    double parent_fraction = 0.4;
    std::uint64_t seed = 0;
    int parallelism = 1;
    /// Record wall-clock times in the history; off for reproducible output.
    bool record_timing = true;

    void validate() const;
};

/// Drops empty genes and assembles the remaining ids.
std::vector<int> decode_ids(const ModuleLibrary& library, const Chromosome& chromosome);
Assembly decode(const ModuleLibrary& library, const Chromosome& chromosome);
/// Base in the first gene, end effector in the last, interior modules packed
/// after the base.
Chromosome encode(const ModuleLibrary& library, const std::vector<int>& ids, int chromosome_length);
bool is_valid(const ModuleLibrary& library, const Chromosome& chromosome);

std::vector<Chromosome> init_population(const ModuleLibrary& library, const GaConfig& config, Rng& rng);
/// a[0, cut) followed by b[cut, n_c), if that chromosome is valid.
std::optional<Chromosome> crossover_at(const ModuleLibrary& library, const Chromosome& a, const Chromosome& b,
                                       std::size_t cut);
/// Single-point crossover at a uniformly chosen valid cut; a copy of `a` if none is valid.
Chromosome crossover(const ModuleLibrary& library, const Chromosome& a, const Chromosome& b, Rng& rng);
Chromosome mutate(const ModuleLibrary& library, const Chromosome& chromosome, double p_m, Rng& rng);

/// Indices of the population ranked best-first by `compare`, ties broken by
/// fewer joints, then fewer modules, then position.
std::vector<std::size_t> rank(std::size_t n, const std::function<Ordering(std::size_t, std::size_t)>& compare,
                              const std::vector<int>& n_joints, const std::vector<int>& n_modules);

std::size_t parent_count(const GaConfig& config);

struct Individual {
    Chromosome chromosome;
    std::vector<int> ids;
    int n_J = 0;
    int n_M = 0;
    Evaluation eval;
};

/// Truncation selection: indices of the top ceil(parent_fraction * p).
std::vector<std::size_t> select(const std::vector<Individual>& population, const GaConfig& config);

struct GenerationRecord {
    int generation = 0;
    FitnessVector best;
    std::vector<int> best_ids;
    std::optional<double> best_cost;
    std::array<int, 4> depth_histogram{0, 0, 0, 0};
    int feasible = 0;  // individuals with finite cost
    double wall_ms = 0.0;
};

struct RunHistory {
    std::vector<GenerationRecord> generations;
};

struct RunResult {
    std::vector<int> best_ids;
    Chromosome best_chromosome;
    FitnessVector best_fitness;
    std::optional<double> best_cost;
    std::optional<Trajectory> trajectory;
    RunHistory history;
    std::size_t evaluations = 0;
    double mean_eval_ms = 0.0;
    std::array<int, 4> depth_histogram{0, 0, 0, 0};
};

/// Runs fn(i) for i in [0, n) on up to `parallelism` threads.
void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn);

RunResult run(const ModuleLibrary& library, const Task& task, const GaConfig& config, const EvalOptions& opts);

}  // namespace modsynth
