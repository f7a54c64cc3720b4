#include "modsynth/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "modsynth/errors.hpp"
#include "modsynth/log.hpp"

namespace modsynth {

void GaConfig::validate() const
{
    if (chromosome_length < 2) {
        throw Error("chromosome length must be at least 2");
    }
    if (population < 2) {
        throw Error("population must be at least 2");
    }
    if (generations < 1) {
        throw Error("generations must be at least 1");
    }
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
        throw Error("mutation probability must lie in [0, 1]");
    }
    if (!(joint_bias >= 0.0 && joint_bias <= 1.0)) {
        throw Error("joint bias must lie in [0, 1]");
    }
    if (!(parent_fraction > 0.0 && parent_fraction < 1.0)) {
        throw Error("parent fraction must lie in (0, 1)");
    }
    if (parallelism < 1) {
        throw Error("parallelism must be at least 1");
    }
}

std::vector<int> decode_ids(const ModuleLibrary& library, const Chromosome& chromosome)
{
    std::vector<int> ids;
    for (int g : chromosome.genes) {
        if (g != 0) {
            ids.push_back(library.id_of_gene(g));
        }
    }
    return ids;
}

Assembly decode(const ModuleLibrary& library, const Chromosome& chromosome)
{
    const auto ids = decode_ids(library, chromosome);
    return assemble(library, std::span<const int>(ids));
}

Chromosome encode(const ModuleLibrary& library, const std::vector<int>& ids, int chromosome_length)
{
    if (ids.size() < 2 || static_cast<int>(ids.size()) > chromosome_length) {
        throw InvalidStructure("assembly of " + std::to_string(ids.size()) + " modules does not fit " +
                               std::to_string(chromosome_length) + " genes");
    }
    Chromosome c;
    c.genes.assign(static_cast<std::size_t>(chromosome_length), 0);
    c.genes.front() = library.gene_of(ids.front());
    c.genes.back() = library.gene_of(ids.back());
    for (std::size_t i = 1; i + 1 < ids.size(); ++i) {
        c.genes[i] = library.gene_of(ids[i]);
    }
    return c;
}

bool is_valid(const ModuleLibrary& library, const Chromosome& chromosome)
{
    const auto& g = chromosome.genes;
    if (g.size() < 2) {
        return false;
    }
    const auto gmax = static_cast<int>(library.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < 0 || g[i] > gmax) {
            return false;
        }
        const bool edge = i == 0 || i + 1 == g.size();
        if (g[i] == 0) {
            if (edge) {
                return false;
            }
            continue;
        }
        const ModuleKind kind = library.by_gene(g[i]).kind;
        if ((i == 0 && kind != ModuleKind::base) || (i + 1 == g.size() && kind != ModuleKind::end_effector) ||
            (!edge && kind != ModuleKind::regular)) {
            return false;
        }
    }
    const auto ids = decode_ids(library, chromosome);
    return is_valid_sequence(library, ids);
}

std::vector<Chromosome> init_population(const ModuleLibrary& library, const GaConfig& config, Rng& rng)
{
    constexpr int max_retries = 100;
    const auto bases = library.ids_of_kind(ModuleKind::base);
    const auto eefs = library.ids_of_kind(ModuleKind::end_effector);
    const auto regulars = library.ids_of_kind(ModuleKind::regular);
    if (bases.empty() || eefs.empty()) {
        throw InitFailure("library needs at least one base and one end effector");
    }
    const auto n = static_cast<std::size_t>(config.chromosome_length);

    std::vector<Chromosome> population;
    for (int p = 0; p < config.population; ++p) {
        bool done = false;
        for (int attempt = 0; attempt < max_retries && !done; ++attempt) {
            Chromosome c;
            c.genes.assign(n, 0);
            int prev = bases[uniform_index(rng, bases.size())];
            c.genes[0] = library.gene_of(prev);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const Module& left = library.by_id(prev);
                std::vector<int> joints;
                std::vector<int> others{0};
                for (int id : regulars) {
                    const Module& m = library.by_id(id);
                    if (can_connect(left, m)) {
                        (m.has_joint() ? joints : others).push_back(id);
                    }
                }
                const bool pick_joint = !joints.empty() && uniform(rng, 0.0, 1.0) < config.joint_bias;
                const auto& group = pick_joint ? joints : others;
                const int id = group[uniform_index(rng, group.size())];
                if (id != 0) {
                    c.genes[i] = library.gene_of(id);
                    prev = id;
                }
            }
            std::vector<int> closing;
            for (int id : eefs) {
                if (can_connect(library.by_id(prev), library.by_id(id))) {
                    closing.push_back(id);
                }
            }
            if (closing.empty()) {
                continue;
            }
            c.genes.back() = library.gene_of(closing[uniform_index(rng, closing.size())]);
            population.push_back(std::move(c));
            done = true;
        }
        if (!done) {
            throw InitFailure("no valid chromosome after " + std::to_string(max_retries) + " attempts");
        }
    }
    return population;
}

std::optional<Chromosome> crossover_at(const ModuleLibrary& library, const Chromosome& a, const Chromosome& b,
                                       std::size_t cut)
{
    if (a.genes.size() != b.genes.size()) {
        throw DimensionMismatch(a.genes.size(), b.genes.size());
    }
    if (cut < 1 || cut >= a.genes.size()) {
        return std::nullopt;
    }
    Chromosome child;
    child.genes.assign(a.genes.begin(), a.genes.begin() + static_cast<std::ptrdiff_t>(cut));
    child.genes.insert(child.genes.end(), b.genes.begin() + static_cast<std::ptrdiff_t>(cut), b.genes.end());
    if (!is_valid(library, child)) {
        return std::nullopt;
    }
    return child;
}

Chromosome crossover(const ModuleLibrary& library, const Chromosome& a, const Chromosome& b, Rng& rng)
{
    if (a.genes.size() != b.genes.size()) {
        throw DimensionMismatch(a.genes.size(), b.genes.size());
    }
    std::vector<std::size_t> cuts(a.genes.size() - 1);
    std::iota(cuts.begin(), cuts.end(), 1);
    std::shuffle(cuts.begin(), cuts.end(), rng);
    for (std::size_t cut : cuts) {
        if (auto child = crossover_at(library, a, b, cut)) {
            return *child;
        }
    }
    return a;
}

Chromosome mutate(const ModuleLibrary& library, const Chromosome& chromosome, double p_m, Rng& rng)
{
    Chromosome c = chromosome;
    for (std::size_t i = 0; i < c.genes.size(); ++i) {
        if (!(uniform(rng, 0.0, 1.0) < p_m)) {
            continue;
        }
        const auto candidates = mutation_candidates(library, c, static_cast<int>(i));
        if (candidates.empty()) {
            continue;
        }
        auto it = candidates.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(uniform_index(rng, candidates.size())));
        const int original = c.genes[i];
        c.genes[i] = *it;
        if (!is_valid(library, c)) {
            c.genes[i] = original;
        }
    }
    return c;
}

std::vector<std::size_t> rank(std::size_t n, const std::function<Ordering(std::size_t, std::size_t)>& compare,
                              const std::vector<int>& n_joints, const std::vector<int>& n_modules)
{
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const Ordering o = compare(i, j);
        if (o != Ordering::equal) {
            return o == Ordering::greater;
        }
        if (n_joints[i] != n_joints[j]) {
            return n_joints[i] < n_joints[j];
        }
        return n_modules[i] < n_modules[j];
    });
    return order;
}

std::size_t parent_count(const GaConfig& config)
{
    const auto k = static_cast<std::size_t>(std::ceil(config.parent_fraction * config.population - 1e-9));
    return std::clamp<std::size_t>(k, 1, static_cast<std::size_t>(config.population));
}

namespace {

std::vector<std::size_t> rank_population(const std::vector<Individual>& population)
{
    std::vector<int> nj, nm;
    for (const auto& ind : population) {
        nj.push_back(ind.n_J);
        nm.push_back(ind.n_M);
    }
    return rank(
        population.size(),
        [&](std::size_t i, std::size_t j) { return lex_compare(population[i].eval.fitness, population[j].eval.fitness); },
        nj, nm);
}

/// Optimistic reach of the longest chromosome the library can encode.
double library_reach(const ModuleLibrary& library, int chromosome_length)
{
    double base = 0.0, regular = 0.0, eef = 0.0;
    for (const auto& m : library.modules()) {
        const double d = max_connector_distance(*m);
        switch (m->kind) {
        case ModuleKind::base:
            base = std::max(base, d);
            break;
        case ModuleKind::regular:
            regular = std::max(regular, d);
            break;
        case ModuleKind::end_effector:
            eef = std::max(eef, d);
            break;
        }
    }
    return base + std::max(chromosome_length - 2, 0) * regular + eef;
}

}  // namespace

std::vector<std::size_t> select(const std::vector<Individual>& population, const GaConfig& config)
{
    auto order = rank_population(population);
    order.resize(std::min(order.size(), parent_count(config)));
    return order;
}

void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn)
{
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

RunResult run(const ModuleLibrary& library, const Task& task, const GaConfig& config, const EvalOptions& opts)
{
    config.validate();
    if (!plausibly_solvable(task, library_reach(library, config.chromosome_length))) {
        log::warn("task '" + task.name + "' looks unsolvable for this library");
    }

    Rng init_rng(stream_seed(config.seed, Stream::init));
    Rng cross_rng(stream_seed(config.seed, Stream::crossover));
    Rng mut_rng(stream_seed(config.seed, Stream::mutation));
    const std::uint64_t eval_root = stream_seed(config.seed, Stream::evaluation);
    ModelCache cache;

    auto make = [&](Chromosome c) {
        Individual ind;
        ind.ids = decode_ids(library, c);
        ind.chromosome = std::move(c);
        ind.n_M = static_cast<int>(ind.ids.size());
        ind.n_J = cache.get(library, ind.ids)->dof();
        return ind;
    };

    std::vector<Individual> population;
    for (auto& c : init_population(library, config, init_rng)) {
        population.push_back(make(std::move(c)));
    }
    // Elites keep their evaluation; only individuals at or past this index
    // are new in the current generation.
    std::size_t fresh_from = 0;

    RunResult result;
    double eval_ms_total = 0.0;
    for (int gen = 0; gen < config.generations; ++gen) {
        const auto started = std::chrono::steady_clock::now();
        const std::size_t count = population.size() - fresh_from;
        parallel_for(count, config.parallelism, [&](std::size_t k) {
            const std::size_t i = fresh_from + k;
            const auto seed = derive_seed(eval_root, {static_cast<std::uint64_t>(gen), i});
            population[i].eval = cached_evaluate(cache, library, population[i].ids, task, opts, seed);
        });
        for (std::size_t i = fresh_from; i < population.size(); ++i) {
            const auto& ev = population[i].eval;
            eval_ms_total += ev.stage_ms[0] + ev.stage_ms[1] + ev.stage_ms[2] + ev.stage_ms[3];
            ++result.depth_histogram[static_cast<std::size_t>(ev.fitness.depth - 1)];
        }
        result.evaluations += count;

        const auto order = rank_population(population);
        const Individual& best = population[order.front()];
        GenerationRecord rec;
        rec.generation = gen;
        rec.best = best.eval.fitness;
        rec.best_ids = best.ids;
        rec.best_cost = best.eval.cost;
        for (const auto& ind : population) {
            ++rec.depth_histogram[static_cast<std::size_t>(ind.eval.fitness.depth - 1)];
            rec.feasible += ind.eval.cost ? 1 : 0;
        }

        if (gen + 1 == config.generations) {
            result.best_ids = best.ids;
            result.best_chromosome = best.chromosome;
            result.best_fitness = best.eval.fitness;
            result.best_cost = best.eval.cost;
            result.trajectory = best.eval.trajectory;
        } else {
            std::vector<Individual> next;
            const std::size_t parents = std::min(order.size(), parent_count(config));
            for (std::size_t k = 0; k < parents; ++k) {
                next.push_back(population[order[k]]);
            }
            fresh_from = next.size();
            while (next.size() < population.size()) {
                const std::size_t a = uniform_index(cross_rng, parents);
                std::size_t b = a;
                if (parents > 1) {
                    b = uniform_index(cross_rng, parents - 1);
                    b += b >= a ? 1 : 0;
                }
                Chromosome child = crossover(library, next[a].chromosome, next[b].chromosome, cross_rng);
                child = mutate(library, child, config.mutation_prob, mut_rng);
                next.push_back(make(std::move(child)));
            }
            population = std::move(next);
        }

        if (config.record_timing) {
            rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        }
        if (log::enabled(log::Level::info)) {
            std::ostringstream msg;
            msg << "generation " << gen << " best " << to_string(rec.best) << " feasible " << rec.feasible;
            log::info(msg.str());
        }
        result.history.generations.push_back(std::move(rec));
    }
    result.mean_eval_ms = result.evaluations > 0 ? eval_ms_total / static_cast<double>(result.evaluations) : 0.0;
    return result;
}

}  // namespace modsynth
