#include "modsynth/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "modsynth/errors.hpp"
#include "modsynth/geometry.hpp"
#include "modsynth/log.hpp"

namespace modsynth {

namespace {

std::optional<VecX> collision_free_ik(const Assembly& assembly, const Task& task, const EvalOptions& opts,
                                      std::uint64_t seed, std::size_t goal, const std::optional<VecX>& guess,
                                      IkReport* report = nullptr)
{
    const ConfigPredicate colliding = [&](const VecX& q) {
        return in_collision(assembly, q, task.scene, opts.self_collision_f3, task.base_pose);
    };
    IkOptions ik_opts = opts.plan.ik;
    if (guess) {
        ik_opts.initial_guess = guess;
    }
    IkReport r = ik_detailed(assembly, task.goals[goal].pose, task.tolerances_for(goal), ik_opts,
                             derive_seed(derive_seed(seed, {3}), {goal}), colliding, task.base_pose);
    auto solution = r.solution;
    if (report != nullptr) {
        *report = std::move(r);
    }
    return solution;
}

}  // namespace

double inverse_manipulability(const Assembly& assembly, const VecX& q, const Transform& base)
{
    const MatX jac = jacobian(assembly, q, base);
    // Robots with fewer than six joints use the n x n Gram matrix instead.
    const MatX gram = jac.cols() >= jac.rows() ? MatX(jac * jac.transpose()) : MatX(jac.transpose() * jac);
    const double det = gram.size() == 0 ? 0.0 : gram.determinant();
    if (!(det > 0.0)) {
        return max_inverse_manipulability;
    }
    return std::min(1.0 / std::sqrt(det), max_inverse_manipulability);
}

double baseline_formula(const BaselineCriteria& c, const BaselineWeights& w)
{
    const auto& k = w.k;
    const double exponent =
        k[0] * c.R + k[1] * c.L + k[2] * c.A + k[3] * c.D + k[4] * c.n_M + k[5] * c.n_J + k[6] * c.V;
    return std::exp(-exponent) + k[7] * c.P;
}

bool eliminate(const Assembly& assembly, const Task& task, const EvalOptions& opts, std::uint64_t seed)
{
    if (task.goals.empty()) {
        return false;
    }
    const std::size_t last = task.goals.size() - 1;
    return collision_free_witness(assembly, task, opts, seed, 0).has_value() &&
           collision_free_witness(assembly, task, opts, seed, last).has_value();
}

std::vector<GoalAttempt> attempt_goals(const Assembly& assembly, const Task& task, const EvalOptions& opts,
                                       std::uint64_t seed)
{
    std::vector<GoalAttempt> out;
    std::optional<VecX> previous;
    for (std::size_t i = 0; i < task.goals.size(); ++i) {
        IkReport report;
        auto q = collision_free_ik(assembly, task, opts, seed, i, previous, &report);
        GoalAttempt a;
        a.reached = q.has_value();
        a.q = q ? *q : report.best;
        a.position_error = report.position_error;
        a.angular_error = report.angular_error;
        if (q) {
            previous = q;
        }
        out.push_back(std::move(a));
    }
    return out;
}

CriteriaSet CriteriaSet::defaults()
{
    CriteriaSet c;
    c.reliability = [](const CriteriaInput&) { return 0.0; };
    c.linear_distance = [](const CriteriaInput& in) {
        double sum = 0.0;
        for (const auto& a : in.attempts) {
            sum += a.position_error;
        }
        return sum;
    };
    c.angular_distance = [](const CriteriaInput& in) {
        double sum = 0.0;
        for (const auto& a : in.attempts) {
            sum += a.angular_error;
        }
        return sum;
    };
    c.dexterity = [](const CriteriaInput& in) {
        double sum = 0.0;
        for (const auto& a : in.attempts) {
            if (a.reached) {
                sum += inverse_manipulability(in.assembly, a.q, in.task.base_pose);
            }
        }
        return sum;
    };
    c.joint_differences = [](const CriteriaInput& in) {
        double sum = 0.0;
        const VecX* previous = nullptr;
        for (const auto& a : in.attempts) {
            if (!a.reached) {
                continue;
            }
            if (previous != nullptr) {
                sum += (a.q - *previous).lpNorm<1>();
            }
            previous = &a.q;
        }
        return sum;
    };
    c.reachable_fraction = [](const CriteriaInput& in) {
        if (in.attempts.empty()) {
            return 0.0;
        }
        const auto hits = std::count_if(in.attempts.begin(), in.attempts.end(), [](const auto& a) { return a.reached; });
        return static_cast<double>(hits) / static_cast<double>(in.attempts.size());
    };
    return c;
}

BaselineCriteria compute_criteria(const Assembly& assembly, const Task& task, const std::vector<GoalAttempt>& attempts,
                                  const CriteriaSet& criteria)
{
    const CriteriaInput in{assembly, task, attempts};
    BaselineCriteria c;
    c.R = criteria.reliability(in);
    c.L = criteria.linear_distance(in);
    c.A = criteria.angular_distance(in);
    c.D = criteria.dexterity(in);
    c.n_M = assembly.module_count();
    c.n_J = assembly.dof();
    c.V = criteria.joint_differences(in);
    c.P = criteria.reachable_fraction(in);
    return c;
}

double baseline_fitness(const Assembly& assembly, const Task& task, const BaselineWeights& weights,
                        const EvalOptions& opts, std::uint64_t seed, const CriteriaSet& criteria)
{
    const auto attempts = attempt_goals(assembly, task, opts, seed);
    return baseline_formula(compute_criteria(assembly, task, attempts, criteria), weights);
}

namespace {

struct Scored {
    Individual ind;
    double f_B = -std::numeric_limits<double>::infinity();
    int reached = 0;
};

FitnessVector record_fitness(const Scored& s)
{
    FitnessVector f;
    if (!std::isfinite(s.f_B)) {
        return f;
    }
    f.f1 = 1;
    f.f2 = s.reached;
    f.f3 = s.reached;
    f.f4 = s.f_B;
    f.depth = 4;
    return f;
}

// Higher f_B first, then fewer joints, fewer modules, lower index.
std::vector<std::size_t> rank_scored(const std::vector<Scored>& pop)
{
    std::vector<int> nj, nm;
    for (const auto& s : pop) {
        nj.push_back(s.ind.n_J);
        nm.push_back(s.ind.n_M);
    }
    return rank(
        pop.size(),
        [&](std::size_t i, std::size_t j) {
            if (pop[i].f_B < pop[j].f_B) {
                return Ordering::less;
            }
            if (pop[j].f_B < pop[i].f_B) {
                return Ordering::greater;
            }
            return Ordering::equal;
        },
        nj, nm);
}

}  // namespace

BaselineResult run_baseline(const ModuleLibrary& library, const Task& task, const GaConfig& config,
                            const EvalOptions& opts, const BaselineWeights& weights, const CriteriaSet& criteria)
{
    config.validate();
    Rng init_rng(stream_seed(config.seed, Stream::init));
    Rng cross_rng(stream_seed(config.seed, Stream::crossover));
    Rng mut_rng(stream_seed(config.seed, Stream::mutation));
    const std::uint64_t eval_root = stream_seed(config.seed, Stream::evaluation);
    ModelCache cache;

    auto make = [&](Chromosome c) {
        Scored s;
        s.ind.ids = decode_ids(library, c);
        s.ind.chromosome = std::move(c);
        s.ind.n_M = static_cast<int>(s.ind.ids.size());
        s.ind.n_J = cache.get(library, s.ind.ids)->dof();
        return s;
    };

    std::vector<Scored> population;
    for (auto& c : init_population(library, config, init_rng)) {
        population.push_back(make(std::move(c)));
    }
    std::size_t fresh_from = 0;

    // Best f_B seen per distinct assembly over the whole run.
    std::map<std::vector<int>, Scored> seen;
    BaselineResult out;
    RunResult& result = out.run;
    double eval_ms_total = 0.0;

    for (int gen = 0; gen < config.generations; ++gen) {
        const auto started = std::chrono::steady_clock::now();
        const std::size_t count = population.size() - fresh_from;
        std::vector<double> ms(count, 0.0);
        parallel_for(count, config.parallelism, [&](std::size_t k) {
            const auto t0 = std::chrono::steady_clock::now();
            Scored& s = population[fresh_from + k];
            const auto model = cache.get(library, s.ind.ids);
            const auto seed = derive_seed(eval_root, {static_cast<std::uint64_t>(gen), fresh_from + k});
            s.f_B = -std::numeric_limits<double>::infinity();
            s.reached = 0;
            if (eliminate(*model, task, opts, seed)) {
                const auto attempts = attempt_goals(*model, task, opts, seed);
                s.f_B = baseline_formula(compute_criteria(*model, task, attempts, criteria), weights);
                s.reached = static_cast<int>(
                    std::count_if(attempts.begin(), attempts.end(), [](const auto& a) { return a.reached; }));
            }
            s.ind.eval.fitness = record_fitness(s);
            ms[k] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        });
        for (std::size_t k = 0; k < count; ++k) {
            const Scored& s = population[fresh_from + k];
            eval_ms_total += ms[k];
            ++result.depth_histogram[static_cast<std::size_t>(s.ind.eval.fitness.depth - 1)];
            if (std::isfinite(s.f_B)) {
                auto it = seen.find(s.ind.ids);
                if (it == seen.end() || it->second.f_B < s.f_B) {
                    seen[s.ind.ids] = s;
                }
            }
        }
        result.evaluations += count;

        const auto order = rank_scored(population);
        const Scored& best = population[order.front()];
        GenerationRecord rec;
        rec.generation = gen;
        rec.best = best.ind.eval.fitness;
        rec.best_ids = best.ind.ids;
        for (const auto& s : population) {
            ++rec.depth_histogram[static_cast<std::size_t>(s.ind.eval.fitness.depth - 1)];
            rec.feasible += std::isfinite(s.f_B) ? 1 : 0;
        }
        if (gen + 1 < config.generations) {
            std::vector<Scored> next;
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
                Chromosome child = crossover(library, next[a].ind.chromosome, next[b].ind.chromosome, cross_rng);
                child = mutate(library, child, config.mutation_prob, mut_rng);
                next.push_back(make(std::move(child)));
            }
            population = std::move(next);
        } else {
            result.best_ids = best.ind.ids;
            result.best_chromosome = best.ind.chromosome;
            result.best_fitness = best.ind.eval.fitness;
        }
        if (config.record_timing) {
            rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        }
        result.history.generations.push_back(std::move(rec));
    }
    result.mean_eval_ms = result.evaluations > 0 ? eval_ms_total / static_cast<double>(result.evaluations) : 0.0;

    // Second stage: trajectories for the best distinct assemblies.
    std::vector<Scored> pool;
    for (auto& [ids, s] : seen) {
        pool.push_back(s);
    }
    auto order = rank_scored(pool);
    if (order.size() > baseline_finalists) {
        order.resize(baseline_finalists);
    }
    out.finalists.resize(order.size());
    const std::uint64_t stage2_root = derive_seed(eval_root, {0x5354414745ULL});
    parallel_for(order.size(), config.parallelism, [&](std::size_t k) {
        const Scored& s = pool[order[k]];
        Finalist& f = out.finalists[k];
        f.ids = s.ind.ids;
        f.f_B = s.f_B;
        f.n_J = s.ind.n_J;
        f.n_M = s.ind.n_M;
        const auto model = cache.get(library, f.ids);
        f.trajectory = solve_task(*model, task, opts.plan, derive_seed(stage2_root, {k}));
        if (f.trajectory) {
            f.cost = opts.weights.task_cost(f.n_J, f.n_M, f.trajectory->t_max());
        }
    });

    const Finalist* winner = nullptr;
    for (const auto& f : out.finalists) {
        if (f.cost && (winner == nullptr || *f.cost < *winner->cost)) {
            winner = &f;
        }
    }
    if (winner != nullptr) {
        result.best_ids = winner->ids;
        result.best_chromosome = encode(library, winner->ids, config.chromosome_length);
        result.best_cost = winner->cost;
        result.trajectory = winner->trajectory;
        result.best_fitness.f1 = 1;
        result.best_fitness.f2 = static_cast<int>(task.goals.size());
        result.best_fitness.f3 = static_cast<int>(task.goals.size());
        result.best_fitness.f4 = -*winner->cost;
        result.best_fitness.depth = 4;
    } else {
        if (result.best_fitness.depth == 4) {
            result.best_fitness.f4 = -std::numeric_limits<double>::infinity();
        }
        log::info("baseline: no finalist admits a feasible trajectory");
    }
    return out;
}

}  // namespace modsynth
