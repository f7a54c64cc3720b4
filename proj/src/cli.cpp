#include "modsynth/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "modsynth/baseline.hpp"
#include "modsynth/errors.hpp"
#include "modsynth/evolve.hpp"
#include "modsynth/io.hpp"
#include "modsynth/log.hpp"

namespace modsynth {

namespace {

namespace fs = std::filesystem;

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_infeasible = 2;

struct CommonArgs {
    std::string modules;
    std::string task;
    std::string config;
    std::uint64_t seed = 0;
    std::string out = "out";
    std::optional<int> parallelism;
    std::optional<int> generations;
    std::optional<int> population;
    std::optional<double> timeout_s;
    std::string tolerance;
    bool reproducible = false;
};

struct RunConfig {
    GaConfig ga;
    EvalOptions eval;
    BaselineWeights baseline;
};

void add_common(CLI::App& cmd, CommonArgs& a, bool ga_flags)
{
    cmd.add_option("--modules", a.modules, "module library JSON")->required()->check(CLI::ExistingFile);
    cmd.add_option("--task", a.task, "task JSON")->required()->check(CLI::ExistingFile);
    cmd.add_option("--config", a.config, "run configuration JSON")->check(CLI::ExistingFile);
    cmd.add_option("--seed", a.seed, "root random seed");
    cmd.add_option("--timeout-s", a.timeout_s, "planner wall-clock timeout per path");
    cmd.add_option("--tolerance", a.tolerance, "override task tolerances: sphere_like, partially_symmetric, arbitrary");
    if (ga_flags) {
        cmd.add_option("--out", a.out, "output directory");
        cmd.add_option("--parallelism", a.parallelism, "evaluation worker threads");
        cmd.add_option("--generations", a.generations, "number of generations");
        cmd.add_option("--population", a.population, "population size");
        cmd.add_flag("--reproducible", a.reproducible,
                     "bound planning by iterations only and omit wall-clock times from the history");
    }
}

template <typename T>
void take(const json& j, const char* key, T& dst)
{
    if (j.contains(key)) {
        dst = j[key].get<T>();
    }
}

RunConfig resolve_config(const CommonArgs& a)
{
    RunConfig rc;
    if (!a.config.empty()) {
        const json j = read_json(a.config);
        try {
            if (j.contains("ga")) {
                const json& g = j["ga"];
                take(g, "chromosome_length", rc.ga.chromosome_length);
                take(g, "population", rc.ga.population);
                take(g, "generations", rc.ga.generations);
                take(g, "mutation_prob", rc.ga.mutation_prob);
                take(g, "joint_bias", rc.ga.joint_bias);
                take(g, "parent_fraction", rc.ga.parent_fraction);
                take(g, "parallelism", rc.ga.parallelism);
            }
            if (j.contains("weights")) {
                const json& w = j["weights"];
                take(w, "c_J", rc.eval.weights.c_J);
                take(w, "c_M", rc.eval.weights.c_M);
                take(w, "c_t", rc.eval.weights.c_t);
                if (w.contains("w_J")) {
                    rc.eval.weights = CostWeights::joint_time_tradeoff(w["w_J"].get<double>());
                }
            }
            if (j.contains("planner")) {
                const json& p = j["planner"];
                auto& po = rc.eval.plan;
                take(p, "timeout_s", po.timeout_s);
                take(p, "max_iterations", po.max_iterations);
                take(p, "use_wall_clock", po.use_wall_clock);
                take(p, "extend_step", po.extend_step);
                take(p, "edge_resolution", po.edge_resolution);
                take(p, "shortcut_iterations", po.shortcut_iterations);
                take(p, "sample_dt", po.sample_dt);
                take(p, "torque_dt", po.torque_dt);
                take(p, "self_collision", po.self_collision);
            }
            if (j.contains("ik")) {
                take(j["ik"], "max_restarts", rc.eval.plan.ik.max_restarts);
                take(j["ik"], "max_iterations", rc.eval.plan.ik.max_iterations);
            }
            if (j.contains("baseline_weights")) {
                const auto k = j["baseline_weights"].get<std::vector<double>>();
                if (k.size() != 8) {
                    throw ParseError("baseline_weights needs 8 entries");
                }
                std::copy(k.begin(), k.end(), rc.baseline.k.begin());
            }
            take(j, "self_collision_f3", rc.eval.self_collision_f3);
        } catch (const json::exception& e) {
            throw ParseError(a.config + ": " + e.what());
        }
    }
    rc.ga.seed = a.seed;
    if (a.parallelism) {
        rc.ga.parallelism = *a.parallelism;
    }
    if (a.generations) {
        rc.ga.generations = *a.generations;
    }
    if (a.population) {
        rc.ga.population = *a.population;
    }
    if (a.timeout_s) {
        rc.eval.plan.timeout_s = *a.timeout_s;
    }
    if (a.reproducible) {
        rc.eval.plan.use_wall_clock = false;
        rc.ga.record_timing = false;
    }
    rc.ga.validate();
    const auto& w = rc.eval.weights;
    if (w.c_J < 0 || w.c_M < 0 || w.c_t < 0 || (w.c_J == 0 && w.c_M == 0 && w.c_t == 0)) {
        throw Error("cost weights must be nonnegative with at least one positive");
    }
    return rc;
}

json config_to_json(const RunConfig& rc, const CommonArgs& a)
{
    const auto& p = rc.eval.plan;
    return {{"modules", a.modules},
            {"task", a.task},
            {"seed", rc.ga.seed},
            {"reproducible", a.reproducible},
            {"tolerance_override", a.tolerance.empty() ? json(nullptr) : json(a.tolerance)},
            {"ga",
             {{"chromosome_length", rc.ga.chromosome_length},
              {"population", rc.ga.population},
              {"generations", rc.ga.generations},
              {"mutation_prob", rc.ga.mutation_prob},
              {"joint_bias", rc.ga.joint_bias},
              {"parent_fraction", rc.ga.parent_fraction},
              {"parallelism", rc.ga.parallelism}}},
            {"weights", {{"c_J", rc.eval.weights.c_J}, {"c_M", rc.eval.weights.c_M}, {"c_t", rc.eval.weights.c_t}}},
            {"planner",
             {{"timeout_s", p.timeout_s},
              {"max_iterations", p.max_iterations},
              {"use_wall_clock", p.use_wall_clock},
              {"extend_step", p.extend_step},
              {"edge_resolution", p.edge_resolution},
              {"shortcut_iterations", p.shortcut_iterations},
              {"sample_dt", p.sample_dt},
              {"torque_dt", p.torque_dt},
              {"self_collision", p.self_collision}}},
            {"ik", {{"max_restarts", p.ik.max_restarts}, {"max_iterations", p.ik.max_iterations}}},
            {"baseline_weights", rc.baseline.k},
            {"self_collision_f3", rc.eval.self_collision_f3}};
}

Task load_task_with_override(const CommonArgs& a)
{
    Task task = load_task(a.task);
    if (!a.tolerance.empty()) {
        const auto preset = parse_tolerance_preset(a.tolerance);
        if (!preset) {
            throw ParseError("unknown tolerance preset '" + a.tolerance + "'");
        }
        task.tol = tolerance_preset(*preset);
        for (auto& g : task.goals) {
            g.tolerances.reset();
        }
    }
    return task;
}

json solution_json(const RunResult& r, const Task& task, const RunConfig& rc, const ModuleLibrary& library)
{
    json j = {{"task", task.name}, {"seed", rc.ga.seed}, {"module_ids", r.best_ids}};
    j["chromosome"] = r.best_chromosome.genes;
    j["fitness"] = fitness_to_json(r.best_fitness);
    int n_J = 0;
    for (int id : r.best_ids) {
        n_J += static_cast<int>(library.by_id(id).joint_count());
    }
    const int n_M = static_cast<int>(r.best_ids.size());
    j["n_J"] = n_J;
    j["n_M"] = n_M;
    j["weights"] = {{"c_J", rc.eval.weights.c_J}, {"c_M", rc.eval.weights.c_M}, {"c_t", rc.eval.weights.c_t}};
    if (r.best_cost && r.trajectory) {
        const double t_max = r.trajectory->t_max();
        j["C_T"] = *r.best_cost;
        j["t_max"] = t_max;
        j["setup_cost"] = rc.eval.weights.setup_cost(n_J, n_M);
        j["process_cost"] = rc.eval.weights.process_cost(t_max);
    } else {
        j["C_T"] = nullptr;
        j["t_max"] = nullptr;
    }
    j["evaluations"] = r.evaluations;
    return j;
}

void write_run(const fs::path& out, const RunResult& r, const Task& task, const RunConfig& rc,
               const CommonArgs& a, const ModuleLibrary& library)
{
    fs::create_directories(out);
    write_json(out / "solution.json", solution_json(r, task, rc, library));
    write_json(out / "trajectory.json", r.trajectory ? trajectory_to_json(*r.trajectory) : json(nullptr));
    write_text(out / "history.csv", history_to_csv(r.history));
    write_json(out / "history.json", history_to_json(r.history));
    write_json(out / "config_resolved.json", config_to_json(rc, a));
    if (!a.reproducible) {
        write_json(out / "timing.json", {{"mean_eval_ms", r.mean_eval_ms}, {"depth_histogram", r.depth_histogram}});
    }
}

int cmd_optimize(const CommonArgs& a)
{
    const ModuleLibrary library = load_library(a.modules);
    const Task task = load_task_with_override(a);
    const RunConfig rc = resolve_config(a);
    const RunResult r = run(library, task, rc.ga, rc.eval);
    write_run(a.out, r, task, rc, a, library);
    std::cout << fitness_to_json(r.best_fitness).dump() << '\n';
    return r.best_cost ? exit_ok : exit_infeasible;
}

std::string fmt_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string join_ids(const std::vector<int>& ids, char sep)
{
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        s += (i ? std::string(1, sep) : std::string()) + std::to_string(ids[i]);
    }
    return s;
}

int cmd_baseline(const CommonArgs& a)
{
    const ModuleLibrary library = load_library(a.modules);
    const Task task = load_task_with_override(a);
    const RunConfig rc = resolve_config(a);
    const BaselineResult r = run_baseline(library, task, rc.ga, rc.eval, rc.baseline);
    write_run(a.out, r.run, task, rc, a, library);
    std::ostringstream csv;
    csv << "rank,module_ids,f_B,n_J,n_M,C_T,t_max\n";
    for (std::size_t i = 0; i < r.finalists.size(); ++i) {
        const auto& f = r.finalists[i];
        csv << i + 1 << ',' << join_ids(f.ids, ' ') << ',' << fmt_double(f.f_B) << ',' << f.n_J << ',' << f.n_M
            << ',' << (f.cost ? fmt_double(*f.cost) : "") << ','
            << (f.trajectory ? fmt_double(f.trajectory->t_max()) : "") << '\n';
    }
    write_text(fs::path(a.out) / "stage2.csv", csv.str());
    std::cout << fitness_to_json(r.run.best_fitness).dump() << '\n';
    return r.run.best_cost ? exit_ok : exit_infeasible;
}

struct GenArgs {
    std::string setting;
    int d = 3;
    int count = 20;
    std::uint64_t seed = 0;
    std::string out = "tasks";
    double reach = 2.0;
};

int cmd_gen_tasks(const GenArgs& g)
{
    if (g.d < 1 || g.count < 0) {
        throw Error("d must be at least 1 and count nonnegative");
    }
    constexpr int max_attempts = 100;
    fs::create_directories(g.out);
    for (int k = 0; k < g.count; ++k) {
        bool written = false;
        for (int attempt = 0; attempt < max_attempts && !written; ++attempt) {
            const auto seed = derive_seed(g.seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(attempt)});
            Task t = g.setting == "synthetic1" ? generate_synthetic1(g.d, seed) : generate_synthetic2(g.d, seed);
            if (!plausibly_solvable(t, g.reach)) {
                continue;
            }
            t.name = g.setting + "_d" + std::to_string(g.d) + "_" + std::to_string(k);
            write_json(fs::path(g.out) / (t.name + ".json"), task_to_json(t));
            written = true;
        }
        if (!written) {
            std::cerr << "modsynth: no plausibly solvable task after " << max_attempts << " attempts\n";
            return exit_input;
        }
    }
    return exit_ok;
}

int cmd_evaluate(const CommonArgs& a, const std::string& ids_text)
{
    const ModuleLibrary library = load_library(a.modules);
    const Task task = load_task_with_override(a);
    const RunConfig rc = resolve_config(a);
    std::vector<int> ids;
    std::stringstream ss(ids_text);
    for (std::string item; std::getline(ss, item, ',');) {
        int v = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
            throw ParseError("malformed module id '" + item + "'");
        }
        ids.push_back(v);
    }
    const Assembly assembly = assemble(library, std::span<const int>(ids));
    const Evaluation ev = evaluate(assembly, task, rc.eval, stream_seed(a.seed, Stream::evaluation));
    json out = {{"module_ids", ids}, {"fitness", fitness_to_json(ev.fitness)}, {"depth", ev.fitness.depth}};
    out["stage_ms"] = ev.stage_ms;
    if (ev.cost && ev.trajectory) {
        const double t_max = ev.trajectory->t_max();
        out["cost"] = {{"n_J", assembly.dof()},
                       {"n_M", assembly.module_count()},
                       {"t_max", t_max},
                       {"setup_cost", rc.eval.weights.setup_cost(assembly.dof(), assembly.module_count())},
                       {"process_cost", rc.eval.weights.process_cost(t_max)},
                       {"C_T", *ev.cost}};
    }
    std::cout << out.dump(2) << '\n';
    return exit_ok;
}

struct Interval95 {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

Interval95 bootstrap(const std::vector<double>& xs, int resamples, Rng& rng)
{
    Interval95 r;
    if (xs.empty()) {
        r.mean = r.lo = r.hi = std::nan("");
        return r;
    }
    r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sum += xs[uniform_index(rng, xs.size())];
        }
        means.push_back(sum / static_cast<double>(xs.size()));
    }
    std::sort(means.begin(), means.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(means.size() - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const auto j = std::min(i + 1, means.size() - 1);
        return means[i] + (pos - static_cast<double>(i)) * (means[j] - means[i]);
    };
    r.lo = quantile(0.025);
    r.hi = quantile(0.975);
    return r;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& out, std::uint64_t seed)
{
    struct Row {
        std::string task;
        bool achieved = false;
        double cost = 0.0;
        int n_J = 0;
        double t_max = 0.0;
        double w_J = 0.0;
    };
    std::vector<Row> rows;
    for (const auto& dir : runs) {
        const fs::path p(dir);
        const json sol = read_json(fs::is_directory(p) ? p / "solution.json" : p);
        Row r;
        try {
            r.task = sol.at("task").get<std::string>();
            r.achieved = !sol.at("C_T").is_null();
            r.n_J = sol.at("n_J").get<int>();
            r.w_J = sol.at("weights").at("c_J").get<double>();
            if (r.achieved) {
                r.cost = sol["C_T"].get<double>();
                r.t_max = sol.at("t_max").get<double>();
            }
        } catch (const json::exception& e) {
            throw ParseError(dir + ": " + e.what());
        }
        rows.push_back(r);
    }
    if (rows.empty()) {
        throw Error("report needs at least one run");
    }

    std::map<std::string, std::vector<Row>> by_task;
    for (const auto& r : rows) {
        by_task[r.task].push_back(r);
    }
    std::ostringstream summary;
    summary << "task,runs,achieved,C_T,n_J,t_max\n";
    for (const auto& [task, rs] : by_task) {
        const Row* best = nullptr;
        int achieved = 0;
        for (const auto& r : rs) {
            if (r.achieved) {
                ++achieved;
                if (best == nullptr || r.cost < best->cost) {
                    best = &r;
                }
            }
        }
        summary << task << ',' << rs.size() << ',' << achieved << ',';
        if (best != nullptr) {
            summary << fmt_double(best->cost) << ',' << best->n_J << ',' << fmt_double(best->t_max);
        } else {
            summary << ",,";
        }
        summary << '\n';
    }

    std::map<double, std::vector<Row>> by_weight;
    for (const auto& r : rows) {
        if (r.achieved) {
            by_weight[r.w_J].push_back(r);
        }
    }
    Rng rng(seed);
    std::ostringstream sweep;
    sweep << "w_J,runs,n_J_mean,n_J_ci_lo,n_J_ci_hi,t_max_mean,t_max_ci_lo,t_max_ci_hi\n";
    for (const auto& [w, rs] : by_weight) {
        std::vector<double> nj, tm;
        for (const auto& r : rs) {
            nj.push_back(r.n_J);
            tm.push_back(r.t_max);
        }
        const auto a = bootstrap(nj, 1000, rng);
        const auto b = bootstrap(tm, 1000, rng);
        sweep << fmt_double(w) << ',' << rs.size() << ',' << fmt_double(a.mean) << ',' << fmt_double(a.lo) << ','
              << fmt_double(a.hi) << ',' << fmt_double(b.mean) << ',' << fmt_double(b.lo) << ',' << fmt_double(b.hi)
              << '\n';
    }
    write_text(fs::path(out) / "summary.csv", summary.str());
    write_text(fs::path(out) / "sweep.csv", sweep.str());
    return exit_ok;
}

}  // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"Task-driven synthesis of modular manipulator compositions"};
    app.require_subcommand(1);

    CommonArgs opt_args, base_args, eval_args;
    auto* optimize = app.add_subcommand("optimize", "run the lexicographic genetic algorithm");
    add_common(*optimize, opt_args, true);

    auto* baseline = app.add_subcommand("baseline", "run the hierarchical-elimination baseline");
    add_common(*baseline, base_args, true);

    GenArgs gen;
    auto* gen_tasks = app.add_subcommand("gen-tasks", "generate synthetic tasks");
    gen_tasks->add_option("--setting", gen.setting, "synthetic1 or synthetic2")
        ->required()
        ->check(CLI::IsMember({"synthetic1", "synthetic2"}));
    gen_tasks->add_option("--d", gen.d, "goals and obstacles per task");
    gen_tasks->add_option("--count", gen.count, "number of tasks");
    gen_tasks->add_option("--seed", gen.seed, "root random seed");
    gen_tasks->add_option("--out", gen.out, "output directory");
    gen_tasks->add_option("--reach", gen.reach, "reach estimate for the solvability heuristic");

    std::string ids_text;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate one assembly");
    add_common(*evaluate_cmd, eval_args, false);
    evaluate_cmd->add_option("--ids", ids_text, "comma-separated module ids, base first")->required();

    std::vector<std::string> runs;
    std::string report_out = "report";
    std::uint64_t report_seed = 0;
    auto* report = app.add_subcommand("report", "aggregate run outputs");
    report->add_option("runs", runs, "run directories or solution.json files")->required();
    report->add_option("--out", report_out, "output directory");
    report->add_option("--seed", report_seed, "bootstrap seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (optimize->parsed()) {
            return cmd_optimize(opt_args);
        }
        if (baseline->parsed()) {
            return cmd_baseline(base_args);
        }
        if (gen_tasks->parsed()) {
            return cmd_gen_tasks(gen);
        }
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(eval_args, ids_text);
        }
        if (report->parsed()) {
            return cmd_report(runs, report_out, report_seed);
        }
    } catch (const Error& e) {
        std::cerr << "modsynth: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "modsynth: " << e.what() << '\n';
        return exit_input;
    }
    return exit_input;
}

}  // namespace modsynth
