#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "gpusched/priority_alloc.hpp"
#include "gpusched/server_analysis.hpp"
#include "gpusched/simulator.hpp"
#include "gpusched/svg_render.hpp"
#include "gpusched/sweep.hpp"
#include "gpusched/sync_baseline.hpp"
#include "gpusched/taskgen.hpp"

namespace {

using namespace gpusched;

constexpr int kExitOk = 0;
constexpr int kExitUnschedulable = 1;
constexpr int kExitInputError = 2;

int cmd_generate(const std::string& config_path, int count, const std::string& out_dir,
                 std::optional<std::uint64_t> seed)
{
    GenConfig config = config_path.empty() ? GenConfig{} : load_gen_config(config_path);
    if (seed)
        config.seed = *seed;
    std::filesystem::create_directories(out_dir);
    generate_batch(config, count, [&](int i, const Taskset& ts) {
        char name[32];
        std::snprintf(name, sizeof(name), "taskset_%05d.json", i);
        save_taskset(ts, out_dir + "/" + name);
    });
    std::printf("wrote %d taskset(s) to %s (config seed %llu)\n", count, out_dir.c_str(),
                static_cast<unsigned long long>(config.seed));
    return kExitOk;
}

int cmd_allocate(const std::string& in_path, const std::string& out_path, const std::string& heuristic)
{
    Taskset ts = load_taskset(in_path);

    AllocationRequest req;
    req.tasks = ts.tasks;
    req.platform = ts.platform;
    req.heuristic = heuristic == "ffd" ? PackingHeuristic::first_fit_decreasing
                                       : PackingHeuristic::worst_fit_decreasing;

    bool missing_priorities = false;
    for (const auto& t : req.tasks)
        missing_priorities = missing_priorities || !t.priority;
    if (missing_priorities)
        req.tasks = assign_rm_priorities(std::move(req.tasks));

    AllocationResult result = allocate(req);

    std::printf("%-18s %10s %6s   loads before\n", "item", "util", "core");
    for (const auto& step : result.log) {
        std::printf("%-18s %10.4f %6d   [", step.item.c_str(), step.item_utilization, step.core);
        for (std::size_t c = 0; c < step.load_before.size(); c++)
            std::printf("%s%.4f", c ? ", " : "", step.load_before[c]);
        std::printf("]\n");
    }

    save_taskset(result.taskset, out_path.empty() ? in_path : out_path);
    return kExitOk;
}

int cmd_analyze(const std::string& in_path, bool csv, const std::string& mode_name)
{
    Taskset ts = load_taskset(in_path);
    auto violations = validate(ts);
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::fprintf(stderr, "invalid taskset: %s\n", v.c_str());
        return kExitInputError;
    }

    if (ts.platform.policy == ArbitrationPolicy::sync_lock) {
        SyncAnalysisReport report = sync_analyze(ts, 0);
        if (csv) {
            std::printf("id,blocking_us,response_us,deadline_us,schedulable\n");
            for (const auto& b : report.per_task) {
                const Task* t = ts.find_task(b.task_id);
                std::printf("%d,%lld,%lld,%lld,%d\n", b.task_id,
                            static_cast<long long>(b.blocking), static_cast<long long>(b.response),
                            static_cast<long long>(t->deadline), b.schedulable ? 1 : 0);
            }
        } else {
            std::printf("lock-based bound (%s)\n", report.label);
            std::printf("%4s %14s %14s %14s  %s\n", "id", "blocking", "response", "deadline", "verdict");
            for (const auto& b : report.per_task) {
                const Task* t = ts.find_task(b.task_id);
                std::printf("%4d %14lld %14lld %14lld  %s\n", b.task_id,
                            static_cast<long long>(b.blocking), static_cast<long long>(b.response),
                            static_cast<long long>(t->deadline),
                            b.schedulable ? "schedulable" : "UNSCHEDULABLE");
            }
        }
        return report.all_schedulable ? kExitOk : kExitUnschedulable;
    }

    WaitingBoundMode mode = mode_name == "rd" ? WaitingBoundMode::request_driven_only
                                              : WaitingBoundMode::request_and_job_driven;
    AnalysisReport report = analyze(ts, mode);
    if (csv) {
        std::printf("id,b_rd_us,b_jd_us,b_w_us,b_gpu_us,response_us,deadline_us,schedulable\n");
        for (const auto& b : report.per_task) {
            const Task* t = ts.find_task(b.task_id);
            std::printf("%d,%lld,%lld,%lld,%lld,%lld,%lld,%d\n", b.task_id,
                        static_cast<long long>(b.b_rd), static_cast<long long>(b.b_jd),
                        static_cast<long long>(b.b_w), static_cast<long long>(b.b_gpu),
                        static_cast<long long>(b.response), static_cast<long long>(t->deadline),
                        b.schedulable ? 1 : 0);
        }
    } else {
        std::printf("%4s %12s %12s %12s %12s %12s %12s  %s\n", "id", "B_rd", "B_jd", "B_w", "B_gpu",
                    "W", "D", "verdict");
        for (const auto& b : report.per_task) {
            const Task* t = ts.find_task(b.task_id);
            std::printf("%4d %12lld %12lld %12lld %12lld %12lld %12lld  %s%s\n", b.task_id,
                        static_cast<long long>(b.b_rd), static_cast<long long>(b.b_jd),
                        static_cast<long long>(b.b_w), static_cast<long long>(b.b_gpu),
                        static_cast<long long>(b.response), static_cast<long long>(t->deadline),
                        b.schedulable ? "schedulable" : "UNSCHEDULABLE",
                        b.rd_diverged ? " (request-driven bound diverged)" : "");
        }
    }
    return report.all_schedulable ? kExitOk : kExitUnschedulable;
}

int cmd_simulate(const std::string& in_path, duration_us horizon, const std::string& policy,
                 const std::string& mode, std::uint64_t seed, const std::string& release,
                 const std::string& trace_path, const std::string& svg_path,
                 duration_us lock_acquire, duration_us lock_release)
{
    Taskset ts = load_taskset(in_path);
    if (policy == "sync_lock") {
        ts.platform.policy = ArbitrationPolicy::sync_lock;
        ts.platform.server_core.reset();
    } else if (policy == "gpu_server") {
        ts.platform.policy = ArbitrationPolicy::gpu_server;
        if (!ts.platform.server_core)
            ts.platform.server_core = ts.platform.num_cores - 1;
    }
    if (mode == "synchronous")
        ts.platform.access_mode = AccessMode::synchronous;
    else if (mode == "asynchronous")
        ts.platform.access_mode = AccessMode::asynchronous;

    SimConfig cfg;
    cfg.horizon = horizon;
    cfg.seed = seed;
    cfg.lock_acquire_overhead = lock_acquire;
    cfg.lock_release_overhead = lock_release;
    if (release == "sporadic")
        cfg.release_model = ReleaseModel::sporadic;
    else
        cfg.release_model = ReleaseModel::periodic;

    SimResult result = simulate(ts, cfg);

    std::printf("%4s %10s %10s %14s %14s %8s\n", "id", "released", "completed", "worst_resp_us",
                "mean_resp_us", "misses");
    for (const auto& s : result.per_task)
        std::printf("%4d %10ld %10ld %14lld %14.1f %8ld\n", s.task_id, s.jobs_released,
                    s.jobs_completed, static_cast<long long>(s.worst_response), s.mean_response,
                    s.deadline_misses);
    std::printf("total deadline misses: %ld\n", result.total_misses());
    duration_us busy = 0;
    for (auto b : result.core_busy)
        busy += b;
    std::printf("cpu busy %lld us over %d core(s), gpu busy %lld us\n", static_cast<long long>(busy),
                static_cast<int>(result.core_busy.size()), static_cast<long long>(result.gpu_busy));

    if (!trace_path.empty())
        write_trace_csv(result, trace_path);
    if (!svg_path.empty())
        write_gantt_svg(result, "simulation timeline", svg_path);
    return kExitOk;
}

int cmd_sweep(const std::string& spec_path, int jobs, std::optional<std::uint64_t> seed,
              const std::string& out_dir)
{
    SweepSpec spec = load_sweep_spec(spec_path);
    if (seed)
        spec.base.seed = *seed;
    if (!out_dir.empty())
        spec.output_path = out_dir;

    SweepResult result = run_sweep(spec, jobs);
    std::printf("%s", sweep_to_csv(result).c_str());
    if (!spec.output_path.empty()) {
        emit_sweep_outputs(result, spec.output_path);
        std::printf("outputs written to %s\n", spec.output_path.c_str());
    }
    return kExitOk;
}

int cmd_case_study(const std::string& fixture, const std::string& out_dir)
{
    CaseStudyReport report = run_case_study(fixture, out_dir);
    std::printf("hyperperiod: %lld us\n", static_cast<long long>(report.hyperperiod));
    std::printf("%4s %-14s %18s %18s\n", "id", "name", "worst_sync_us", "worst_server_us");
    for (const auto& row : report.rows)
        std::printf("%4d %-14s %18lld %18lld\n", row.task_id, row.name.c_str(),
                    static_cast<long long>(row.worst_sync), static_cast<long long>(row.worst_server));
    std::printf("deadline misses: lock-based %ld, server %ld\n", report.sync_misses,
                report.server_misses);
    std::printf("cpu_matmul1 worst response: lock-based %lld us vs server %lld us\n",
                static_cast<long long>(report.cpu_matmul1_sync),
                static_cast<long long>(report.cpu_matmul1_server));
    std::printf("total cpu busy: lock-based %lld us, server %lld us\n",
                static_cast<long long>(report.sync_cpu_busy),
                static_cast<long long>(report.server_cpu_busy));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"schedulability analysis, simulation and experiments for multicore tasksets "
                 "sharing one non-preemptive GPU"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate random taskset files");
    std::string gen_config, gen_out = "tasksets";
    int gen_count = 1;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--config", gen_config, "generator config json");
    gen->add_option("--count", gen_count, "number of tasksets");
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--seed", gen_seed, "seed override");

    // allocate
    auto* alloc = app.add_subcommand("allocate", "assign priorities and pack tasks onto cores");
    std::string alloc_in, alloc_out, alloc_heuristic = "wfd";
    alloc->add_option("taskset", alloc_in, "taskset json file")->required();
    alloc->add_option("--out", alloc_out, "output file (defaults to in-place)");
    alloc->add_option("--heuristic", alloc_heuristic, "wfd or ffd")
        ->check(CLI::IsMember({"wfd", "ffd"}));

    // analyze
    auto* ana = app.add_subcommand("analyze", "worst-case response-time analysis");
    std::string ana_in, ana_mode = "rd+jd";
    bool ana_csv = false;
    ana->add_option("taskset", ana_in, "taskset json file")->required();
    ana->add_flag("--csv", ana_csv, "machine-readable output");
    ana->add_option("--mode", ana_mode, "waiting bound: rd or rd+jd")
        ->check(CLI::IsMember({"rd", "rd+jd"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "discrete-event schedule simulation");
    std::string sim_in, sim_policy = "file", sim_mode = "file", sim_release = "periodic";
    std::string sim_trace, sim_svg;
    duration_us sim_horizon = 0;
    duration_us sim_lock_acq = 7, sim_lock_rel = 7;
    std::uint64_t sim_seed = 0;
    sim->add_option("taskset", sim_in, "taskset json file")->required();
    sim->add_option("--horizon", sim_horizon, "simulation horizon in us")->required();
    sim->add_option("--policy", sim_policy, "sync_lock, gpu_server, or file")
        ->check(CLI::IsMember({"sync_lock", "gpu_server", "file"}));
    sim->add_option("--mode", sim_mode, "synchronous, asynchronous, or file")
        ->check(CLI::IsMember({"synchronous", "asynchronous", "file"}));
    sim->add_option("--release", sim_release, "periodic or sporadic")
        ->check(CLI::IsMember({"periodic", "sporadic"}));
    sim->add_option("--seed", sim_seed, "seed for sporadic releases");
    sim->add_option("--trace", sim_trace, "write event trace csv");
    sim->add_option("--svg", sim_svg, "write timeline svg");
    sim->add_option("--lock-acquire-us", sim_lock_acq, "lock acquire overhead");
    sim->add_option("--lock-release-us", sim_lock_rel, "lock release overhead");

    // sweep
    auto* swp = app.add_subcommand("sweep", "schedulability sweep over one generator parameter");
    std::string swp_spec, swp_out;
    int swp_jobs = 1;
    std::optional<std::uint64_t> swp_seed;
    swp->add_option("--spec", swp_spec, "sweep spec json")->required();
    swp->add_option("--jobs", swp_jobs, "worker threads");
    swp->add_option("--seed", swp_seed, "seed override");
    swp->add_option("--out", swp_out, "output directory override");

    // case-study
    auto* cs = app.add_subcommand("case-study", "simulate the bundled case-study taskset");
    std::string cs_fixture = "fixtures/case_study.json", cs_out = "case_study_out";
    cs->add_option("--fixture", cs_fixture, "fixture taskset json");
    cs->add_option("--out", cs_out, "output directory for timelines");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(gen_config, gen_count, gen_out, gen_seed);
        if (alloc->parsed())
            return cmd_allocate(alloc_in, alloc_out, alloc_heuristic);
        if (ana->parsed())
            return cmd_analyze(ana_in, ana_csv, ana_mode);
        if (sim->parsed())
            return cmd_simulate(sim_in, sim_horizon, sim_policy, sim_mode, sim_seed, sim_release,
                                sim_trace, sim_svg, sim_lock_acq, sim_lock_rel);
        if (swp->parsed())
            return cmd_sweep(swp_spec, swp_jobs, swp_seed, swp_out);
        if (cs->parsed())
            return cmd_case_study(cs_fixture, cs_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    }
    return kExitOk;
}
