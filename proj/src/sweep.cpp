#include "gpusched/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "gpusched/priority_alloc.hpp"
#include "gpusched/server_analysis.hpp"
#include "gpusched/simulator.hpp"
#include "gpusched/svg_render.hpp"
#include "gpusched/sync_baseline.hpp"

namespace gpusched {

namespace {
constexpr const char* kToolVersion = "gpusched 1.0";
constexpr duration_us kLcmCap = 100'000'000;        // hyperperiod saturation
constexpr duration_us kSimHorizonCap = 10'000'000;  // for simulation-backed verdicts
} // namespace

const char* to_string(SweepPolicy p)
{
    switch (p) {
    case SweepPolicy::server_rd: return "server_rd";
    case SweepPolicy::server_rd_jd: return "server_rd_jd";
    case SweepPolicy::sync_reconstructed: return "sync_reconstructed";
    case SweepPolicy::sim_only: return "sim_only";
    }
    return "unknown";
}

SweepPolicy sweep_policy_from_string(const std::string& s)
{
    if (s == "server_rd")
        return SweepPolicy::server_rd;
    if (s == "server_rd_jd")
        return SweepPolicy::server_rd_jd;
    if (s == "sync_reconstructed")
        return SweepPolicy::sync_reconstructed;
    if (s == "sim_only")
        return SweepPolicy::sim_only;
    throw std::invalid_argument("unknown sweep policy: " + s);
}

bool is_sweep_param(const std::string& param)
{
    static const char* names[] = {"gpu_ratio_pct",  "gpu_task_pct", "num_tasks",
                                  "eta",            "epsilon_us",   "misc_pct",
                                  "min_period_ms",  "small_task_fraction"};
    for (const char* n : names)
        if (param == n)
            return true;
    return false;
}

void apply_sweep_param(GenConfig& config, const std::string& param, double value)
{
    if (param == "gpu_ratio_pct") {
        config.gpu_ratio = {value / 100.0, value / 100.0};
    } else if (param == "gpu_task_pct") {
        config.gpu_task_fraction = {value / 100.0, value / 100.0};
    } else if (param == "num_tasks") {
        int n = static_cast<int>(value);
        config.n_range = std::pair<int, int>{n, n};
    } else if (param == "eta") {
        int e = static_cast<int>(value);
        config.eta_range = {e, e};
    } else if (param == "epsilon_us") {
        config.epsilon = static_cast<duration_us>(value);
    } else if (param == "misc_pct") {
        config.misc_ratio = {value / 100.0, value / 100.0};
    } else if (param == "min_period_ms") {
        config.period_range_ms.first = static_cast<int>(value);
    } else if (param == "small_task_fraction") {
        if (!config.bimodal)
            config.bimodal = BimodalUtil{};
        config.bimodal->small_fraction = value;
    } else {
        throw std::invalid_argument("unknown sweep parameter: " + param);
    }
}

double SweepResult::fraction_at(double value, SweepPolicy policy) const
{
    for (const auto& p : points)
        if (p.value == value && p.policy == policy)
            return p.fraction();
    throw std::invalid_argument("no sweep point for requested value/policy");
}

namespace {

duration_us taskset_hyperperiod(const Taskset& ts)
{
    duration_us h = 1;
    for (const auto& t : ts.tasks)
        h = lcm_capped(h, t.period, kLcmCap);
    return h;
}

bool needs_server_side(const std::vector<SweepPolicy>& policies)
{
    for (auto p : policies)
        if (p == SweepPolicy::server_rd || p == SweepPolicy::server_rd_jd || p == SweepPolicy::sim_only)
            return true;
    return false;
}

struct PointAccumulator {
    std::atomic<int> schedulable{0};
    std::atomic<long long> analysis_ns{0};
};

/// Verdict of one policy on one generated (unallocated) taskset.
bool evaluate_policy(SweepPolicy policy, const Taskset* server_alloc, const Taskset* sync_alloc,
                     long long* analysis_ns)
{
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    switch (policy) {
    case SweepPolicy::server_rd:
        ok = analyze(*server_alloc, WaitingBoundMode::request_driven_only).all_schedulable;
        break;
    case SweepPolicy::server_rd_jd:
        ok = analyze(*server_alloc, WaitingBoundMode::request_and_job_driven).all_schedulable;
        break;
    case SweepPolicy::sync_reconstructed:
        // Zero lock overhead, matching how the locking baseline is scored in
        // schedulability experiments.
        ok = sync_analyze(*sync_alloc, 0).all_schedulable;
        break;
    case SweepPolicy::sim_only: {
        SimConfig cfg;
        cfg.horizon = std::min<duration_us>(3 * taskset_hyperperiod(*server_alloc), kSimHorizonCap);
        cfg.release_model = ReleaseModel::periodic;
        cfg.collect_trace = false;
        ok = simulate(*server_alloc, cfg).total_misses() == 0;
        break;
    }
    }
    *analysis_ns +=
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
            .count();
    return ok;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec, int jobs)
{
    if (spec.values.empty())
        throw std::invalid_argument("run_sweep: empty value list");
    if (!is_sweep_param(spec.param))
        throw std::invalid_argument("run_sweep: unknown parameter " + spec.param);
    if (spec.tasksets_per_point < 1)
        throw std::invalid_argument("run_sweep: tasksets_per_point must be >= 1");

    const int num_values = static_cast<int>(spec.values.size());
    const int num_policies = static_cast<int>(spec.policies.size());
    const int per_point = spec.tasksets_per_point;

    std::vector<GenConfig> configs;
    for (double v : spec.values) {
        GenConfig c = spec.base;
        apply_sweep_param(c, spec.param, v);
        configs.push_back(c);
    }

    std::vector<std::vector<PointAccumulator>> acc(num_values);
    for (auto& row : acc)
        row = std::vector<PointAccumulator>(num_policies);

    const bool want_server = needs_server_side(spec.policies);
    const bool want_sync =
        std::count(spec.policies.begin(), spec.policies.end(), SweepPolicy::sync_reconstructed) > 0;

    auto work = [&](int vi, int k) {
        GenConfig item = configs[vi];
        // Same per-index seed at every sweep value couples the samples.
        item.seed = batch_item_seed(spec.base.seed, k);
        try {
            Taskset generated = generate(item);

            Taskset server_alloc;
            if (want_server) {
                AllocationRequest req;
                req.tasks = generated.tasks;
                req.platform = generated.platform;
                req.platform.policy = ArbitrationPolicy::gpu_server;
                req.heuristic = PackingHeuristic::worst_fit_decreasing;
                server_alloc = allocate(req).taskset;
            }
            Taskset sync_alloc;
            if (want_sync) {
                AllocationRequest req;
                req.tasks = generated.tasks;
                req.platform = generated.platform;
                req.platform.policy = ArbitrationPolicy::sync_lock;
                req.platform.server_core.reset();
                req.heuristic = PackingHeuristic::worst_fit_decreasing;
                sync_alloc = allocate(req).taskset;
            }

            for (int pi = 0; pi < num_policies; pi++) {
                long long ns = 0;
                bool ok = evaluate_policy(spec.policies[pi], &server_alloc, &sync_alloc, &ns);
                if (ok)
                    acc[vi][pi].schedulable.fetch_add(1, std::memory_order_relaxed);
                acc[vi][pi].analysis_ns.fetch_add(ns, std::memory_order_relaxed);
            }
        } catch (const std::exception&) {
            // Analysis or generation failure counts as unschedulable for
            // every policy; the sweep keeps going.
        }
    };

    const long total_units = static_cast<long>(num_values) * per_point;
    if (jobs <= 1) {
        for (long u = 0; u < total_units; u++)
            work(static_cast<int>(u / per_point), static_cast<int>(u % per_point));
    } else {
        std::atomic<long> cursor{0};
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int j = 0; j < jobs; j++) {
            pool.emplace_back([&]() {
                for (;;) {
                    long u = cursor.fetch_add(1);
                    if (u >= total_units)
                        return;
                    work(static_cast<int>(u / per_point), static_cast<int>(u % per_point));
                }
            });
        }
        for (auto& th : pool)
            th.join();
    }

    SweepResult result;
    result.param = spec.param;
    result.seed = spec.base.seed;
    result.tool_version = kToolVersion;
    for (int vi = 0; vi < num_values; vi++) {
        for (int pi = 0; pi < num_policies; pi++) {
            SweepPoint p;
            p.value = spec.values[vi];
            p.policy = spec.policies[pi];
            p.schedulable = acc[vi][pi].schedulable.load();
            p.total = per_point;
            p.mean_analysis_ms =
                static_cast<double>(acc[vi][pi].analysis_ns.load()) / 1e6 / per_point;
            result.points.push_back(p);
        }
    }
    std::sort(result.points.begin(), result.points.end(), [](const SweepPoint& a, const SweepPoint& b) {
        if (a.value != b.value)
            return a.value < b.value;
        return std::string(to_string(a.policy)) < to_string(b.policy);
    });
    return result;
}

std::string sweep_to_csv(const SweepResult& result)
{
    std::ostringstream out;
    out << "param,value,policy,sched_fraction,n\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (const auto& p : result.points)
        out << result.param << ',' << p.value << ',' << to_string(p.policy) << ',' << p.fraction()
            << ',' << p.total << '\n';
    return out.str();
}

void emit_sweep_outputs(const SweepResult& result, const std::string& out_dir)
{
    std::filesystem::create_directories(out_dir);
    std::string base = out_dir + "/sweep_" + result.param;
    {
        std::ofstream csv(base + ".csv");
        if (!csv)
            throw std::runtime_error("cannot write " + base + ".csv");
        csv << sweep_to_csv(result);
    }

    std::vector<ChartSeries> series;
    std::vector<SweepPolicy> seen;
    for (const auto& p : result.points)
        if (std::find(seen.begin(), seen.end(), p.policy) == seen.end())
            seen.push_back(p.policy);
    for (auto policy : seen) {
        ChartSeries s;
        s.label = to_string(policy);
        for (const auto& p : result.points)
            if (p.policy == policy)
                s.points.push_back({p.value, p.fraction()});
        series.push_back(std::move(s));
    }
    write_line_chart_svg(series, "schedulable fraction vs " + result.param, result.param,
                         "fraction", base + ".svg");
}

SweepSpec sweep_spec_from_json(const std::string& json_text)
{
    nlohmann::json j = nlohmann::json::parse(json_text);
    SweepSpec spec;
    if (j.contains("base"))
        spec.base = gen_config_from_json(j.at("base").dump());
    spec.param = j.at("param").get<std::string>();
    for (const auto& v : j.at("values"))
        spec.values.push_back(v.get<double>());
    if (j.contains("policies")) {
        spec.policies.clear();
        for (const auto& p : j.at("policies"))
            spec.policies.push_back(sweep_policy_from_string(p.get<std::string>()));
    }
    if (j.contains("tasksets_per_point"))
        spec.tasksets_per_point = j.at("tasksets_per_point").get<int>();
    if (j.contains("out"))
        spec.output_path = j.at("out").get<std::string>();
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open sweep spec: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return sweep_spec_from_json(buf.str());
}

CaseStudyReport run_case_study(const std::string& fixture_path, const std::string& out_dir)
{
    Taskset fixture = load_taskset(fixture_path);
    auto violations = validate(fixture);
    if (!violations.empty())
        throw std::runtime_error("case study fixture invalid: " + violations.front());

    CaseStudyReport report;
    report.hyperperiod = taskset_hyperperiod(fixture);

    // Locking baseline: measured lock overhead, split across acquire and release.
    Taskset sync_ts = fixture;
    sync_ts.platform.policy = ArbitrationPolicy::sync_lock;
    sync_ts.platform.server_core.reset();

    SimConfig sync_cfg;
    sync_cfg.horizon = report.hyperperiod;
    sync_cfg.release_model = ReleaseModel::periodic;
    sync_cfg.lock_acquire_overhead = 7;
    sync_cfg.lock_release_overhead = 7;
    SimResult sync_sim = simulate(sync_ts, sync_cfg);

    // Server policy: measured server invocation overhead.
    Taskset server_ts = fixture;
    server_ts.platform.policy = ArbitrationPolicy::gpu_server;
    server_ts.platform.epsilon = 45;
    if (!server_ts.platform.server_core)
        server_ts.platform.server_core = server_ts.platform.num_cores - 1;

    SimConfig server_cfg;
    server_cfg.horizon = report.hyperperiod;
    server_cfg.release_model = ReleaseModel::periodic;
    SimResult server_sim = simulate(server_ts, server_cfg);

    report.sync_misses = sync_sim.total_misses();
    report.server_misses = server_sim.total_misses();
    for (const auto& t : fixture.tasks) {
        CaseStudyReport::Row row;
        row.task_id = t.id;
        row.name = t.name;
        row.worst_sync = sync_sim.stats_for(t.id)->worst_response;
        row.worst_server = server_sim.stats_for(t.id)->worst_response;
        report.rows.push_back(row);
        if (t.name == "cpu_matmul1") {
            report.cpu_matmul1_sync = row.worst_sync;
            report.cpu_matmul1_server = row.worst_server;
        }
    }
    for (auto b : sync_sim.core_busy)
        report.sync_cpu_busy += b;
    for (auto b : server_sim.core_busy)
        report.server_cpu_busy += b;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_gantt_svg(sync_sim, "case study, locking arbitration", out_dir + "/case_sync.svg");
        write_gantt_svg(server_sim, "case study, GPU server arbitration", out_dir + "/case_server.svg");
        write_trace_csv(sync_sim, out_dir + "/case_sync_trace.csv");
        write_trace_csv(server_sim, out_dir + "/case_server_trace.csv");
    }
    return report;
}

} // namespace gpusched
