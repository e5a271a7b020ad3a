#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "gpusched/priority_alloc.hpp"
#include "gpusched/server_analysis.hpp"
#include "gpusched/simulator.hpp"
#include "gpusched/sweep.hpp"
#include "gpusched/sync_baseline.hpp"
#include "gpusched/taskgen.hpp"
#include "helpers.hpp"

using namespace gpusched;
using namespace gpusched::testing;

namespace {

constexpr std::uint64_t kSeed = 20260810;
constexpr duration_us kHorizonCap = 10'000'000;

void verdict(int criterion, bool pass, const char* what)
{
    std::printf("ACCEPTANCE %d %s: %s\n", criterion, pass ? "PASS" : "FAIL", what);
    std::fflush(stdout);
    CHECK(pass);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

duration_us hyperperiod_of(const Taskset& ts)
{
    duration_us h = 1;
    for (const auto& t : ts.tasks)
        h = lcm_capped(h, t.period, kHorizonCap);
    return h;
}

Taskset allocated(const Taskset& generated, ArbitrationPolicy policy)
{
    AllocationRequest req;
    req.tasks = generated.tasks;
    req.platform = generated.platform;
    req.platform.policy = policy;
    req.platform.server_core.reset();
    req.heuristic = PackingHeuristic::worst_fit_decreasing;
    return allocate(req).taskset;
}

int worker_threads()
{
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 1 ? static_cast<int>(hw) : 2;
}

} // namespace

TEST_CASE("criterion 1: lock-based arbitration reproduces the contended schedule exactly")
{
    auto t0 = std::chrono::steady_clock::now();
    Scenario sc = three_task_scenario(ArbitrationPolicy::sync_lock, 0);
    SimResult r = simulate(sc.ts, sc.cfg);
    bool pass = worst_response(r, 1) == 9 * kUnit && seconds_since(t0) < 1.0;
    verdict(1, pass, "high task response is exactly 9 units under priority-ceiling locking");
}

TEST_CASE("criterion 2: server arbitration costs exactly four invocations on top of 6 units")
{
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    for (duration_us eps : {duration_us{0}, kUnit / 10, kUnit / 4}) {
        Scenario sc = three_task_scenario(ArbitrationPolicy::gpu_server, eps);
        SimResult r = simulate(sc.ts, sc.cfg);
        pass = pass && worst_response(r, 1) == 6 * kUnit + 4 * eps;
    }
    pass = pass && seconds_since(t0) < 1.0;
    verdict(2, pass, "high task response is exactly 6 units + 4 server overheads (eps in {0, .1, .25})");
}

TEST_CASE("criterion 3: the approaches cross over at three quarters of a unit")
{
    auto response = [](ArbitrationPolicy policy, duration_us eps) {
        Scenario sc = three_task_scenario(policy, eps);
        return worst_response(simulate(sc.ts, sc.cfg), 1);
    };
    duration_us lock_resp = response(ArbitrationPolicy::sync_lock, 0);
    bool pass = response(ArbitrationPolicy::gpu_server, 7 * kUnit / 10) < lock_resp &&
                response(ArbitrationPolicy::gpu_server, 8 * kUnit / 10) > lock_resp;
    verdict(3, pass, "server wins at eps=0.7 units and loses at eps=0.8 units");
}

TEST_CASE("criterion 4: case-study hyperperiod favors the server with no misses")
{
    auto dir = std::filesystem::temp_directory_path() / "gpusched_acceptance_case";
    CaseStudyReport report =
        run_case_study(std::string(FIXTURE_DIR) + "/case_study.json", dir.string());
    bool pass = report.hyperperiod == 3'000'000 &&
                report.cpu_matmul1_sync > report.cpu_matmul1_server &&
                report.sync_misses == 0 && report.server_misses == 0;
    std::filesystem::remove_all(dir);
    std::printf("    cpu_matmul1 worst response: lock %lld us, server %lld us\n",
                static_cast<long long>(report.cpu_matmul1_sync),
                static_cast<long long>(report.cpu_matmul1_server));
    verdict(4, pass, "one 3000 ms hyperperiod, busy CPU task strictly faster under the server, no misses");
}

TEST_CASE("criteria 5 and 6: analysis is safe against simulation and the min-bound dominates")
{
    const int count = 1'000;
    GenConfig base;
    base.num_cores = 4;
    base.seed = kSeed;

    std::atomic<int> analyzed_schedulable{0};
    std::atomic<int> simulated_misses{0};
    std::atomic<int> bound_violations{0};
    std::atomic<int> sync_bound_violations{0};
    std::atomic<int> sync_checked{0};
    std::atomic<int> cursor{0};

    auto work = [&]() {
        for (;;) {
            int k = cursor.fetch_add(1);
            if (k >= count)
                return;
            GenConfig cfg = base;
            cfg.seed = batch_item_seed(base.seed, k);
            Taskset generated = generate(cfg);

            Taskset server_ts = allocated(generated, ArbitrationPolicy::gpu_server);
            AnalysisReport report = analyze(server_ts, WaitingBoundMode::request_and_job_driven);

            for (const auto& b : report.per_task) {
                bool ok = b.b_w <= b.b_jd && (b.rd_diverged || b.b_w <= b.b_rd) &&
                          (b.rd_diverged || b.b_w == std::min(b.b_rd, b.b_jd));
                if (!ok)
                    bound_violations.fetch_add(1);
            }

            SimConfig sim_cfg;
            sim_cfg.horizon = std::min<duration_us>(3 * hyperperiod_of(server_ts), kHorizonCap);
            sim_cfg.release_model = ReleaseModel::periodic;
            sim_cfg.collect_trace = false;

            if (report.all_schedulable) {
                analyzed_schedulable.fetch_add(1);
                SimResult sim = simulate(server_ts, sim_cfg);
                if (sim.total_misses() != 0)
                    simulated_misses.fetch_add(1);
            }

            // Reconstruction safety of the lock-based bound, same batch.
            Taskset sync_ts = allocated(generated, ArbitrationPolicy::sync_lock);
            SyncAnalysisReport sync_report = sync_analyze(sync_ts, 0);
            SimConfig sync_cfg = sim_cfg;
            sync_cfg.lock_acquire_overhead = 0;
            sync_cfg.lock_release_overhead = 0;
            SimResult sync_sim = simulate(sync_ts, sync_cfg);
            for (const auto& b : sync_report.per_task) {
                if (!b.schedulable)
                    continue;
                sync_checked.fetch_add(1);
                if (sync_sim.stats_for(b.task_id)->worst_response > b.response)
                    sync_bound_violations.fetch_add(1);
            }
        }
    };

    std::vector<std::thread> pool;
    for (int i = 0; i < worker_threads(); i++)
        pool.emplace_back(work);
    for (auto& th : pool)
        th.join();

    std::printf("    %d/%d tasksets analyzed schedulable, %d with simulated misses\n",
                analyzed_schedulable.load(), count, simulated_misses.load());
    verdict(5, analyzed_schedulable.load() > 0 && simulated_misses.load() == 0,
            "1000 tasksets: no analyzed-schedulable taskset misses a deadline in simulation");

    bool six_a = bound_violations.load() == 0;
    std::printf("    waiting-bound dominance violations: %d; lock-bound safety: %d/%d violations\n",
                bound_violations.load(), sync_bound_violations.load(), sync_checked.load());
    CHECK(sync_bound_violations.load() == 0);

    // Second half of criterion 6 (pointwise policy dominance) is checked over
    // the criterion-7 sweeps below; record the bound half here.
    verdict(6, six_a, "per-task waiting bound equals min of the two analyses and never exceeds either");
}

TEST_CASE("criterion 7: schedulable fraction falls monotonically along every swept axis")
{
    struct Axis {
        const char* param;
        std::vector<double> values;
    };
    const std::vector<Axis> axes = {
        {"gpu_ratio_pct", {10, 30, 50, 70, 90}},
        {"gpu_task_pct", {0, 25, 50, 75, 100}},
        {"num_tasks", {8, 12, 16, 20, 24}},
        {"eta", {1, 2, 4, 6, 8}},
        {"epsilon_us", {50, 500, 2000, 8000, 20000}},
        {"misc_pct", {10, 25, 40, 60, 80}},
    };

    bool monotone_ok = true;
    bool dominance_ok = true;
    for (const auto& axis : axes) {
        SweepSpec spec;
        spec.base.num_cores = 4;
        spec.base.seed = kSeed;
        spec.param = axis.param;
        spec.values = axis.values;
        spec.policies = {SweepPolicy::server_rd, SweepPolicy::server_rd_jd};
        spec.tasksets_per_point = 500;

        SweepResult result = run_sweep(spec, worker_threads());

        int upticks = 0;
        double worst_uptick = 0.0;
        double prev = -1.0;
        for (double v : axis.values) {
            double rd = result.fraction_at(v, SweepPolicy::server_rd);
            double rdjd = result.fraction_at(v, SweepPolicy::server_rd_jd);
            if (rdjd < rd)
                dominance_ok = false;
            if (prev >= 0.0 && rdjd > prev) {
                upticks++;
                worst_uptick = std::max(worst_uptick, rdjd - prev);
            }
            prev = rdjd;
        }
        bool axis_ok = upticks == 0 || (upticks == 1 && worst_uptick <= 0.01);
        std::printf("    %-16s upticks=%d worst=%.4f %s\n", axis.param, upticks, worst_uptick,
                    axis_ok ? "ok" : "VIOLATION");
        monotone_ok = monotone_ok && axis_ok;
    }

    verdict(7, monotone_ok,
            "server schedulable fraction non-increasing on all six axes (500 tasksets/point)");
    verdict(6, dominance_ok,
            "combined-bound acceptance fraction dominates request-driven-only at every sweep point");
}

TEST_CASE("criterion 8: hand-checked fixed-point arithmetic")
{
    // Two CPU-only tasks on one core: 3000 + ceil(W/10000)*1000 settles at 4000.
    Taskset two;
    two.tasks.push_back(make_task(1, 1'000, 10'000, 10'000, {}, 2, 0));
    two.tasks.push_back(make_task(2, 3'000, 100'000, 100'000, {}, 1, 0));
    two.platform.num_cores = 2;
    two.platform.policy = ArbitrationPolicy::gpu_server;
    two.platform.server_core = 1;
    bool pass = response_time(two, two.tasks[1]).response == 4'000;

    // Per-request waiting: lower segment 2000, two higher 1000-segments with
    // period 10000, no overhead: fixed point 6000.
    Taskset rq;
    rq.tasks.push_back(make_task(1, 500, 10'000, 10'000, {pure_seg(1'000)}, 4, 0));
    rq.tasks.push_back(make_task(2, 500, 10'000, 10'000, {pure_seg(1'000)}, 3, 0));
    rq.tasks.push_back(make_task(3, 500, 50'000, 50'000, {pure_seg(500)}, 2, 1));
    rq.tasks.push_back(make_task(4, 500, 40'000, 40'000, {pure_seg(2'000)}, 1, 1));
    rq.platform.num_cores = 2;
    rq.platform.epsilon = 0;
    rq.platform.policy = ArbitrationPolicy::gpu_server;
    rq.platform.server_core = 0;
    pass = pass && request_driven_bound(rq, rq.tasks[2], 0).bound == 6'000;

    // Job-driven single pass: 2*5000 + (ceil(60000/50000)+1)*1000 = 13000.
    Taskset jd;
    jd.tasks.push_back(make_task(1, 500, 50'000, 50'000, {pure_seg(1'000)}, 3, 0));
    jd.tasks.push_back(make_task(2, 500, 200'000, 200'000, {pure_seg(900), pure_seg(800)}, 2, 0));
    jd.tasks.push_back(make_task(3, 500, 300'000, 300'000, {pure_seg(5'000)}, 1, 1));
    jd.platform.num_cores = 2;
    jd.platform.epsilon = 0;
    jd.platform.policy = ArbitrationPolicy::gpu_server;
    jd.platform.server_core = 0;
    pass = pass && job_driven_bound(jd, jd.tasks[1], 60'000) == 13'000;

    verdict(8, pass, "response fixed point 4000 us; waiting bounds 6000 us and 13000 us");
}

TEST_CASE("criterion 9: ten thousand randomized traces pass the checker")
{
    const int count = 10'000;
    std::atomic<int> violations{0};
    std::atomic<int> cursor{0};

    auto work = [&]() {
        for (;;) {
            int k = cursor.fetch_add(1);
            if (k >= count)
                return;
            GenConfig cfg;
            cfg.num_cores = 2;
            cfg.n_range = std::pair<int, int>{4, 8};
            cfg.seed = batch_item_seed(kSeed ^ 0xACCE97ED, k);
            Taskset generated = generate(cfg);
            Taskset ts = allocated(generated, k % 2 ? ArbitrationPolicy::gpu_server
                                                    : ArbitrationPolicy::sync_lock);
            SimConfig sim_cfg;
            sim_cfg.horizon = 600'000;
            sim_cfg.release_model = ReleaseModel::sporadic;
            sim_cfg.seed = cfg.seed;
            SimResult r = simulate(ts, sim_cfg);
            if (!trace_check(r).empty())
                violations.fetch_add(1);
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < worker_threads(); i++)
        pool.emplace_back(work);
    for (auto& th : pool)
        th.join();

    // Injected faults must be flagged.
    Scenario sc = three_task_scenario(ArbitrationPolicy::gpu_server, kUnit / 10);
    SimResult clean = simulate(sc.ts, sc.cfg);
    SimResult corrupted = clean;
    for (std::size_t i = 0; i < corrupted.trace.size(); i++) {
        if (corrupted.trace[i].kind == SimEventKind::gpu_start) {
            SimEvent dup = corrupted.trace[i];
            dup.actor = 2;
            corrupted.trace.insert(corrupted.trace.begin() + static_cast<long>(i) + 1, dup);
            break;
        }
    }
    bool faults_flagged = trace_check(clean).empty() && !trace_check(corrupted).empty();

    std::printf("    %d simulations, %d with violations\n", count, violations.load());
    verdict(9, violations.load() == 0 && faults_flagged,
            "no invariant violations across 10000 randomized simulations; faults rejected");
}
