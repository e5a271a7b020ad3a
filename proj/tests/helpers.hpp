#pragma once

#include <utility>
#include <vector>

#include "gpusched/simulator.hpp"
#include "gpusched/task_model.hpp"

namespace gpusched::testing {

inline GpuSegment seg(duration_us e, duration_us m, duration_us total)
{
    return GpuSegment{e, m, total};
}

inline GpuSegment pure_seg(duration_us total)
{
    return GpuSegment{total, 0, total};
}

inline Task make_task(int id, duration_us c, duration_us period, duration_us deadline,
                      std::vector<GpuSegment> segments = {}, int priority = -1, int core = -1)
{
    Task t;
    t.id = id;
    t.c_wcet = c;
    t.period = period;
    t.deadline = deadline;
    t.gpu_segments = std::move(segments);
    if (priority >= 0)
        t.priority = priority;
    if (core >= 0)
        t.core = core;
    return t;
}

/// Three tasks contending for the GPU: a low-priority task alone on core 1,
/// mid and high priority tasks on core 0 (which also hosts the server when
/// the server policy is used). Every task runs one time unit of normal
/// execution, one GPU segment, then one more unit. One time unit is
/// 100,000 us.
constexpr duration_us kUnit = 100'000;

struct Scenario {
    Taskset ts;
    SimConfig cfg;
};

inline Scenario three_task_scenario(ArbitrationPolicy policy, duration_us epsilon)
{
    constexpr duration_us U = kUnit;
    Taskset ts;
    ts.tasks.push_back(make_task(1, 2 * U, 100 * U, 100 * U, {pure_seg(3 * U)}, 3, 0));   // high
    ts.tasks.push_back(make_task(2, 2 * U, 100 * U, 100 * U, {pure_seg(3 * U)}, 2, 0));   // mid
    ts.tasks.push_back(make_task(3, 2 * U, 100 * U, 100 * U, {pure_seg(4 * U)}, 1, 1));   // low
    ts.platform.num_cores = 2;
    ts.platform.epsilon = epsilon;
    ts.platform.access_mode = AccessMode::synchronous;
    ts.platform.policy = policy;
    ts.platform.base_ceiling = 4;
    if (policy == ArbitrationPolicy::gpu_server)
        ts.platform.server_core = 0;

    auto layout = [U](int) {
        return std::vector<LayoutItem>{LayoutItem::normal(U), LayoutItem::gpu(0),
                                       LayoutItem::normal(U)};
    };
    SimConfig cfg;
    cfg.horizon = 40 * U;
    cfg.release_model = ReleaseModel::explicit_jobs;
    cfg.jobs = {
        {3, 0, layout(3)},
        {2, 2 * U, layout(2)},
        {1, 3 * U, layout(1)},
    };
    cfg.lock_acquire_overhead = 0;
    cfg.lock_release_overhead = 0;
    return {std::move(ts), std::move(cfg)};
}

inline duration_us worst_response(const SimResult& r, int task_id)
{
    return r.stats_for(task_id)->worst_response;
}

} // namespace gpusched::testing
