#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpusched/task_model.hpp"

namespace gpusched {

/// Actor id used for the GPU server in trace events.
constexpr int kServerActor = -1;
/// Core id used for GPU-lane events.
constexpr int kGpuLane = -1;

enum class SimEventKind {
    release,
    dispatch,
    preempt,
    suspend,
    resume,
    lock_acquire,
    lock_release,
    gpu_submit,
    gpu_start,
    gpu_finish,
    server_wake,
    server_notify,
    job_complete,
    deadline_miss,
};

const char* to_string(SimEventKind k);

struct SimEvent {
    time_us time = 0;
    int core = 0;      ///< kGpuLane for GPU-lane events
    int actor = 0;     ///< task id, or kServerActor
    SimEventKind kind = SimEventKind::release;
    int aux = -1;      ///< segment index on gpu_* events, notified task on server_notify
};

/// One chunk of a job's execution layout: either a normal CPU chunk or a
/// reference to one of the task's GPU segments (in order).
struct LayoutItem {
    bool is_gpu = false;
    duration_us normal_len = 0;
    int segment_index = -1;

    static LayoutItem normal(duration_us len) { return {false, len, -1}; }
    static LayoutItem gpu(int seg) { return {true, 0, seg}; }
};

/// Explicit job for figure-style scenarios: release time plus a concrete
/// layout (normal chunks summing to the task WCET, GPU segments in order).
struct JobSpec {
    int task_id = 0;
    time_us release = 0;
    std::vector<LayoutItem> layout;
};

enum class ReleaseModel { periodic, explicit_jobs, sporadic };

struct SimConfig {
    duration_us horizon = 0;
    ReleaseModel release_model = ReleaseModel::periodic;
    std::vector<JobSpec> jobs;          ///< explicit_jobs only
    double sporadic_jitter = 0.2;       ///< inter-arrival in [T, T*(1+jitter)]
    std::uint64_t seed = 0;
    duration_us lock_acquire_overhead = 7;
    duration_us lock_release_overhead = 7;
    bool collect_trace = true;
};

struct TaskStats {
    int task_id = 0;
    long jobs_released = 0;
    long jobs_completed = 0;
    duration_us worst_response = 0;
    double mean_response = 0.0;
    long deadline_misses = 0;
};

struct DeadlineMiss {
    int task_id = 0;
    time_us release = 0;
    time_us deadline = 0;     ///< absolute
    time_us completion = 0;   ///< valid when completed
    bool completed = false;
};

struct SimResult {
    std::vector<SimEvent> trace;
    std::vector<TaskStats> per_task;   // taskset order
    std::vector<DeadlineMiss> misses;
    std::vector<duration_us> core_busy;
    duration_us gpu_busy = 0;
    duration_us horizon = 0;

    // Context carried along so the trace can be checked standalone.
    ArbitrationPolicy policy = ArbitrationPolicy::gpu_server;
    AccessMode access_mode = AccessMode::synchronous;
    std::optional<int> server_core;
    struct TaskRef {
        int id = 0;
        int priority = 0;
        int core = 0;
    };
    std::vector<TaskRef> task_refs;

    long total_misses() const { return static_cast<long>(misses.size()); }
    const TaskStats* stats_for(int task_id) const;
};

/// Deterministic discrete-event simulation of partitioned fixed-priority
/// preemptive scheduling with one non-preemptive GPU, arbitrated either by
/// priority-ceiling locking (busy-waiting holders) or by the GPU server
/// (suspending requesters, server pays one invocation before a segment
/// starts and one after it finishes).
SimResult simulate(const Taskset& ts, const SimConfig& config);

/// Replays a trace against the scheduling invariants and returns one
/// description per violation; empty means the trace is consistent.
std::vector<std::string> trace_check(const SimResult& result);

/// Trace as CSV with columns time_us,core,actor,event.
std::string trace_to_csv(const SimResult& result);
void write_trace_csv(const SimResult& result, const std::string& path);

/// Default layout used by the periodic/sporadic models: normal execution
/// split evenly around the GPU segments.
std::vector<LayoutItem> default_layout(const Task& task);

} // namespace gpusched
