#pragma once

#include <vector>

#include "gpusched/task_model.hpp"

namespace gpusched {

/// Which waiting-time bound feeds the response-time recurrence. The
/// request-driven bound alone reproduces the earlier, coarser analysis;
/// combining it with the job-driven bound takes the minimum of the two.
enum class WaitingBoundMode { request_driven_only, request_and_job_driven };

struct RequestBoundResult {
    duration_us bound = 0;   ///< fixed point, or first iterate past the cap
    bool diverged = false;
    int iterations = 0;
};

/// Per-task analysis outcome. response is the least fixed point when
/// schedulable, otherwise the first iterate beyond the deadline.
struct TaskBounds {
    int task_id = 0;
    duration_us b_rd = 0;     ///< request-driven waiting bound, summed over segments
    bool rd_diverged = false;
    duration_us b_jd = 0;     ///< job-driven waiting bound at the final hypothesis
    duration_us b_w = 0;      ///< waiting bound actually used
    duration_us b_gpu = 0;    ///< total GPU request handling time
    duration_us response = 0;
    bool schedulable = false;
    int iterations = 0;
};

struct AnalysisReport {
    std::vector<TaskBounds> per_task;   // in taskset order
    bool all_schedulable = true;
    WaitingBoundMode mode = WaitingBoundMode::request_and_job_driven;

    const TaskBounds* find(int task_id) const;
};

/// Worst-case waiting time of one GPU request of `task`: the longest
/// lower-priority segment that may be in flight, plus higher-priority
/// requests arriving while it waits. Priorities compare across the whole
/// taskset; the GPU queue is global. Iteration stops once the bound passes
/// the task deadline (diverged).
RequestBoundResult request_driven_bound(const Taskset& ts, const Task& task, int segment_index);

/// Waiting time accumulated over one whole job: every request of `task` may
/// sit behind the longest lower-priority segment, and higher-priority
/// requests arrive throughout the response-time window hypothesis.
duration_us job_driven_bound(const Taskset& ts, const Task& task, duration_us response_hypothesis);

/// Total handling time of all GPU requests of one job: waiting bound plus
/// segment lengths plus two server invocations per request. Zero for
/// CPU-only tasks.
duration_us gpu_handling_bound(const Taskset& ts, const Task& task, duration_us response_hypothesis,
                               WaitingBoundMode mode = WaitingBoundMode::request_and_job_driven);

/// Response-time fixed point for one task under the gpu_server policy,
/// including CPU interference from same-core higher-priority tasks (with
/// self-suspension jitter) and, on the server core, the server's own
/// CPU-active time on behalf of every other GPU-using task.
TaskBounds response_time(const Taskset& ts, const Task& task,
                         WaitingBoundMode mode = WaitingBoundMode::request_and_job_driven);

/// Full-taskset analysis in decreasing priority order. Divergence is
/// reported as an unschedulable verdict, never as a failure.
AnalysisReport analyze(const Taskset& ts,
                       WaitingBoundMode mode = WaitingBoundMode::request_and_job_driven);

} // namespace gpusched
