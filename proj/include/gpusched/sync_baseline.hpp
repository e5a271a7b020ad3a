#pragma once

#include <optional>
#include <vector>

#include "gpusched/task_model.hpp"

namespace gpusched {

/// Lock state for the single GPU mutex under the priority-ceiling locking
/// protocol. The waiting list is kept in descending task priority; the
/// holder runs boosted to base_ceiling + its own priority.
struct MpcpLockState {
    struct Waiter {
        int task_id = 0;
        int priority = 0;
    };

    std::optional<int> holder;        // task id
    std::vector<Waiter> wait_list;    // descending priority
    std::optional<int> ceiling;       // boosted priority of the holder

    bool is_free() const { return !holder.has_value(); }
};

struct AcquireOutcome {
    bool granted = false;
    int boosted_priority = 0;   // valid when granted
};

/// Request the GPU mutex. A free lock is granted immediately and boosts the
/// holder; otherwise the task is inserted into the waiting list by priority
/// and must suspend. Re-entrant acquisition is a model error.
AcquireOutcome mpcp_acquire(MpcpLockState& state, const Task& task, int base_ceiling);

/// Release the GPU mutex. The highest-priority waiter (if any) becomes the
/// new boosted holder and its id is returned. Releasing a lock one does not
/// hold is a model error.
std::optional<int> mpcp_release(MpcpLockState& state, int releasing_task_id, int base_ceiling);

/// Sanity check of the waiting-list ordering invariant.
bool wait_list_ordered(const MpcpLockState& state);

struct SyncTaskBound {
    int task_id = 0;
    duration_us blocking = 0;   ///< per-request waiting total for own GPU requests
    duration_us response = 0;
    bool schedulable = false;
    int iterations = 0;
};

/// Reconstructed, conservative response-time bound for the lock-based
/// arbitration. GPU segments occupy the owner's CPU for their whole length
/// (busy-waiting), each request may wait behind the longest lower-priority
/// segment plus higher-priority requests arriving meanwhile, and boosted
/// GPU segments of same-core lower-priority tasks preempt like a
/// self-suspending top-priority load. This is a stand-in bound for
/// comparison plots, not a published locking-protocol analysis.
struct SyncAnalysisReport {
    std::vector<SyncTaskBound> per_task;   // in taskset order
    bool all_schedulable = true;
    duration_us lock_overhead = 0;
    const char* label = "reconstructed, conservative";

    const SyncTaskBound* find(int task_id) const;
};

SyncTaskBound sync_response_bound(const Taskset& ts, const Task& task, duration_us lock_overhead);

SyncAnalysisReport sync_analyze(const Taskset& ts, duration_us lock_overhead);

} // namespace gpusched
