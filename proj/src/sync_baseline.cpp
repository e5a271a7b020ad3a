#include "gpusched/sync_baseline.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace gpusched {

AcquireOutcome mpcp_acquire(MpcpLockState& state, const Task& task, int base_ceiling)
{
    if (state.holder && *state.holder == task.id)
        throw std::logic_error("mpcp_acquire: task " + std::to_string(task.id) +
                               " already holds the lock (segments are non-nested)");

    AcquireOutcome out;
    if (state.is_free()) {
        state.holder = task.id;
        state.ceiling = base_ceiling + task.priority.value();
        out.granted = true;
        out.boosted_priority = *state.ceiling;
        return out;
    }

    MpcpLockState::Waiter w{task.id, task.priority.value()};
    auto pos = state.wait_list.begin();
    while (pos != state.wait_list.end() && pos->priority > w.priority)
        ++pos;
    state.wait_list.insert(pos, w);
    if (!wait_list_ordered(state))
        throw std::logic_error("mpcp_acquire: waiting list lost priority order");
    return out;
}

std::optional<int> mpcp_release(MpcpLockState& state, int releasing_task_id, int base_ceiling)
{
    if (!state.holder)
        throw std::logic_error("mpcp_release: lock is not held");
    if (*state.holder != releasing_task_id)
        throw std::logic_error("mpcp_release: task " + std::to_string(releasing_task_id) +
                               " is not the holder");

    state.holder.reset();
    state.ceiling.reset();
    if (state.wait_list.empty())
        return std::nullopt;

    MpcpLockState::Waiter next = state.wait_list.front();
    state.wait_list.erase(state.wait_list.begin());
    if (!wait_list_ordered(state))
        throw std::logic_error("mpcp_release: waiting list lost priority order");
    state.holder = next.task_id;
    state.ceiling = base_ceiling + next.priority;
    return next.task_id;
}

bool wait_list_ordered(const MpcpLockState& state)
{
    for (std::size_t i = 1; i < state.wait_list.size(); i++)
        if (state.wait_list[i - 1].priority < state.wait_list[i].priority)
            return false;
    return true;
}

const SyncTaskBound* SyncAnalysisReport::find(int task_id) const
{
    for (const auto& b : per_task)
        if (b.task_id == task_id)
            return &b;
    return nullptr;
}

namespace {

struct SyncEntry {
    duration_us response = 0;
    bool schedulable = false;
};

/// Per-request waiting bound: longest lower-priority segment in flight plus
/// higher-priority requests arriving during the wait, each extended by the
/// lock overhead.
struct WaitResult {
    duration_us bound = 0;
    bool diverged = false;
};

WaitResult sync_request_wait(const Taskset& ts, const Task& task, duration_us lock_overhead)
{
    duration_us max_lower = 0;
    struct Seg {
        duration_us cost;
        duration_us period;
    };
    std::vector<Seg> higher;
    for (const auto& other : ts.tasks) {
        if (other.id == task.id || !other.uses_gpu())
            continue;
        if (*other.priority < *task.priority) {
            for (const auto& seg : other.gpu_segments)
                max_lower = std::max(max_lower, seg.total + lock_overhead);
        } else {
            for (const auto& seg : other.gpu_segments)
                higher.push_back({seg.total + lock_overhead, other.period});
        }
    }

    WaitResult r;
    r.bound = max_lower;
    if (higher.empty())
        return r;
    for (;;) {
        duration_us next = max_lower;
        for (const auto& seg : higher)
            next += (ceil_div(r.bound, seg.period) + 1) * seg.cost;
        if (next == r.bound)
            return r;
        r.bound = next;
        if (r.bound > task.deadline) {
            r.diverged = true;
            return r;
        }
    }
}

SyncTaskBound sync_response_with(const Taskset& ts, const Task& task, duration_us lock_overhead,
                                 const std::map<int, SyncEntry>& higher_results)
{
    if (!task.priority || !task.core)
        throw std::invalid_argument("sync_response_bound: task " + std::to_string(task.id) +
                                    " has no priority or core assigned");

    const duration_us eta = task.segment_count();
    // Busy-waiting keeps every GPU segment on the owner's CPU.
    auto cpu_demand = [lock_overhead](const Task& t) {
        return t.c_wcet + t.gpu_total() +
               static_cast<duration_us>(t.segment_count()) * lock_overhead;
    };

    WaitResult wait = task.uses_gpu() ? sync_request_wait(ts, task, lock_overhead) : WaitResult{};
    duration_us blocking = wait.bound * eta;

    struct Interferer {
        duration_us demand;
        duration_us period;
        duration_us jitter;
    };
    std::vector<Interferer> higher_local;
    std::vector<Interferer> boosted_local;
    for (const auto& other : ts.tasks) {
        if (other.id == task.id || *other.core != *task.core)
            continue;
        if (*other.priority > *task.priority) {
            Interferer it;
            it.demand = cpu_demand(other);
            it.period = other.period;
            auto found = higher_results.find(other.id);
            duration_us window = (found != higher_results.end() && found->second.schedulable)
                                     ? found->second.response
                                     : other.deadline;
            it.jitter = std::max<duration_us>(0, window - it.demand);
            higher_local.push_back(it);
        } else if (other.uses_gpu()) {
            // Ceiling-boosted GPU segments of lower-priority neighbours
            // preempt like a self-suspending top-priority load.
            Interferer it;
            it.demand = other.gpu_total() +
                        static_cast<duration_us>(other.segment_count()) * lock_overhead;
            it.period = other.period;
            it.jitter = std::max<duration_us>(0, other.deadline - it.demand);
            boosted_local.push_back(it);
        }
    }

    SyncTaskBound out;
    out.task_id = task.id;
    out.blocking = blocking;

    duration_us base = cpu_demand(task) + blocking;
    duration_us w = base;
    int iterations = 0;
    for (;;) {
        duration_us next = base;
        for (const auto& it : higher_local)
            next += ceil_div(w + it.jitter, it.period) * it.demand;
        for (const auto& it : boosted_local)
            next += ceil_div(w + it.jitter, it.period) * it.demand;
        iterations++;
        if (next < w)
            throw std::logic_error("sync response iteration decreased");
        if (next == w || next > task.deadline) {
            w = next;
            break;
        }
        w = next;
    }

    out.response = w;
    out.schedulable = (w <= task.deadline) && !wait.diverged;
    out.iterations = iterations;
    if (wait.diverged && out.response <= task.deadline) {
        // Waiting alone already exceeds the deadline.
        out.response = blocking;
        out.schedulable = false;
    }
    return out;
}

} // namespace

SyncTaskBound sync_response_bound(const Taskset& ts, const Task& task, duration_us lock_overhead)
{
    std::map<int, SyncEntry> results;
    std::vector<const Task*> order;
    for (const auto& t : ts.tasks)
        if (t.priority && task.priority && *t.priority > *task.priority)
            order.push_back(&t);
    std::sort(order.begin(), order.end(),
              [](const Task* a, const Task* b) { return *a->priority > *b->priority; });
    for (const Task* t : order) {
        SyncTaskBound b = sync_response_with(ts, *t, lock_overhead, results);
        results[t->id] = {b.response, b.schedulable};
    }
    return sync_response_with(ts, task, lock_overhead, results);
}

SyncAnalysisReport sync_analyze(const Taskset& ts, duration_us lock_overhead)
{
    SyncAnalysisReport report;
    report.lock_overhead = lock_overhead;

    std::vector<const Task*> order;
    for (const auto& t : ts.tasks) {
        if (!t.priority || !t.core)
            throw std::invalid_argument("sync_analyze: task " + std::to_string(t.id) +
                                        " has no priority or core assigned");
        order.push_back(&t);
    }
    std::sort(order.begin(), order.end(),
              [](const Task* a, const Task* b) { return *a->priority > *b->priority; });

    std::map<int, SyncEntry> results;
    std::map<int, SyncTaskBound> by_id;
    for (const Task* t : order) {
        SyncTaskBound b = sync_response_with(ts, *t, lock_overhead, results);
        results[t->id] = {b.response, b.schedulable};
        by_id[t->id] = b;
    }

    for (const auto& t : ts.tasks) {
        const SyncTaskBound& b = by_id[t.id];
        report.per_task.push_back(b);
        report.all_schedulable = report.all_schedulable && b.schedulable;
    }
    return report;
}

} // namespace gpusched
