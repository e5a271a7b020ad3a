#include "gpusched/server_analysis.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace gpusched {

const TaskBounds* AnalysisReport::find(int task_id) const
{
    for (const auto& b : per_task)
        if (b.task_id == task_id)
            return &b;
    return nullptr;
}

namespace {

struct InterferingSegment {
    duration_us cost = 0;     // segment length + one server invocation
    duration_us period = 0;
};

/// Longest lower-priority segment cost (empty max = 0) and the list of
/// higher-priority segment costs, both across all cores.
struct ContentionSets {
    duration_us max_lower = 0;
    std::vector<InterferingSegment> higher;
};

ContentionSets contention_sets(const Taskset& ts, const Task& task)
{
    ContentionSets out;
    const duration_us eps = ts.platform.epsilon;
    for (const auto& other : ts.tasks) {
        if (other.id == task.id || !other.uses_gpu())
            continue;
        if (*other.priority < *task.priority) {
            for (const auto& seg : other.gpu_segments)
                out.max_lower = std::max(out.max_lower, seg.total + eps);
        } else {
            for (const auto& seg : other.gpu_segments)
                out.higher.push_back({seg.total + eps, other.period});
        }
    }
    return out;
}

RequestBoundResult request_waiting_fixed_point(const Taskset& ts, const Task& task)
{
    ContentionSets sets = contention_sets(ts, task);

    RequestBoundResult r;
    r.bound = sets.max_lower;
    r.iterations = 0;
    if (sets.higher.empty()) {
        r.iterations = 1;
        return r;
    }

    const duration_us cap = task.deadline;
    for (;;) {
        duration_us next = sets.max_lower;
        for (const auto& seg : sets.higher)
            next += (ceil_div(r.bound, seg.period) + 1) * seg.cost;
        r.iterations++;
        if (next < r.bound)
            throw std::logic_error("request-driven iteration decreased");
        if (next == r.bound)
            return r;
        r.bound = next;
        if (r.bound > cap) {
            r.diverged = true;
            return r;
        }
    }
}

struct HandlingBounds {
    duration_us b_rd = 0;
    bool rd_diverged = false;
    duration_us b_jd = 0;
    duration_us b_w = 0;
    duration_us b_gpu = 0;
};

HandlingBounds handling_bounds(const Taskset& ts, const Task& task, duration_us response_hypothesis,
                               WaitingBoundMode mode, const RequestBoundResult& per_request)
{
    HandlingBounds h;
    const auto eta = static_cast<duration_us>(task.segment_count());
    if (eta == 0)
        return h;

    h.b_rd = per_request.bound * eta;
    h.rd_diverged = per_request.diverged;
    h.b_jd = job_driven_bound(ts, task, response_hypothesis);

    if (mode == WaitingBoundMode::request_driven_only)
        h.b_w = h.b_rd;
    else
        h.b_w = h.rd_diverged ? h.b_jd : std::min(h.b_rd, h.b_jd);

    h.b_gpu = h.b_w + task.gpu_total() + 2 * eta * ts.platform.epsilon;
    return h;
}

struct AnalyzedEntry {
    duration_us response = 0;
    bool schedulable = false;
};

/// CPU demand the GPU server places on its core per job of `other`:
/// miscellaneous operations plus two invocations per request.
duration_us server_demand(const Task& other, duration_us eps)
{
    return other.gpu_misc_total() + 2 * static_cast<duration_us>(other.segment_count()) * eps;
}

TaskBounds response_time_with(const Taskset& ts, const Task& task, WaitingBoundMode mode,
                              const std::map<int, AnalyzedEntry>& higher_results)
{
    if (!task.priority || !task.core)
        throw std::invalid_argument("response_time: task " + std::to_string(task.id) +
                                    " has no priority or core assigned");
    if (ts.platform.policy != ArbitrationPolicy::gpu_server)
        throw std::invalid_argument("response_time: platform policy must be gpu_server");
    if (!ts.platform.server_core)
        throw std::invalid_argument("response_time: server core not assigned");

    const duration_us eps = ts.platform.epsilon;
    const bool on_server_core = (*task.core == *ts.platform.server_core);

    // Same-core higher-priority interferers with their suspension jitter.
    struct Interferer {
        duration_us c = 0;
        duration_us period = 0;
        duration_us jitter = 0;
    };
    std::vector<Interferer> interferers;
    for (const auto& other : ts.tasks) {
        if (other.id == task.id || *other.core != *task.core || *other.priority < *task.priority)
            continue;
        Interferer it;
        it.c = other.c_wcet;
        it.period = other.period;
        auto found = higher_results.find(other.id);
        duration_us window = (found != higher_results.end() && found->second.schedulable)
                                 ? found->second.response
                                 : other.deadline;
        it.jitter = std::max<duration_us>(0, window - other.c_wcet);
        interferers.push_back(it);
    }

    // On the server core, every other GPU-using task's requests translate
    // into server CPU time that preempts this task; the server self-suspends
    // between its activity windows, hence the deadline-based jitter.
    struct ServerLoad {
        duration_us demand = 0;
        duration_us period = 0;
        duration_us jitter = 0;
    };
    std::vector<ServerLoad> server_loads;
    if (on_server_core) {
        for (const auto& other : ts.tasks) {
            if (other.id == task.id || !other.uses_gpu())
                continue;
            ServerLoad sl;
            sl.demand = server_demand(other, eps);
            sl.period = other.period;
            sl.jitter = std::max<duration_us>(0, other.deadline - sl.demand);
            server_loads.push_back(sl);
        }
    }

    RequestBoundResult per_request;
    if (task.uses_gpu())
        per_request = request_waiting_fixed_point(ts, task);

    TaskBounds out;
    out.task_id = task.id;

    HandlingBounds h = handling_bounds(ts, task, 0, mode, per_request);
    duration_us w = task.c_wcet + h.b_gpu;
    int iterations = 0;
    for (;;) {
        h = handling_bounds(ts, task, w, mode, per_request);
        duration_us next = task.c_wcet + h.b_gpu;
        for (const auto& it : interferers)
            next += ceil_div(w + it.jitter, it.period) * it.c;
        for (const auto& sl : server_loads)
            next += ceil_div(w + sl.jitter, sl.period) * sl.demand;
        iterations++;
        if (next < w)
            throw std::logic_error("response-time iteration decreased");
        if (next == w || next > task.deadline) {
            w = next;
            break;
        }
        w = next;
    }

    out.b_rd = h.b_rd;
    out.rd_diverged = h.rd_diverged;
    out.b_jd = h.b_jd;
    out.b_w = h.b_w;
    out.b_gpu = h.b_gpu;
    out.response = w;
    out.schedulable = (w <= task.deadline);
    out.iterations = iterations;
    return out;
}

std::map<int, AnalyzedEntry> analyze_higher_first(const Taskset& ts, WaitingBoundMode mode,
                                                  std::vector<TaskBounds>& bounds_out)
{
    std::vector<const Task*> order;
    order.reserve(ts.tasks.size());
    for (const auto& t : ts.tasks) {
        if (!t.priority || !t.core)
            throw std::invalid_argument("analyze: task " + std::to_string(t.id) +
                                        " has no priority or core assigned");
        order.push_back(&t);
    }
    std::sort(order.begin(), order.end(),
              [](const Task* a, const Task* b) { return *a->priority > *b->priority; });

    std::map<int, AnalyzedEntry> results;
    for (const Task* t : order) {
        TaskBounds b = response_time_with(ts, *t, mode, results);
        results[t->id] = {b.response, b.schedulable};
        bounds_out.push_back(b);
    }
    return results;
}

} // namespace

RequestBoundResult request_driven_bound(const Taskset& ts, const Task& task, int segment_index)
{
    if (!task.uses_gpu())
        throw std::invalid_argument("request_driven_bound: task has no GPU segments");
    if (segment_index < 0 || segment_index >= task.segment_count())
        throw std::invalid_argument("request_driven_bound: segment index out of range");
    if (!task.priority)
        throw std::invalid_argument("request_driven_bound: task has no priority");
    // The per-request worst case does not depend on which segment it is:
    // every request can face the same in-flight blocker and arrivals.
    return request_waiting_fixed_point(ts, task);
}

duration_us job_driven_bound(const Taskset& ts, const Task& task, duration_us response_hypothesis)
{
    if (!task.uses_gpu())
        throw std::invalid_argument("job_driven_bound: task has no GPU segments");
    ContentionSets sets = contention_sets(ts, task);
    duration_us b = static_cast<duration_us>(task.segment_count()) * sets.max_lower;
    for (const auto& seg : sets.higher)
        b += (ceil_div(response_hypothesis, seg.period) + 1) * seg.cost;
    return b;
}

duration_us gpu_handling_bound(const Taskset& ts, const Task& task, duration_us response_hypothesis,
                               WaitingBoundMode mode)
{
    if (!task.uses_gpu())
        return 0;
    RequestBoundResult per_request = request_waiting_fixed_point(ts, task);
    return handling_bounds(ts, task, response_hypothesis, mode, per_request).b_gpu;
}

TaskBounds response_time(const Taskset& ts, const Task& task, WaitingBoundMode mode)
{
    for (const auto& t : ts.tasks)
        if (!t.priority || !t.core)
            throw std::invalid_argument("response_time: task " + std::to_string(t.id) +
                                        " has no priority or core assigned");
    // Higher-priority tasks feed the suspension jitter, so analyze them
    // first, in decreasing priority order.
    std::map<int, AnalyzedEntry> results;
    std::vector<const Task*> order;
    for (const auto& t : ts.tasks)
        if (task.priority && *t.priority > *task.priority)
            order.push_back(&t);
    std::sort(order.begin(), order.end(),
              [](const Task* a, const Task* b) { return *a->priority > *b->priority; });
    for (const Task* t : order) {
        TaskBounds b = response_time_with(ts, *t, mode, results);
        results[t->id] = {b.response, b.schedulable};
    }
    return response_time_with(ts, task, mode, results);
}

AnalysisReport analyze(const Taskset& ts, WaitingBoundMode mode)
{
    AnalysisReport report;
    report.mode = mode;
    if (ts.tasks.empty())
        return report;

    if (ts.platform.policy != ArbitrationPolicy::gpu_server)
        throw std::invalid_argument("analyze: platform policy must be gpu_server");

    std::vector<TaskBounds> in_priority_order;
    analyze_higher_first(ts, mode, in_priority_order);

    // Report rows follow the taskset order.
    for (const auto& t : ts.tasks) {
        for (const auto& b : in_priority_order) {
            if (b.task_id == t.id) {
                report.per_task.push_back(b);
                report.all_schedulable = report.all_schedulable && b.schedulable;
                break;
            }
        }
    }
    return report;
}

} // namespace gpusched
