#include "gpusched/priority_alloc.hpp"

#include <algorithm>
#include <limits>

namespace gpusched {

std::vector<Task> assign_rm_priorities(std::vector<Task> tasks)
{
    for (const auto& t : tasks)
        if (t.period <= 0)
            throw std::invalid_argument("assign_rm_priorities: task " + std::to_string(t.id) +
                                        " has non-positive period");

    std::vector<std::size_t> order(tasks.size());
    for (std::size_t i = 0; i < order.size(); i++)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (tasks[a].period != tasks[b].period)
            return tasks[a].period < tasks[b].period;
        return tasks[a].id < tasks[b].id;
    });

    int prio = static_cast<int>(tasks.size());
    for (std::size_t idx : order)
        tasks[idx].priority = prio--;
    return tasks;
}

double server_utilization(const std::vector<Task>& tasks, duration_us epsilon)
{
    double sum = 0.0;
    for (const auto& t : tasks) {
        if (!t.uses_gpu())
            continue;
        duration_us demand = t.gpu_misc_total() + 2 * static_cast<duration_us>(t.segment_count()) * epsilon;
        sum += static_cast<double>(demand) / static_cast<double>(t.period);
    }
    return sum;
}

namespace {

struct PackItem {
    bool is_server = false;
    std::size_t task_index = 0;   // valid when !is_server
    double util = 0.0;
    int id = 0;                   // task id; server sorts ahead on ties
    std::string label;
};

} // namespace

AllocationResult allocate(const AllocationRequest& request)
{
    for (const auto& t : request.tasks)
        if (!t.priority)
            throw std::invalid_argument("allocate: task " + std::to_string(t.id) +
                                        " has no priority assigned");

    const int num_cores = request.platform.num_cores;
    if (num_cores < 1)
        throw std::invalid_argument("allocate: platform has no cores");

    std::vector<PackItem> items;
    items.reserve(request.tasks.size() + 1);
    for (std::size_t i = 0; i < request.tasks.size(); i++) {
        const Task& t = request.tasks[i];
        PackItem it;
        it.task_index = i;
        it.util = utilization(t);
        it.id = t.id;
        it.label = t.name.empty() ? "task " + std::to_string(t.id) : t.name;
        items.push_back(std::move(it));
    }
    if (request.platform.policy == ArbitrationPolicy::gpu_server) {
        PackItem it;
        it.is_server = true;
        it.util = server_utilization(request.tasks, request.platform.epsilon);
        it.label = "gpu_server";
        items.push_back(std::move(it));
    }

    std::stable_sort(items.begin(), items.end(), [](const PackItem& a, const PackItem& b) {
        if (a.util != b.util)
            return a.util > b.util;
        if (a.is_server != b.is_server)
            return a.is_server;
        return a.id < b.id;
    });

    AllocationResult result;
    result.taskset.tasks = request.tasks;
    result.taskset.platform = request.platform;
    result.taskset.platform.server_core.reset();

    std::vector<double> load(num_cores, 0.0);
    for (const auto& item : items) {
        int chosen = -1;
        if (request.heuristic == PackingHeuristic::worst_fit_decreasing) {
            double best = std::numeric_limits<double>::infinity();
            for (int c = 0; c < num_cores; c++) {
                if (load[c] < best) {
                    best = load[c];
                    chosen = c;
                }
            }
        } else {
            for (int c = 0; c < num_cores; c++) {
                if (load[c] + item.util <= 1.0) {
                    chosen = c;
                    break;
                }
            }
            if (chosen < 0)
                throw AllocationError("first-fit decreasing: no core can hold " + item.label +
                                      " (utilization " + std::to_string(item.util) + ")");
        }

        PlacementStep step;
        step.item = item.label;
        step.item_utilization = item.util;
        step.core = chosen;
        step.load_before = load;
        result.log.push_back(std::move(step));

        load[chosen] += item.util;
        if (item.is_server)
            result.taskset.platform.server_core = chosen;
        else
            result.taskset.tasks[item.task_index].core = chosen;
    }

    return result;
}

} // namespace gpusched
