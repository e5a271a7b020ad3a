#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gpusched/task_model.hpp"

namespace gpusched {

enum class PackingHeuristic { worst_fit_decreasing, first_fit_decreasing };

struct AllocationRequest {
    std::vector<Task> tasks;
    Platform platform;
    PackingHeuristic heuristic = PackingHeuristic::worst_fit_decreasing;
};

/// One bin-packing step, enough to replay the heuristic's choices.
struct PlacementStep {
    std::string item;                 ///< task name/id or "gpu_server"
    double item_utilization = 0.0;
    int core = -1;
    std::vector<double> load_before;  ///< per-core load seen at this step
};

struct AllocationResult {
    Taskset taskset;
    std::vector<PlacementStep> log;
};

struct AllocationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rate-monotonic priorities: shorter period gets higher priority, ties go
/// to the smaller task id. Result is a permutation of 1..n (larger number
/// means higher priority).
std::vector<Task> assign_rm_priorities(std::vector<Task> tasks);

/// CPU utilization of the GPU server itself: for every GPU-using task, its
/// per-job miscellaneous work plus two server invocations per request,
/// normalised by the task period.
double server_utilization(const std::vector<Task>& tasks, duration_us epsilon);

/// Partitions tasks onto cores. Under the gpu_server policy the server is
/// packed along with the tasks (as the highest-priority pseudo-item) and its
/// placement is recorded in platform.server_core. Worst-fit keeps balancing
/// even past a load of 1.0; first-fit throws AllocationError when an item
/// fits nowhere.
AllocationResult allocate(const AllocationRequest& request);

} // namespace gpusched
