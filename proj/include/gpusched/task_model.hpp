#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpusched/time_types.hpp"

namespace gpusched {

/// One GPU access segment. `total` is the maximum duration of the whole
/// segment; `e_wcet` covers pure GPU work needing no CPU and `m_wcet` the
/// miscellaneous operations that do need the CPU. total <= e_wcet + m_wcet
/// because the two parts may overlap in asynchronous mode.
struct GpuSegment {
    duration_us e_wcet = 0;
    duration_us m_wcet = 0;
    duration_us total = 0;
};

/// Sporadic constrained-deadline task, possibly with ordered GPU segments.
/// Priorities are unique integers, larger means higher. Priority and core
/// stay unset until assignment.
struct Task {
    int id = 0;
    std::string name;
    duration_us c_wcet = 0;   ///< summed WCET of all normal execution segments
    duration_us period = 0;
    duration_us deadline = 0;
    std::vector<GpuSegment> gpu_segments;
    std::optional<int> priority;
    std::optional<int> core;

    /// Accumulated GPU segment length (zero for CPU-only tasks).
    duration_us gpu_total() const;
    /// Accumulated CPU-required miscellaneous length over all segments.
    duration_us gpu_misc_total() const;
    /// Number of GPU segments.
    int segment_count() const { return static_cast<int>(gpu_segments.size()); }
    bool uses_gpu() const { return !gpu_segments.empty(); }
};

enum class AccessMode { synchronous, asynchronous };
enum class ArbitrationPolicy { sync_lock, gpu_server };

const char* to_string(AccessMode m);
const char* to_string(ArbitrationPolicy p);

struct Platform {
    int num_cores = 1;
    duration_us epsilon = 0;   ///< per-invocation GPU server overhead
    AccessMode access_mode = AccessMode::synchronous;
    ArbitrationPolicy policy = ArbitrationPolicy::gpu_server;
    std::optional<int> server_core;   ///< set once the server is placed
    int base_ceiling = 0;             ///< priority-boost base, must exceed every task priority
};

struct Taskset {
    std::vector<Task> tasks;
    Platform platform;

    const Task* find_task(int id) const;
};

/// (C_i + G_i) / T_i. Throws std::invalid_argument if the period is zero.
double utilization(const Task& task);

/// Sum of per-task utilizations.
double total_utilization(const Taskset& ts);

/// Priority ceiling base actually used by the lock protocol: the stored
/// value when positive, otherwise one above the highest task priority.
int effective_base_ceiling(const Taskset& ts);

/// Checks every model invariant and returns one description per violation.
/// Never throws; violations are data. An empty result means the taskset is
/// valid. Priority/core checks apply only where those fields are set.
std::vector<std::string> validate(const Taskset& ts);

/// JSON taskset file round trip. save_taskset emits a canonical form:
/// parsing and re-serialising any valid taskset is byte-identical.
Taskset parse_taskset(const std::string& json_text);
std::string serialize_taskset(const Taskset& ts);
Taskset load_taskset(const std::string& path);
void save_taskset(const Taskset& ts, const std::string& path);

} // namespace gpusched
