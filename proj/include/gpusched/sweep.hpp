#pragma once

#include <string>
#include <vector>

#include "gpusched/taskgen.hpp"

namespace gpusched {

enum class SweepPolicy { server_rd, server_rd_jd, sync_reconstructed, sim_only };

const char* to_string(SweepPolicy p);
SweepPolicy sweep_policy_from_string(const std::string& s);

struct SweepSpec {
    GenConfig base;
    std::string param;              ///< one of the recognised knob names
    std::vector<double> values;
    std::vector<SweepPolicy> policies{SweepPolicy::server_rd, SweepPolicy::server_rd_jd,
                                      SweepPolicy::sync_reconstructed};
    int tasksets_per_point = 1000;
    std::string output_path;        ///< directory for csv/svg emission
};

/// Knob names accepted by SweepSpec::param:
///   gpu_ratio_pct, gpu_task_pct, num_tasks, eta, epsilon_us, misc_pct,
///   min_period_ms, small_task_fraction
/// Each pins the corresponding generator range to the swept value.
void apply_sweep_param(GenConfig& config, const std::string& param, double value);
bool is_sweep_param(const std::string& param);

struct SweepPoint {
    double value = 0.0;
    SweepPolicy policy = SweepPolicy::server_rd_jd;
    int schedulable = 0;
    int total = 0;
    double mean_analysis_ms = 0.0;

    double fraction() const { return total > 0 ? static_cast<double>(schedulable) / total : 0.0; }
};

struct SweepResult {
    std::string param;
    std::vector<SweepPoint> points;   // sorted by (value, policy name)
    std::uint64_t seed = 0;
    std::string tool_version;

    double fraction_at(double value, SweepPolicy policy) const;
};

SweepResult run_sweep(const SweepSpec& spec, int jobs = 1);

/// CSV columns: param,value,policy,sched_fraction,n
std::string sweep_to_csv(const SweepResult& result);
void emit_sweep_outputs(const SweepResult& result, const std::string& out_dir);

SweepSpec sweep_spec_from_json(const std::string& json_text);
SweepSpec load_sweep_spec(const std::string& path);

struct CaseStudyReport {
    duration_us hyperperiod = 0;
    struct Row {
        int task_id = 0;
        std::string name;
        duration_us worst_sync = 0;
        duration_us worst_server = 0;
    };
    std::vector<Row> rows;
    long sync_misses = 0;
    long server_misses = 0;
    duration_us cpu_matmul1_sync = 0;
    duration_us cpu_matmul1_server = 0;
    duration_us sync_cpu_busy = 0;
    duration_us server_cpu_busy = 0;
};

/// Simulates the bundled case-study taskset over one hyperperiod under both
/// arbitration policies with the measured overhead defaults (7+7 us lock,
/// 45 us server invocation) and renders both timelines as SVG when out_dir
/// is non-empty.
CaseStudyReport run_case_study(const std::string& fixture_path, const std::string& out_dir);

} // namespace gpusched
