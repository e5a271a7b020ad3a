#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "gpusched/task_model.hpp"

namespace gpusched {

struct BimodalUtil {
    std::pair<double, double> small_range{0.05, 0.2};
    std::pair<double, double> large_range{0.2, 0.5};
    double small_fraction = 0.5;
};

/// Knobs for random taskset generation. Ranges are inclusive; fractions are
/// plain ratios (0.1 == 10%). Periods are drawn at millisecond granularity
/// and stored in microseconds.
struct GenConfig {
    int num_cores = 4;
    std::optional<std::pair<int, int>> n_range;        ///< default [2*cores, 5*cores]
    std::pair<double, double> util_range{0.05, 0.2};
    std::optional<BimodalUtil> bimodal;
    std::pair<int, int> period_range_ms{30, 500};
    std::pair<double, double> gpu_task_fraction{0.10, 0.30};
    std::pair<double, double> gpu_ratio{0.10, 0.30};   ///< accumulated GPU length over normal WCET
    std::pair<int, int> eta_range{1, 3};
    std::pair<double, double> misc_ratio{0.10, 0.20};  ///< CPU-required share of each segment
    duration_us epsilon = 50;
    ArbitrationPolicy policy = ArbitrationPolicy::gpu_server;
    AccessMode access_mode = AccessMode::synchronous;
    std::uint64_t seed = 0;

    std::pair<int, int> effective_n_range() const
    {
        return n_range ? *n_range : std::pair<int, int>{2 * num_cores, 5 * num_cores};
    }
};

/// Generated by a 64-bit Mersenne Twister seeded from config.seed; the
/// generator name and seed travel in experiment metadata for
/// reproducibility. Tasks come with rate-monotonic priorities, cores
/// unassigned. The result always passes validate().
Taskset generate(const GenConfig& config);

/// Seed of the i-th batch element. Index 0 keeps the base seed so a batch
/// of one equals generate(config); later indices are decorrelated.
std::uint64_t batch_item_seed(std::uint64_t base_seed, int index);

/// Deterministic independent sequence; the callback receives (index, taskset).
void generate_batch(const GenConfig& config, int count,
                    const std::function<void(int, const Taskset&)>& sink);
std::vector<Taskset> generate_batch(const GenConfig& config, int count);

/// JSON form of GenConfig (percent fields, explicit units).
GenConfig gen_config_from_json(const std::string& json_text);
std::string gen_config_to_json(const GenConfig& config);
GenConfig load_gen_config(const std::string& path);

} // namespace gpusched
