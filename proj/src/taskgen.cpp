#include "gpusched/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "gpusched/priority_alloc.hpp"

namespace gpusched {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double draw_real(std::mt19937_64& rng, std::pair<double, double> range)
{
    std::uniform_real_distribution<double> dist(range.first, range.second);
    return dist(rng);
}

int draw_int(std::mt19937_64& rng, std::pair<int, int> range)
{
    std::uniform_int_distribution<int> dist(range.first, range.second);
    return dist(rng);
}

/// Splits `total` into `pieces` integer parts, each at least 1, by sorted
/// uniform cut points. Falls back to an even split after bounded retries.
std::vector<duration_us> split_segments(std::mt19937_64& rng, duration_us total, int pieces)
{
    if (pieces <= 1)
        return {total};
    for (int attempt = 0; attempt < 16; attempt++) {
        std::vector<double> cuts(pieces - 1);
        for (auto& c : cuts)
            c = draw_real(rng, {0.0, 1.0});
        std::sort(cuts.begin(), cuts.end());
        std::vector<duration_us> parts;
        duration_us used = 0;
        bool ok = true;
        for (int k = 0; k < pieces; k++) {
            duration_us edge = (k == pieces - 1)
                                   ? total
                                   : static_cast<duration_us>(std::llround(cuts[k] * static_cast<double>(total)));
            duration_us part = edge - used;
            used = edge;
            if (part < 1) {
                ok = false;
                break;
            }
            parts.push_back(part);
        }
        if (ok)
            return parts;
    }
    std::vector<duration_us> parts(pieces, total / pieces);
    duration_us rem = total % pieces;
    for (duration_us k = 0; k < rem; k++)
        parts[static_cast<std::size_t>(k)]++;
    return parts;
}

} // namespace

std::uint64_t batch_item_seed(std::uint64_t base_seed, int index)
{
    if (index == 0)
        return base_seed;
    return splitmix64(base_seed ^ (static_cast<std::uint64_t>(index) * 0xD2B74407B1CE6E93ULL));
}

Taskset generate(const GenConfig& config)
{
    auto nr = config.effective_n_range();
    if (nr.first < 1 || nr.second < nr.first)
        throw std::invalid_argument("generate: empty task count range");

    std::mt19937_64 rng(config.seed);

    const int n = draw_int(rng, nr);
    const double gpu_fraction = draw_real(rng, config.gpu_task_fraction);
    int num_gpu = static_cast<int>(std::llround(gpu_fraction * n));
    num_gpu = std::clamp(num_gpu, 0, n);

    std::vector<int> order(n);
    for (int i = 0; i < n; i++)
        order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> uses_gpu(n, false);
    for (int i = 0; i < num_gpu; i++)
        uses_gpu[order[i]] = true;

    std::vector<Task> tasks;
    tasks.reserve(n);
    for (int i = 0; i < n; i++) {
        Task t;
        t.id = i + 1;
        t.period = static_cast<duration_us>(draw_int(rng, config.period_range_ms)) * 1000;
        t.deadline = t.period;

        double util;
        if (config.bimodal) {
            bool small = draw_real(rng, {0.0, 1.0}) < config.bimodal->small_fraction;
            util = draw_real(rng, small ? config.bimodal->small_range : config.bimodal->large_range);
        } else {
            util = draw_real(rng, config.util_range);
        }
        const double budget = util * static_cast<double>(t.period);

        if (!uses_gpu[i]) {
            t.c_wcet = std::max<duration_us>(1, std::llround(budget));
        } else {
            const double ratio = draw_real(rng, config.gpu_ratio);
            duration_us g_total = std::llround(budget * ratio / (1.0 + ratio));
            int eta = draw_int(rng, config.eta_range);
            if (g_total < eta)
                g_total = eta;
            t.c_wcet = std::max<duration_us>(0, std::llround(budget) - g_total);

            for (duration_us piece : split_segments(rng, g_total, eta)) {
                GpuSegment seg;
                double m_frac = draw_real(rng, config.misc_ratio);
                seg.m_wcet = std::clamp<duration_us>(std::llround(m_frac * static_cast<double>(piece)),
                                                     0, piece);
                seg.e_wcet = piece - seg.m_wcet;
                seg.total = piece;
                t.gpu_segments.push_back(seg);
            }
        }
        tasks.push_back(std::move(t));
    }

    Taskset ts;
    ts.tasks = assign_rm_priorities(std::move(tasks));
    ts.platform.num_cores = config.num_cores;
    ts.platform.epsilon = config.epsilon;
    ts.platform.policy = config.policy;
    ts.platform.access_mode = config.access_mode;
    ts.platform.base_ceiling = n + 1;
    return ts;
}

void generate_batch(const GenConfig& config, int count,
                    const std::function<void(int, const Taskset&)>& sink)
{
    if (count < 1)
        throw std::invalid_argument("generate_batch: count must be >= 1");
    for (int i = 0; i < count; i++) {
        GenConfig item = config;
        item.seed = batch_item_seed(config.seed, i);
        sink(i, generate(item));
    }
}

std::vector<Taskset> generate_batch(const GenConfig& config, int count)
{
    std::vector<Taskset> out;
    out.reserve(count);
    generate_batch(config, count, [&](int, const Taskset& ts) { out.push_back(ts); });
    return out;
}

namespace {

using ordered_json = nlohmann::ordered_json;

std::pair<double, double> pct_pair(const nlohmann::json& j)
{
    return {j.at(0).get<double>() / 100.0, j.at(1).get<double>() / 100.0};
}

ordered_json pct_json(std::pair<double, double> p)
{
    return ordered_json::array({p.first * 100.0, p.second * 100.0});
}

} // namespace

GenConfig gen_config_from_json(const std::string& json_text)
{
    nlohmann::json j = nlohmann::json::parse(json_text);
    GenConfig c;
    if (j.contains("num_cores"))
        c.num_cores = j.at("num_cores").get<int>();
    if (j.contains("n_range"))
        c.n_range = std::pair<int, int>{j.at("n_range").at(0).get<int>(), j.at("n_range").at(1).get<int>()};
    if (j.contains("util_range"))
        c.util_range = {j.at("util_range").at(0).get<double>(), j.at("util_range").at(1).get<double>()};
    if (j.contains("bimodal")) {
        BimodalUtil b;
        const auto& bj = j.at("bimodal");
        if (bj.contains("small_range"))
            b.small_range = {bj.at("small_range").at(0).get<double>(), bj.at("small_range").at(1).get<double>()};
        if (bj.contains("large_range"))
            b.large_range = {bj.at("large_range").at(0).get<double>(), bj.at("large_range").at(1).get<double>()};
        if (bj.contains("small_fraction"))
            b.small_fraction = bj.at("small_fraction").get<double>();
        c.bimodal = b;
    }
    if (j.contains("period_ms_range"))
        c.period_range_ms = {j.at("period_ms_range").at(0).get<int>(), j.at("period_ms_range").at(1).get<int>()};
    if (j.contains("gpu_task_pct_range"))
        c.gpu_task_fraction = pct_pair(j.at("gpu_task_pct_range"));
    if (j.contains("gpu_ratio_pct_range"))
        c.gpu_ratio = pct_pair(j.at("gpu_ratio_pct_range"));
    if (j.contains("eta_range"))
        c.eta_range = {j.at("eta_range").at(0).get<int>(), j.at("eta_range").at(1).get<int>()};
    if (j.contains("misc_pct_range"))
        c.misc_ratio = pct_pair(j.at("misc_pct_range"));
    if (j.contains("epsilon_us"))
        c.epsilon = j.at("epsilon_us").get<duration_us>();
    if (j.contains("policy"))
        c.policy = j.at("policy").get<std::string>() == "sync_lock" ? ArbitrationPolicy::sync_lock
                                                                    : ArbitrationPolicy::gpu_server;
    if (j.contains("access_mode"))
        c.access_mode = j.at("access_mode").get<std::string>() == "asynchronous"
                            ? AccessMode::asynchronous
                            : AccessMode::synchronous;
    if (j.contains("seed"))
        c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

std::string gen_config_to_json(const GenConfig& config)
{
    ordered_json j;
    j["num_cores"] = config.num_cores;
    auto nr = config.effective_n_range();
    j["n_range"] = ordered_json::array({nr.first, nr.second});
    j["util_range"] = ordered_json::array({config.util_range.first, config.util_range.second});
    if (config.bimodal) {
        ordered_json b;
        b["small_range"] =
            ordered_json::array({config.bimodal->small_range.first, config.bimodal->small_range.second});
        b["large_range"] =
            ordered_json::array({config.bimodal->large_range.first, config.bimodal->large_range.second});
        b["small_fraction"] = config.bimodal->small_fraction;
        j["bimodal"] = b;
    }
    j["period_ms_range"] = ordered_json::array({config.period_range_ms.first, config.period_range_ms.second});
    j["gpu_task_pct_range"] = pct_json(config.gpu_task_fraction);
    j["gpu_ratio_pct_range"] = pct_json(config.gpu_ratio);
    j["eta_range"] = ordered_json::array({config.eta_range.first, config.eta_range.second});
    j["misc_pct_range"] = pct_json(config.misc_ratio);
    j["epsilon_us"] = config.epsilon;
    j["policy"] = to_string(config.policy);
    j["access_mode"] = to_string(config.access_mode);
    j["seed"] = config.seed;
    j["rng"] = "mt19937_64";
    return j.dump(2) + "\n";
}

GenConfig load_gen_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open generator config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return gen_config_from_json(buf.str());
}

} // namespace gpusched
