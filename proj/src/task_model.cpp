#include "gpusched/task_model.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gpusched {

using ordered_json = nlohmann::ordered_json;

duration_us Task::gpu_total() const
{
    duration_us sum = 0;
    for (const auto& seg : gpu_segments)
        sum += seg.total;
    return sum;
}

duration_us Task::gpu_misc_total() const
{
    duration_us sum = 0;
    for (const auto& seg : gpu_segments)
        sum += seg.m_wcet;
    return sum;
}

const char* to_string(AccessMode m)
{
    return m == AccessMode::synchronous ? "synchronous" : "asynchronous";
}

const char* to_string(ArbitrationPolicy p)
{
    return p == ArbitrationPolicy::sync_lock ? "sync_lock" : "gpu_server";
}

const Task* Taskset::find_task(int id) const
{
    for (const auto& t : tasks)
        if (t.id == id)
            return &t;
    return nullptr;
}

double utilization(const Task& task)
{
    if (task.period == 0)
        throw std::invalid_argument("task " + std::to_string(task.id) + ": period is zero");
    return static_cast<double>(task.c_wcet + task.gpu_total()) / static_cast<double>(task.period);
}

double total_utilization(const Taskset& ts)
{
    double sum = 0.0;
    for (const auto& t : ts.tasks)
        sum += utilization(t);
    return sum;
}

int effective_base_ceiling(const Taskset& ts)
{
    if (ts.platform.base_ceiling > 0)
        return ts.platform.base_ceiling;
    int max_prio = 0;
    for (const auto& t : ts.tasks)
        if (t.priority && *t.priority > max_prio)
            max_prio = *t.priority;
    return max_prio + 1;
}

namespace {

std::string task_label(const Task& t)
{
    if (!t.name.empty())
        return "task " + std::to_string(t.id) + " (" + t.name + ")";
    return "task " + std::to_string(t.id);
}

} // namespace

std::vector<std::string> validate(const Taskset& ts)
{
    std::vector<std::string> out;
    const Platform& p = ts.platform;

    if (p.num_cores < 1)
        out.push_back("platform: num_cores must be >= 1");
    if (p.epsilon < 0)
        out.push_back("platform: epsilon must be >= 0");
    if (p.server_core) {
        if (p.policy != ArbitrationPolicy::gpu_server)
            out.push_back("platform: server_core set but policy is not gpu_server");
        if (*p.server_core < 0 || *p.server_core >= p.num_cores)
            out.push_back("platform: server_core out of range");
    }

    std::set<int> ids;
    std::set<int> priorities;
    int max_prio = 0;
    for (const auto& t : ts.tasks) {
        if (!ids.insert(t.id).second)
            out.push_back(task_label(t) + ": duplicate task id");
        if (t.period <= 0)
            out.push_back(task_label(t) + ": period must be > 0");
        if (t.deadline <= 0)
            out.push_back(task_label(t) + ": deadline must be > 0");
        if (t.period > 0 && t.deadline > t.period)
            out.push_back(task_label(t) + ": deadline > period");
        if (t.c_wcet < 0)
            out.push_back(task_label(t) + ": negative normal WCET");

        duration_us g = 0;
        for (std::size_t j = 0; j < t.gpu_segments.size(); j++) {
            const auto& seg = t.gpu_segments[j];
            std::string where = task_label(t) + " segment " + std::to_string(j);
            if (seg.e_wcet < 0)
                out.push_back(where + ": e_wcet < 0");
            if (seg.m_wcet < 0)
                out.push_back(where + ": m_wcet < 0");
            if (seg.total <= 0)
                out.push_back(where + ": total must be > 0");
            if (seg.total > seg.e_wcet + seg.m_wcet)
                out.push_back(where + ": total > e_wcet + m_wcet");
            g += seg.total;
        }

        if (t.period > 0) {
            if (t.c_wcet + g <= 0)
                out.push_back(task_label(t) + ": utilization must be > 0");
            else if (t.c_wcet + g > t.period)
                out.push_back(task_label(t) + ": utilization > 1");
        }

        if (t.priority) {
            if (!priorities.insert(*t.priority).second)
                out.push_back(task_label(t) + ": duplicate priority " + std::to_string(*t.priority));
            if (*t.priority > max_prio)
                max_prio = *t.priority;
        }
        if (t.core && (*t.core < 0 || *t.core >= p.num_cores))
            out.push_back(task_label(t) + ": core out of range");
    }

    if (p.policy == ArbitrationPolicy::sync_lock && p.base_ceiling > 0 && p.base_ceiling <= max_prio)
        out.push_back("platform: base_ceiling must exceed every task priority");

    return out;
}

namespace {

ordered_json segment_to_json(const GpuSegment& s)
{
    ordered_json j;
    j["e_us"] = s.e_wcet;
    j["m_us"] = s.m_wcet;
    j["total_us"] = s.total;
    return j;
}

GpuSegment segment_from_json(const nlohmann::json& j)
{
    GpuSegment s;
    s.e_wcet = j.at("e_us").get<duration_us>();
    s.m_wcet = j.at("m_us").get<duration_us>();
    s.total = j.at("total_us").get<duration_us>();
    return s;
}

AccessMode access_mode_from_string(const std::string& s)
{
    if (s == "synchronous")
        return AccessMode::synchronous;
    if (s == "asynchronous")
        return AccessMode::asynchronous;
    throw std::invalid_argument("unknown access_mode: " + s);
}

ArbitrationPolicy policy_from_string(const std::string& s)
{
    if (s == "sync_lock")
        return ArbitrationPolicy::sync_lock;
    if (s == "gpu_server")
        return ArbitrationPolicy::gpu_server;
    throw std::invalid_argument("unknown policy: " + s);
}

} // namespace

std::string serialize_taskset(const Taskset& ts)
{
    ordered_json j;
    ordered_json plat;
    plat["num_cores"] = ts.platform.num_cores;
    plat["epsilon_us"] = ts.platform.epsilon;
    plat["access_mode"] = to_string(ts.platform.access_mode);
    plat["policy"] = to_string(ts.platform.policy);
    if (ts.platform.server_core)
        plat["server_core"] = *ts.platform.server_core;
    if (ts.platform.base_ceiling > 0)
        plat["base_ceiling"] = ts.platform.base_ceiling;
    j["platform"] = plat;

    ordered_json tasks = ordered_json::array();
    for (const auto& t : ts.tasks) {
        ordered_json tj;
        tj["id"] = t.id;
        if (!t.name.empty())
            tj["name"] = t.name;
        tj["c_us"] = t.c_wcet;
        tj["t_us"] = t.period;
        tj["d_us"] = t.deadline;
        if (t.priority)
            tj["priority"] = *t.priority;
        if (t.core)
            tj["core"] = *t.core;
        ordered_json segs = ordered_json::array();
        for (const auto& s : t.gpu_segments)
            segs.push_back(segment_to_json(s));
        tj["gpu_segments"] = segs;
        tasks.push_back(tj);
    }
    j["tasks"] = tasks;
    return j.dump(2) + "\n";
}

Taskset parse_taskset(const std::string& json_text)
{
    nlohmann::json j = nlohmann::json::parse(json_text);
    Taskset ts;

    const auto& plat = j.at("platform");
    ts.platform.num_cores = plat.at("num_cores").get<int>();
    ts.platform.epsilon = plat.at("epsilon_us").get<duration_us>();
    ts.platform.access_mode = access_mode_from_string(plat.at("access_mode").get<std::string>());
    ts.platform.policy = policy_from_string(plat.at("policy").get<std::string>());
    if (plat.contains("server_core"))
        ts.platform.server_core = plat.at("server_core").get<int>();
    if (plat.contains("base_ceiling"))
        ts.platform.base_ceiling = plat.at("base_ceiling").get<int>();

    for (const auto& tj : j.at("tasks")) {
        Task t;
        t.id = tj.at("id").get<int>();
        if (tj.contains("name"))
            t.name = tj.at("name").get<std::string>();
        t.c_wcet = tj.at("c_us").get<duration_us>();
        t.period = tj.at("t_us").get<duration_us>();
        t.deadline = tj.at("d_us").get<duration_us>();
        if (tj.contains("priority"))
            t.priority = tj.at("priority").get<int>();
        if (tj.contains("core"))
            t.core = tj.at("core").get<int>();
        for (const auto& sj : tj.at("gpu_segments"))
            t.gpu_segments.push_back(segment_from_json(sj));
        ts.tasks.push_back(std::move(t));
    }
    return ts;
}

Taskset load_taskset(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open taskset file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_taskset(buf.str());
}

void save_taskset(const Taskset& ts, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write taskset file: " + path);
    out << serialize_taskset(ts);
}

} // namespace gpusched
