#include <map>
#include <set>
#include <sstream>

#include "gpusched/simulator.hpp"

namespace gpusched {

namespace {

std::string at(const SimEvent& ev)
{
    std::ostringstream s;
    s << " (t=" << ev.time << ", actor=" << ev.actor << ")";
    return s.str();
}

} // namespace

std::vector<std::string> trace_check(const SimResult& result)
{
    std::vector<std::string> out;

    std::map<int, int> prio_of;
    std::map<int, int> core_of;
    for (const auto& ref : result.task_refs) {
        prio_of[ref.id] = ref.priority;
        core_of[ref.id] = ref.core;
    }

    const bool server_policy = result.policy == ArbitrationPolicy::gpu_server;

    time_us last_time = 0;
    bool gpu_in_flight = false;
    int gpu_owner = 0;
    std::set<int> pending_requests;          // submitted, not yet started
    std::set<int> awaiting_completion;       // submitted, not yet resumed
    std::map<int, bool> in_critical_section;
    bool server_active = false;
    std::map<int, int> running_on_core;      // core -> task id

    auto leaves_cpu = [&](const SimEvent& ev) {
        auto it = running_on_core.find(ev.core);
        if (it != running_on_core.end() && it->second == ev.actor)
            running_on_core.erase(it);
    };

    for (const auto& ev : result.trace) {
        if (ev.time < last_time) {
            out.push_back("events out of time order" + at(ev));
            break;
        }
        last_time = ev.time;

        switch (ev.kind) {
        case SimEventKind::gpu_start:
            if (gpu_in_flight)
                out.push_back("GPU segment started while another is in flight" + at(ev));
            gpu_in_flight = true;
            gpu_owner = ev.actor;
            if (server_policy) {
                if (!pending_requests.count(ev.actor)) {
                    out.push_back("GPU segment started without a pending request" + at(ev));
                } else {
                    for (int other : pending_requests) {
                        if (other != ev.actor && prio_of[other] > prio_of[ev.actor])
                            out.push_back("request queue served task " + std::to_string(ev.actor) +
                                          " while higher-priority task " + std::to_string(other) +
                                          " was waiting" + at(ev));
                    }
                    pending_requests.erase(ev.actor);
                }
            }
            break;

        case SimEventKind::gpu_finish:
            if (!gpu_in_flight)
                out.push_back("GPU finish without a running segment" + at(ev));
            else if (gpu_owner != ev.actor)
                out.push_back("GPU finish by task " + std::to_string(ev.actor) + " but segment belongs to " +
                              std::to_string(gpu_owner) + at(ev));
            gpu_in_flight = false;
            break;

        case SimEventKind::gpu_submit:
            if (!pending_requests.insert(ev.actor).second)
                out.push_back("task submitted a second request while one is pending" + at(ev));
            awaiting_completion.insert(ev.actor);
            break;

        case SimEventKind::resume:
            awaiting_completion.erase(ev.actor);
            break;

        case SimEventKind::dispatch: {
            if (server_policy && awaiting_completion.count(ev.actor))
                out.push_back("task dispatched while awaiting its own GPU completion" + at(ev));
            if (server_policy && server_active && result.server_core &&
                ev.core == *result.server_core)
                out.push_back("task dispatched on the server core while the server is active" + at(ev));
            auto it = running_on_core.find(ev.core);
            if (it != running_on_core.end() && it->second != ev.actor)
                out.push_back("two tasks running on core " + std::to_string(ev.core) + at(ev));
            running_on_core[ev.core] = ev.actor;
            break;
        }

        case SimEventKind::preempt:
            if (in_critical_section[ev.actor])
                out.push_back("lock holder preempted inside its critical section" + at(ev));
            leaves_cpu(ev);
            break;

        case SimEventKind::suspend:
            if (ev.actor == kServerActor) {
                server_active = false;
            } else {
                if (in_critical_section[ev.actor])
                    out.push_back("lock holder suspended inside its critical section" + at(ev));
                leaves_cpu(ev);
            }
            break;

        case SimEventKind::server_wake:
            server_active = true;
            break;

        case SimEventKind::lock_acquire:
            in_critical_section[ev.actor] = true;
            break;

        case SimEventKind::lock_release:
            in_critical_section[ev.actor] = false;
            break;

        case SimEventKind::job_complete:
            leaves_cpu(ev);
            break;

        default:
            break;
        }
    }

    // A segment still in flight at the end of the trace is fine: the horizon
    // may cut a schedule anywhere.
    return out;
}

} // namespace gpusched
