#include "gpusched/simulator.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gpusched/sync_baseline.hpp"

namespace gpusched {

const char* to_string(SimEventKind k)
{
    switch (k) {
    case SimEventKind::release: return "release";
    case SimEventKind::dispatch: return "dispatch";
    case SimEventKind::preempt: return "preempt";
    case SimEventKind::suspend: return "suspend";
    case SimEventKind::resume: return "resume";
    case SimEventKind::lock_acquire: return "lock_acquire";
    case SimEventKind::lock_release: return "lock_release";
    case SimEventKind::gpu_submit: return "gpu_submit";
    case SimEventKind::gpu_start: return "gpu_start";
    case SimEventKind::gpu_finish: return "gpu_finish";
    case SimEventKind::server_wake: return "server_wake";
    case SimEventKind::server_notify: return "server_notify";
    case SimEventKind::job_complete: return "job_complete";
    case SimEventKind::deadline_miss: return "deadline_miss";
    }
    return "unknown";
}

const TaskStats* SimResult::stats_for(int task_id) const
{
    for (const auto& s : per_task)
        if (s.task_id == task_id)
            return &s;
    return nullptr;
}

std::vector<LayoutItem> default_layout(const Task& task)
{
    std::vector<LayoutItem> layout;
    const int eta = task.segment_count();
    if (eta == 0) {
        layout.push_back(LayoutItem::normal(task.c_wcet));
        return layout;
    }
    const int chunks = eta + 1;
    const duration_us base = task.c_wcet / chunks;
    const duration_us rem = task.c_wcet % chunks;
    for (int j = 0; j < chunks; j++) {
        layout.push_back(LayoutItem::normal(base + (j < rem ? 1 : 0)));
        if (j < eta)
            layout.push_back(LayoutItem::gpu(j));
    }
    return layout;
}

namespace {

struct WorkItem {
    enum class Kind { normal, acquire_ovh, busywait, release_ovh };
    Kind kind = Kind::normal;
    duration_us remaining = 0;
    int seg = -1;
    bool gpu_started = false;
};

struct PendingJob {
    time_us release = 0;
    const std::vector<LayoutItem>* layout = nullptr;
};

struct TaskRt {
    const Task* t = nullptr;
    int idx = 0;
    int core = 0;
    int prio = 0;

    enum class St { no_job, ready, running, wait_lock, wait_gpu };
    St st = St::no_job;
    bool boosted = false;

    time_us job_release = 0;
    const std::vector<LayoutItem>* layout = nullptr;
    std::size_t next_item = 0;
    WorkItem work;
    int pending_seg = -1;

    std::deque<PendingJob> queued;
    time_us next_release = kNoTime;
    std::mt19937_64 rng;

    long released = 0;
    long completed = 0;
    long missed = 0;
    duration_us worst = 0;
    double resp_sum = 0.0;

    int effective_priority(int base_ceiling) const
    {
        return boosted ? base_ceiling + prio : prio;
    }
};

struct Obligation {
    enum class Kind { handoff, notify, misc };
    Kind kind = Kind::handoff;
    duration_us remaining = 0;
    int task_idx = -1;
};

struct DeferredMisc {
    time_us due = 0;
    duration_us dur = 0;
    long seq = 0;
};

struct Request {
    int task_idx = 0;
    int seg = 0;
};

struct Running {
    enum class Kind { none, task, server } kind = Kind::none;
    int task_idx = -1;
};

struct Engine {
    const Taskset& ts;
    const SimConfig& cfg;
    SimResult result;

    std::vector<TaskRt> tasks;
    std::vector<std::vector<LayoutItem>> default_layouts;
    std::vector<std::vector<JobSpec>> explicit_specs;   // per task, sorted by release
    std::vector<std::size_t> explicit_next;

    std::vector<Running> running;
    int server_core = -1;
    std::deque<Obligation> obligations;
    std::vector<DeferredMisc> deferred;
    long deferred_seq = 0;

    struct {
        bool busy = false;
        int task_idx = -1;
        int seg = -1;
        time_us finish = 0;
        std::vector<Request> queue;
        bool handoff_pending = false;
    } gpu;

    MpcpLockState lock;
    int base_ceiling = 0;

    time_us now = 0;

    Engine(const Taskset& ts_, const SimConfig& cfg_) : ts(ts_), cfg(cfg_) {}

    void emit(SimEventKind kind, int core, int actor, int aux = -1)
    {
        if (cfg.collect_trace)
            result.trace.push_back({now, core, actor, kind, aux});
    }

    bool is_server_policy() const { return ts.platform.policy == ArbitrationPolicy::gpu_server; }

    // --- setup -----------------------------------------------------------

    void init()
    {
        if (cfg.horizon <= 0)
            throw std::invalid_argument("simulate: horizon must be > 0");
        auto violations = validate(ts);
        if (!violations.empty())
            throw std::invalid_argument("simulate: invalid taskset: " + violations.front());

        if (is_server_policy()) {
            if (!ts.platform.server_core)
                throw std::invalid_argument("simulate: gpu_server policy requires a server core");
            server_core = *ts.platform.server_core;
        }
        base_ceiling = effective_base_ceiling(ts);

        running.assign(ts.platform.num_cores, Running{});
        result.core_busy.assign(ts.platform.num_cores, 0);
        result.horizon = cfg.horizon;
        result.policy = ts.platform.policy;
        result.access_mode = ts.platform.access_mode;
        result.server_core = ts.platform.server_core;

        tasks.resize(ts.tasks.size());
        default_layouts.resize(ts.tasks.size());
        explicit_specs.resize(ts.tasks.size());
        explicit_next.assign(ts.tasks.size(), 0);
        for (std::size_t i = 0; i < ts.tasks.size(); i++) {
            const Task& t = ts.tasks[i];
            if (!t.priority || !t.core)
                throw std::invalid_argument("simulate: task " + std::to_string(t.id) +
                                            " has no priority or core assigned");
            TaskRt& tr = tasks[i];
            tr.t = &t;
            tr.idx = static_cast<int>(i);
            tr.core = *t.core;
            tr.prio = *t.priority;
            default_layouts[i] = default_layout(t);
            result.task_refs.push_back({t.id, tr.prio, tr.core});

            if (cfg.release_model == ReleaseModel::explicit_jobs) {
                tr.next_release = kNoTime;
            } else {
                tr.next_release = 0;
                std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(t.id) + 1};
                tr.rng.seed(seq);
            }
        }

        if (cfg.release_model == ReleaseModel::explicit_jobs) {
            for (const auto& spec : cfg.jobs) {
                int idx = task_index(spec.task_id);
                JobSpec copy = spec;
                validate_layout(ts.tasks[idx], copy.layout);
                explicit_specs[idx].push_back(std::move(copy));
            }
            for (auto& q : explicit_specs)
                std::stable_sort(q.begin(), q.end(),
                                 [](const JobSpec& a, const JobSpec& b) { return a.release < b.release; });
        }
    }

    int task_index(int task_id) const
    {
        for (std::size_t i = 0; i < ts.tasks.size(); i++)
            if (ts.tasks[i].id == task_id)
                return static_cast<int>(i);
        throw std::invalid_argument("unknown task id " + std::to_string(task_id));
    }

    static void validate_layout(const Task& t, std::vector<LayoutItem>& layout)
    {
        if (layout.empty()) {
            layout = default_layout(t);
            return;
        }
        duration_us normal_sum = 0;
        int next_seg = 0;
        for (const auto& item : layout) {
            if (item.is_gpu) {
                if (item.segment_index != next_seg)
                    throw std::invalid_argument("job layout: GPU segments must appear in order");
                next_seg++;
            } else {
                if (item.normal_len < 0)
                    throw std::invalid_argument("job layout: negative normal chunk");
                normal_sum += item.normal_len;
            }
        }
        if (next_seg != t.segment_count())
            throw std::invalid_argument("job layout: wrong number of GPU segments");
        if (normal_sum != t.c_wcet)
            throw std::invalid_argument("job layout: normal chunks must sum to the task WCET");
        if (layout.front().is_gpu)
            layout.insert(layout.begin(), LayoutItem::normal(0));
    }

    // --- time bookkeeping --------------------------------------------------

    time_us next_event_time() const
    {
        time_us t = kNoTime;
        for (const auto& tr : tasks) {
            if (tr.next_release != kNoTime)
                t = std::min(t, tr.next_release);
        }
        if (cfg.release_model == ReleaseModel::explicit_jobs) {
            for (std::size_t i = 0; i < explicit_specs.size(); i++)
                if (explicit_next[i] < explicit_specs[i].size())
                    t = std::min(t, explicit_specs[i][explicit_next[i]].release);
        }
        if (gpu.busy && is_server_policy())
            t = std::min(t, gpu.finish);
        for (const auto& d : deferred)
            t = std::min(t, d.due);
        for (const auto& r : running) {
            if (r.kind == Running::Kind::task)
                t = std::min(t, now + tasks[r.task_idx].work.remaining);
            else if (r.kind == Running::Kind::server)
                t = std::min(t, now + obligations.front().remaining);
        }
        return t;
    }

    void advance_to(time_us t)
    {
        duration_us dt = t - now;
        if (dt < 0)
            throw std::logic_error("simulate: time went backwards");
        if (dt > 0) {
            for (int c = 0; c < ts.platform.num_cores; c++) {
                Running& r = running[c];
                if (r.kind == Running::Kind::task) {
                    tasks[r.task_idx].work.remaining -= dt;
                    if (tasks[r.task_idx].work.remaining < 0)
                        throw std::logic_error("simulate: task ran past its chunk");
                    result.core_busy[c] += dt;
                } else if (r.kind == Running::Kind::server) {
                    obligations.front().remaining -= dt;
                    if (obligations.front().remaining < 0)
                        throw std::logic_error("simulate: server ran past its chunk");
                    result.core_busy[c] += dt;
                }
            }
            if (gpu.busy)
                result.gpu_busy += dt;
            now = t;
        }
    }

    // --- server ------------------------------------------------------------

    void push_obligation(Obligation o)
    {
        if (obligations.empty())
            emit(SimEventKind::server_wake, server_core, kServerActor);
        obligations.push_back(o);
    }

    void maybe_handoff()
    {
        if (!gpu.busy && !gpu.handoff_pending && !gpu.queue.empty()) {
            push_obligation({Obligation::Kind::handoff, ts.platform.epsilon, -1});
            gpu.handoff_pending = true;
        }
    }

    void start_segment()
    {
        // Dequeue the highest-priority pending request.
        std::size_t best = 0;
        for (std::size_t i = 1; i < gpu.queue.size(); i++)
            if (tasks[gpu.queue[i].task_idx].prio > tasks[gpu.queue[best].task_idx].prio)
                best = i;
        Request req = gpu.queue[best];
        gpu.queue.erase(gpu.queue.begin() + static_cast<long>(best));

        const GpuSegment& seg = tasks[req.task_idx].t->gpu_segments[req.seg];
        gpu.busy = true;
        gpu.task_idx = req.task_idx;
        gpu.seg = req.seg;
        gpu.finish = now + seg.total;
        emit(SimEventKind::gpu_start, kGpuLane, tasks[req.task_idx].t->id, req.seg);

        // CPU-required miscellaneous work, executed by the server: all of it
        // up front in asynchronous mode, otherwise split across the segment
        // boundaries.
        duration_us m = seg.m_wcet;
        if (m > 0) {
            duration_us front_m, back_m;
            if (ts.platform.access_mode == AccessMode::asynchronous) {
                front_m = m;
                back_m = 0;
            } else {
                front_m = m / 2;
                back_m = m - front_m;
            }
            if (front_m > 0)
                push_obligation({Obligation::Kind::misc, front_m, -1});
            if (back_m > 0) {
                time_us due = std::max(now, gpu.finish - back_m);
                deferred.push_back({due, back_m, deferred_seq++});
            }
        }
    }

    void handle_gpu_finish()
    {
        TaskRt& owner = tasks[gpu.task_idx];
        emit(SimEventKind::gpu_finish, kGpuLane, owner.t->id, gpu.seg);
        gpu.busy = false;
        gpu.task_idx = -1;
        gpu.seg = -1;
        // Hand the GPU to the next request before notifying the finished
        // task; a single server invocation bridges back-to-back requests.
        if (!gpu.queue.empty()) {
            push_obligation({Obligation::Kind::handoff, ts.platform.epsilon, -1});
            gpu.handoff_pending = true;
        }
        push_obligation({Obligation::Kind::notify, ts.platform.epsilon, owner.idx});
    }

    void handle_obligation_done()
    {
        Obligation o = obligations.front();
        obligations.pop_front();
        switch (o.kind) {
        case Obligation::Kind::handoff:
            gpu.handoff_pending = false;
            start_segment();
            break;
        case Obligation::Kind::notify: {
            TaskRt& tr = tasks[o.task_idx];
            emit(SimEventKind::server_notify, server_core, tr.t->id);
            tr.st = TaskRt::St::ready;
            tr.pending_seg = -1;
            tr.work = WorkItem{WorkItem::Kind::normal, 0, -1, false};
            emit(SimEventKind::resume, tr.core, tr.t->id);
            break;
        }
        case Obligation::Kind::misc:
            break;
        }
        if (obligations.empty())
            emit(SimEventKind::suspend, server_core, kServerActor);
    }

    // --- task progression ----------------------------------------------------

    void start_job_if_idle(TaskRt& tr)
    {
        if (tr.st != TaskRt::St::no_job || tr.queued.empty())
            return;
        PendingJob job = tr.queued.front();
        tr.queued.pop_front();
        tr.job_release = job.release;
        tr.layout = job.layout;
        tr.next_item = 0;
        tr.work = WorkItem{WorkItem::Kind::normal, 0, -1, false};
        tr.st = TaskRt::St::ready;
    }

    void leave_core(TaskRt& tr)
    {
        Running& r = running[tr.core];
        if (r.kind == Running::Kind::task && r.task_idx == tr.idx)
            r = Running{};
    }

    void complete_job(TaskRt& tr)
    {
        duration_us response = now - tr.job_release;
        tr.completed++;
        tr.resp_sum += static_cast<double>(response);
        tr.worst = std::max(tr.worst, response);
        emit(SimEventKind::job_complete, tr.core, tr.t->id);
        if (response > tr.t->deadline) {
            tr.missed++;
            emit(SimEventKind::deadline_miss, tr.core, tr.t->id);
            result.misses.push_back(
                {tr.t->id, tr.job_release, tr.job_release + tr.t->deadline, now, true});
        }
        tr.st = TaskRt::St::no_job;
        tr.layout = nullptr;
        leave_core(tr);
        start_job_if_idle(tr);
    }

    void submit_request(TaskRt& tr, int seg)
    {
        emit(SimEventKind::gpu_submit, tr.core, tr.t->id, seg);
        emit(SimEventKind::suspend, tr.core, tr.t->id);
        tr.st = TaskRt::St::wait_gpu;
        tr.pending_seg = seg;
        leave_core(tr);
        gpu.queue.push_back({tr.idx, seg});
        maybe_handoff();
    }

    void begin_busywait(TaskRt& tr, int seg)
    {
        const GpuSegment& s = tr.t->gpu_segments[seg];
        tr.work = WorkItem{WorkItem::Kind::busywait, s.total, seg, false};
    }

    void note_busywait_started(TaskRt& tr)
    {
        if (tr.work.kind == WorkItem::Kind::busywait && !tr.work.gpu_started) {
            tr.work.gpu_started = true;
            gpu.busy = true;
            gpu.task_idx = tr.idx;
            gpu.seg = tr.work.seg;
            gpu.finish = now + tr.work.remaining;
            emit(SimEventKind::gpu_start, kGpuLane, tr.t->id, tr.work.seg);
        }
    }

    void attempt_acquire(TaskRt& tr, int seg)
    {
        AcquireOutcome out = mpcp_acquire(lock, *tr.t, base_ceiling);
        if (out.granted) {
            tr.boosted = true;
            emit(SimEventKind::lock_acquire, tr.core, tr.t->id, seg);
            begin_busywait(tr, seg);
            if (tr.st == TaskRt::St::running)
                note_busywait_started(tr);
        } else {
            emit(SimEventKind::suspend, tr.core, tr.t->id);
            tr.st = TaskRt::St::wait_lock;
            tr.pending_seg = seg;
            leave_core(tr);
        }
    }

    void do_release(TaskRt& tr)
    {
        emit(SimEventKind::lock_release, tr.core, tr.t->id);
        tr.boosted = false;
        auto next_id = mpcp_release(lock, tr.t->id, base_ceiling);
        if (next_id) {
            TaskRt& nt = tasks[task_index(*next_id)];
            nt.boosted = true;
            nt.st = TaskRt::St::ready;
            emit(SimEventKind::resume, nt.core, nt.t->id);
            emit(SimEventKind::lock_acquire, nt.core, nt.t->id, nt.pending_seg);
            begin_busywait(nt, nt.pending_seg);
            nt.pending_seg = -1;
        }
        task_continue(tr);
    }

    /// Advances a running task to its next layout item: loads the next
    /// normal chunk, issues the next GPU request, or completes the job.
    void task_continue(TaskRt& tr)
    {
        for (;;) {
            if (!tr.layout || tr.next_item >= tr.layout->size()) {
                complete_job(tr);
                return;
            }
            LayoutItem item = (*tr.layout)[tr.next_item];
            tr.next_item++;
            if (!item.is_gpu) {
                tr.work = WorkItem{WorkItem::Kind::normal, item.normal_len, -1, false};
                if (tr.work.remaining > 0)
                    return;
                continue;   // zero-length chunk, keep going
            }
            if (is_server_policy()) {
                submit_request(tr, item.segment_index);
            } else if (cfg.lock_acquire_overhead > 0) {
                tr.work = WorkItem{WorkItem::Kind::acquire_ovh, cfg.lock_acquire_overhead,
                                   item.segment_index, false};
            } else {
                attempt_acquire(tr, item.segment_index);
            }
            return;
        }
    }

    void handle_task_completion(TaskRt& tr)
    {
        switch (tr.work.kind) {
        case WorkItem::Kind::normal:
            task_continue(tr);
            break;
        case WorkItem::Kind::acquire_ovh:
            attempt_acquire(tr, tr.work.seg);
            break;
        case WorkItem::Kind::busywait: {
            emit(SimEventKind::gpu_finish, kGpuLane, tr.t->id, tr.work.seg);
            gpu.busy = false;
            gpu.task_idx = -1;
            gpu.seg = -1;
            int seg = tr.work.seg;
            if (cfg.lock_release_overhead > 0)
                tr.work = WorkItem{WorkItem::Kind::release_ovh, cfg.lock_release_overhead, seg, false};
            else
                do_release(tr);
            break;
        }
        case WorkItem::Kind::release_ovh:
            do_release(tr);
            break;
        }
    }

    // --- releases ------------------------------------------------------------

    bool process_releases()
    {
        bool changed = false;
        for (auto& tr : tasks) {
            if (cfg.release_model == ReleaseModel::explicit_jobs) {
                auto& specs = explicit_specs[tr.idx];
                auto& next = explicit_next[tr.idx];
                while (next < specs.size() && specs[next].release == now) {
                    release_job(tr, &specs[next].layout);
                    next++;
                    changed = true;
                }
            } else {
                while (tr.next_release == now) {
                    release_job(tr, &default_layouts[tr.idx]);
                    changed = true;
                    if (cfg.release_model == ReleaseModel::periodic) {
                        tr.next_release += tr.t->period;
                    } else {
                        duration_us span = std::max<duration_us>(
                            0, static_cast<duration_us>(cfg.sporadic_jitter *
                                                        static_cast<double>(tr.t->period)));
                        std::uniform_int_distribution<duration_us> dist(tr.t->period,
                                                                        tr.t->period + span);
                        tr.next_release += dist(tr.rng);
                    }
                    if (tr.next_release > cfg.horizon)
                        tr.next_release = kNoTime;
                }
            }
        }
        return changed;
    }

    void release_job(TaskRt& tr, const std::vector<LayoutItem>* layout)
    {
        tr.released++;
        emit(SimEventKind::release, tr.core, tr.t->id);
        tr.queued.push_back({now, layout});
        start_job_if_idle(tr);
    }

    // --- dispatching -----------------------------------------------------------

    bool dispatch_all()
    {
        bool changed = false;
        for (int c = 0; c < ts.platform.num_cores; c++) {
            Running& r = running[c];

            if (is_server_policy() && c == server_core && !obligations.empty()) {
                if (r.kind != Running::Kind::server) {
                    if (r.kind == Running::Kind::task) {
                        TaskRt& prev = tasks[r.task_idx];
                        emit(SimEventKind::preempt, c, prev.t->id);
                        prev.st = TaskRt::St::ready;
                    }
                    r = Running{Running::Kind::server, -1};
                    changed = true;
                }
                continue;
            }
            if (r.kind == Running::Kind::server && obligations.empty())
                r = Running{};

            // Highest effective priority among ready/running tasks on c.
            int best = -1;
            int best_prio = 0;
            for (auto& tr : tasks) {
                if (tr.core != c)
                    continue;
                if (tr.st != TaskRt::St::ready && tr.st != TaskRt::St::running)
                    continue;
                int ep = tr.effective_priority(base_ceiling);
                if (best < 0 || ep > best_prio) {
                    best = tr.idx;
                    best_prio = ep;
                }
            }

            if (best < 0) {
                if (r.kind == Running::Kind::task)
                    r = Running{};
                continue;
            }
            if (r.kind == Running::Kind::task && r.task_idx == best) {
                note_busywait_started(tasks[best]);
                continue;
            }
            if (r.kind == Running::Kind::task) {
                TaskRt& prev = tasks[r.task_idx];
                emit(SimEventKind::preempt, c, prev.t->id);
                prev.st = TaskRt::St::ready;
            }
            TaskRt& chosen = tasks[best];
            chosen.st = TaskRt::St::running;
            r = Running{Running::Kind::task, best};
            emit(SimEventKind::dispatch, c, chosen.t->id);
            note_busywait_started(chosen);
            changed = true;
        }
        return changed;
    }

    // --- main loop ---------------------------------------------------------------

    void process_timestamp()
    {
        for (;;) {
            bool changed = false;

            if (is_server_policy() && gpu.busy && gpu.finish == now) {
                handle_gpu_finish();
                changed = true;
            }

            // Deferred server work whose window opened.
            std::sort(deferred.begin(), deferred.end(), [](const DeferredMisc& a, const DeferredMisc& b) {
                if (a.due != b.due)
                    return a.due < b.due;
                return a.seq < b.seq;
            });
            while (!deferred.empty() && deferred.front().due <= now) {
                push_obligation({Obligation::Kind::misc, deferred.front().dur, -1});
                deferred.erase(deferred.begin());
                changed = true;
            }

            for (int c = 0; c < ts.platform.num_cores; c++) {
                Running& r = running[c];
                if (r.kind == Running::Kind::task && tasks[r.task_idx].work.remaining == 0) {
                    handle_task_completion(tasks[r.task_idx]);
                    changed = true;
                } else if (r.kind == Running::Kind::server && !obligations.empty() &&
                           obligations.front().remaining == 0) {
                    handle_obligation_done();
                    changed = true;
                }
            }

            changed |= process_releases();
            changed |= dispatch_all();

            if (!changed)
                break;
        }
    }

    void finalize()
    {
        // Jobs whose deadline fell inside the horizon but never finished.
        for (auto& tr : tasks) {
            if (tr.st != TaskRt::St::no_job && tr.job_release + tr.t->deadline <= cfg.horizon) {
                tr.missed++;
                emit(SimEventKind::deadline_miss, tr.core, tr.t->id);
                result.misses.push_back(
                    {tr.t->id, tr.job_release, tr.job_release + tr.t->deadline, 0, false});
            }
            for (const auto& q : tr.queued) {
                if (q.release + tr.t->deadline <= cfg.horizon) {
                    tr.missed++;
                    emit(SimEventKind::deadline_miss, tr.core, tr.t->id);
                    result.misses.push_back({tr.t->id, q.release, q.release + tr.t->deadline, 0, false});
                }
            }
        }
        for (const auto& tr : tasks) {
            TaskStats s;
            s.task_id = tr.t->id;
            s.jobs_released = tr.released;
            s.jobs_completed = tr.completed;
            s.worst_response = tr.worst;
            s.mean_response = tr.completed > 0 ? tr.resp_sum / static_cast<double>(tr.completed) : 0.0;
            s.deadline_misses = tr.missed;
            result.per_task.push_back(s);
        }
    }

    SimResult run()
    {
        init();
        process_timestamp();
        for (;;) {
            time_us t = next_event_time();
            if (t == kNoTime || t > cfg.horizon)
                break;
            advance_to(t);
            process_timestamp();
        }
        advance_to(cfg.horizon);
        finalize();
        return std::move(result);
    }
};

} // namespace

SimResult simulate(const Taskset& ts, const SimConfig& config)
{
    Engine engine(ts, config);
    return engine.run();
}

std::string trace_to_csv(const SimResult& result)
{
    std::ostringstream out;
    out << "time_us,core,actor,event\n";
    for (const auto& ev : result.trace) {
        out << ev.time << ',' << ev.core << ',';
        if (ev.actor == kServerActor)
            out << "server";
        else
            out << ev.actor;
        out << ',' << to_string(ev.kind) << '\n';
    }
    return out.str();
}

void write_trace_csv(const SimResult& result, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write trace file: " + path);
    out << trace_to_csv(result);
}

} // namespace gpusched
