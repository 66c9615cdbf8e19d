#include "acp/scheduler/scheduler.hpp"

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "json_io.hpp"
#include "acp/protocol/codec.hpp"

namespace acp {

std::string_view mode_name(ExecutionMode mode) noexcept {
    switch (mode) {
        case ExecutionMode::FullACP: return "fullacp";
        case ExecutionMode::NoAssistance: return "noassist";
        case ExecutionMode::SingleAgent: return "single";
    }
    return "unknown";
}

std::optional<ExecutionMode> mode_from_name(std::string_view name) noexcept {
    for (auto m : {ExecutionMode::FullACP, ExecutionMode::NoAssistance, ExecutionMode::SingleAgent}) {
        if (mode_name(m) == name) return m;
    }
    return std::nullopt;
}

ExecutionPolicy ExecutionPolicy::normalized() const {
    ExecutionPolicy p = *this;
    if (p.worker_count < 1) p.worker_count = 1;
    if (p.mode == ExecutionMode::SingleAgent) p.worker_count = 1;
    return p;
}

std::string emit_report_json(const ExecutionReport& r) {
    detail::ojson doc{{"succeeded", r.succeeded}, {"failed", r.failed},   {"skipped", r.skipped},
                      {"total", r.total},         {"completion_rate", r.completion_rate}, {"wall_ms", r.wall_ms}};
    return doc.dump(2) + "\n";
}

std::vector<NodeId> ready_set(const ExecutionBlueprint& bp) {
    std::vector<NodeId> out;
    for (const auto& [id, n] : bp.nodes()) {
        if (n.status != NodeStatus::Pending) continue;
        bool ok = true;
        for (const auto& p : bp.predecessors(id)) {
            if (bp.node(p).status != NodeStatus::Succeeded) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(id);
    }
    return out;
}

void preflight(const ExecutionBlueprint& bp, const ToolRegistry& registry) {
    for (const auto& [_, n] : bp.nodes()) {
        if (!registry.contains(n.tool)) throw UnregisteredTool(n.tool);
    }
}

ExecutionReport make_report(const ExecutionBlueprint& bp, double wall_ms) {
    ExecutionReport r;
    for (const auto& [_, n] : bp.nodes()) {
        if (n.status == NodeStatus::Succeeded) ++r.succeeded;
        else if (n.status == NodeStatus::Failed) ++r.failed;
        else if (n.status == NodeStatus::Skipped) ++r.skipped;
    }
    r.total = bp.nodes().size();
    r.completion_rate = r.total == 0 ? 1.0 : static_cast<double>(r.succeeded) / static_cast<double>(r.total);
    r.wall_ms = wall_ms;
    return r;
}

namespace {

using Clock = std::chrono::steady_clock;

// Fixed set of worker threads draining a job queue; completed outcomes are
// handed back through a second queue the scheduler loop blocks on.
class WorkerPool {
public:
    explicit WorkerPool(int workers) {
        for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { work(); });
    }

    ~WorkerPool() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            stopping_ = true;
        }
        jobs_cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    void submit(std::function<NodeOutcome()> job) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            jobs_.push_back(std::move(job));
        }
        jobs_cv_.notify_one();
    }

    NodeOutcome next_result() {
        std::unique_lock<std::mutex> lock(mu_);
        done_cv_.wait(lock, [this] { return !done_.empty(); });
        NodeOutcome out = std::move(done_.front());
        done_.pop_front();
        return out;
    }

private:
    void work() {
        for (;;) {
            std::function<NodeOutcome()> job;
            {
                std::unique_lock<std::mutex> lock(mu_);
                jobs_cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
                if (jobs_.empty()) return;
                job = std::move(jobs_.front());
                jobs_.pop_front();
            }
            NodeOutcome out = job();
            {
                std::lock_guard<std::mutex> lock(mu_);
                done_.push_back(std::move(out));
            }
            done_cv_.notify_one();
        }
    }

    std::mutex mu_;
    std::condition_variable jobs_cv_;
    std::condition_variable done_cv_;
    std::deque<std::function<NodeOutcome()>> jobs_;
    std::deque<NodeOutcome> done_;
    bool stopping_ = false;
    std::vector<std::thread> threads_;
};

class Run {
public:
    Run(ExecutionBlueprint bp, const ToolRegistry& registry, const ExecutionPolicy& policy, const RunOptions& options)
        : bp_(std::move(bp)),
          registry_(registry),
          policy_(policy.normalized()),
          options_(options),
          executor_(ExecutorOptions{policy_.per_node_timeout, options.relevance, options.secret_patterns, &stragglers_}),
          handler_(options.reroute, registry.catalog(), options.resolution_hook) {
        trace_.mode = std::string(mode_name(policy_.mode));
        trace_.workers = policy_.worker_count;
        trace_.seed = policy_.random_seed;
    }

    RunResult execute() {
        preflight(bp_, registry_);
        started_ = Clock::now();
        if (policy_.mode == ExecutionMode::SingleAgent) run_sequential();
        else run_graph();
        stragglers_.join_all();
        double wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started_).count();
        ExecutionReport report = make_report(bp_, wall_ms);
        return {std::move(bp_), std::move(trace_), report};
    }

private:
    void run_graph() {
        WorkerPool pool(policy_.worker_count);
        size_t in_flight = 0;
        for (;;) {
            for (const auto& id : ready_set(bp_)) bp_.set_status(id, NodeStatus::Ready);

            std::vector<NodeId> batch;
            for (const auto& [id, n] : bp_.nodes()) {
                if (in_flight + batch.size() >= static_cast<size_t>(policy_.worker_count)) break;
                if (n.status == NodeStatus::Ready) batch.push_back(id);
            }
            for (const auto& id : batch) {
                bp_.set_status(id, NodeStatus::Running);
                record(id, TraceEventKind::Dispatched, "attempt " + std::to_string(bp_.node(id).attempts));
            }
            if (!batch.empty()) {
                auto snapshot = std::make_shared<const ExecutionBlueprint>(bp_);
                for (const auto& id : batch) {
                    pool.submit([this, snapshot, id] { return guarded_execute(*snapshot, id); });
                    ++in_flight;
                }
            }

            if (in_flight == 0) {
                for (const auto& [id, n] : bp_.nodes()) {
                    if (!is_terminal(n.status))
                        throw Deadlock("no runnable node while '" + id + "' is " + std::string(status_name(n.status)));
                }
                return;
            }

            NodeOutcome outcome = pool.next_result();
            --in_flight;
            ++tick_;
            handle(outcome);
        }
    }

    void run_sequential() {
        std::vector<NodeId> order;
        for (const auto& [id, _] : bp_.nodes()) order.push_back(id);
        for (size_t i = 0; i < order.size(); ++i) {
            const NodeId& id = order[i];
            if (bp_.node(id).status != NodeStatus::Pending) continue;
            bp_.set_status(id, NodeStatus::Ready);
            bp_.set_status(id, NodeStatus::Running);
            record(id, TraceEventKind::Dispatched, "attempt 1");
            ExecutionBlueprint snapshot = bp_;
            NodeOutcome outcome = guarded_execute(snapshot, id);
            ++tick_;
            note_tool_call(outcome);
            if (auto* resp = std::get_if<AgentResponse>(&outcome.result)) {
                bp_.store_output(id, *resp);
                record(id, TraceEventKind::Succeeded, outputs_detail(*resp));
                continue;
            }
            const auto& help = std::get<AssistanceRequest>(outcome.result);
            bp_.record_error(id, help.error);
            record(id, TraceEventKind::ErrorRaised, help.description, help.error);
            bp_.set_status(id, NodeStatus::Failed);
            record(id, TraceEventKind::ResolutionApplied, "single agent cannot recover; abandoning the rest",
                   std::nullopt, ResolutionKind::Abandon);
            for (size_t j = i + 1; j < order.size(); ++j) {
                if (bp_.node(order[j]).status == NodeStatus::Pending) {
                    bp_.set_status(order[j], NodeStatus::Skipped);
                    record(order[j], TraceEventKind::Skipped, "sequence stopped at " + id);
                }
            }
            return;
        }
    }

    NodeOutcome guarded_execute(const ExecutionBlueprint& snapshot, const NodeId& id) const {
        try {
            return executor_.execute(snapshot, id, registry_);
        } catch (const std::exception& e) {
            const auto& node = snapshot.node(id);
            AssistanceRequest help;
            help.error = StatusCode::ToolCallFailure;
            help.error_node = id;
            help.error_tool = node.tool;
            help.description = std::string("executor error: ") + e.what();
            help.suggested_resolution = suggest_resolution(help.error, node.attempts, help.description);
            help.status_update = make_status_update(snapshot, id, help.description);
            return NodeOutcome{id, std::move(help), std::nullopt, {}};
        }
    }

    void handle(const NodeOutcome& outcome) {
        const NodeId& id = outcome.node;
        note_tool_call(outcome);
        if (auto* resp = std::get_if<AgentResponse>(&outcome.result)) {
            bp_.store_output(id, *resp);
            record(id, TraceEventKind::Succeeded, outputs_detail(*resp));
            return;
        }
        const auto& help = std::get<AssistanceRequest>(outcome.result);
        bp_.record_error(id, help.error);
        record(id, TraceEventKind::ErrorRaised, help.description, help.error);

        std::set<NodeId> before_skipped = skipped_nodes();
        ResolutionAction applied;
        if (policy_.mode == ExecutionMode::FullACP) {
            record(id, TraceEventKind::AssistancePosted, help.suggested_resolution.rationale, help.error,
                   help.suggested_resolution.action);
            applied = handler_.resolve(help, bp_);
        } else {
            applied = ResolutionAction::abandon("assistance unavailable under the no-assistance policy");
            bp_.apply_resolution(id, applied);
        }
        std::string detail = applied.rationale;
        if (applied.reroute && applied.reroute->inserted_predecessor)
            detail += " [inserted " + applied.reroute->inserted_predecessor->id + "]";
        record(id, TraceEventKind::ResolutionApplied, detail, std::nullopt, applied.kind);

        for (const auto& s : skipped_nodes()) {
            if (!before_skipped.count(s)) record(s, TraceEventKind::Skipped, "upstream " + id + " abandoned");
        }
    }

    void note_tool_call(const NodeOutcome& outcome) {
        if (!outcome.request) return;
        AgentRequest shown = redact_secrets(*outcome.request, options_.secret_patterns);
        std::string detail = shown.method + " " + shown.endpoint;
        for (const auto& p : shown.body) detail += " " + p.name + "=" + p.value;
        record(outcome.node, TraceEventKind::ToolCalled, detail);
    }

    static std::string outputs_detail(const AgentResponse& resp) {
        std::string out = "outputs:";
        for (const auto& o : resp.outputs) out += " " + o.name;
        return out;
    }

    std::set<NodeId> skipped_nodes() const {
        std::set<NodeId> out;
        for (const auto& [id, n] : bp_.nodes()) {
            if (n.status == NodeStatus::Skipped) out.insert(id);
        }
        return out;
    }

    void record(const NodeId& node, TraceEventKind kind, std::string detail,
                std::optional<StatusCode> code = std::nullopt, std::optional<ResolutionKind> action = std::nullopt) {
        TraceEvent e;
        e.seq = trace_.events.size();
        e.tick = tick_;
        e.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - started_);
        e.node = node;
        e.kind = kind;
        e.code = code;
        e.action = action;
        e.detail = std::move(detail);
        if (options_.on_event) options_.on_event(e);
        trace_.events.push_back(std::move(e));
    }

    ExecutionBlueprint bp_;
    const ToolRegistry& registry_;
    ExecutionPolicy policy_;
    const RunOptions& options_;
    StragglerSet stragglers_;
    NodeExecutor executor_;
    FaultHandler handler_;
    ExecutionTrace trace_;
    Clock::time_point started_{};
    std::uint64_t tick_ = 0;
};

}  // namespace

RunResult run(ExecutionBlueprint bp, const ToolRegistry& registry, const ExecutionPolicy& policy,
              const RunOptions& options) {
    Run r(std::move(bp), registry, policy, options);
    return r.execute();
}

}  // namespace acp
