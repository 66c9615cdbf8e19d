#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acp/blueprint/blueprint.hpp"
#include "acp/executor/executor.hpp"
#include "acp/fault/fault_handler.hpp"
#include "acp/scheduler/trace.hpp"
#include "acp/tools/registry.hpp"

namespace acp {

enum class ExecutionMode {
    FullACP,       // assistance requests go to the fault handler
    NoAssistance,  // any error abandons the node at once
    SingleAgent,   // id-ordered sequence, no dependency scheduling, stop at first failure
};

std::string_view mode_name(ExecutionMode mode) noexcept;
std::optional<ExecutionMode> mode_from_name(std::string_view name) noexcept;  // "fullacp", "noassist", "single"

struct ExecutionPolicy {
    ExecutionMode mode = ExecutionMode::FullACP;
    int worker_count = 1;
    std::chrono::milliseconds per_node_timeout{5000};
    std::uint64_t random_seed = 0;

    // SingleAgent forces a single worker; worker_count is at least 1.
    ExecutionPolicy normalized() const;
};

struct ExecutionReport {
    size_t succeeded = 0;
    size_t failed = 0;
    size_t skipped = 0;
    size_t total = 0;
    double completion_rate = 0.0;
    double wall_ms = 0.0;
};

// {"succeeded":..,"failed":..,"skipped":..,"total":..,"completion_rate":..,"wall_ms":..}
std::string emit_report_json(const ExecutionReport& report);

struct RunOptions {
    ReroutePolicy reroute;
    ResolutionHook resolution_hook;
    std::function<RelevanceValidator(const std::string& tool)> relevance;
    std::vector<std::string> secret_patterns = {"*_key", "*_token"};
    // Called on the scheduler thread for every event as it is recorded.
    std::function<void(const TraceEvent&)> on_event;
};

struct RunResult {
    ExecutionBlueprint blueprint;
    ExecutionTrace trace;
    ExecutionReport report;
};

// No ready node and nothing in flight while non-terminal nodes remain.
// Unreachable for a valid blueprint.
class Deadlock : public Error {
public:
    using Error::Error;
};

// Pending nodes whose predecessors all Succeeded, ascending by id.
std::vector<NodeId> ready_set(const ExecutionBlueprint& bp);

// Throws UnregisteredTool naming the first unknown tool.
void preflight(const ExecutionBlueprint& bp, const ToolRegistry& registry);

ExecutionReport make_report(const ExecutionBlueprint& bp, double wall_ms);

// Drives the blueprint until no node is Pending, Ready or Running. One loop
// owns the blueprint; up to worker_count executors run concurrently on
// read-only snapshots and hand back messages.
RunResult run(ExecutionBlueprint bp, const ToolRegistry& registry, const ExecutionPolicy& policy,
              const RunOptions& options = {});

}  // namespace acp
