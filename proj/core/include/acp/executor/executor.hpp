#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "acp/blueprint/blueprint.hpp"
#include "acp/protocol/messages.hpp"
#include "acp/tools/registry.hpp"

namespace acp {

// Decides whether a raw payload is relevant to the node at all. Failing it
// raises 607. The default only requires a non-empty payload.
using RelevanceValidator = std::function<bool(const BlueprintNode& node, std::string_view payload)>;

// Built-in validator for JSON-field tools: the payload must be a JSON object.
RelevanceValidator json_object_validator();

// Where tool calls that outlived their timeout keep running. The owner joins
// them; without one they are detached.
class StragglerSet {
public:
    ~StragglerSet() { join_all(); }
    void adopt(std::thread t);
    void join_all();

private:
    std::mutex mu_;
    std::vector<std::thread> threads_;
};

struct ExecutorOptions {
    std::chrono::milliseconds timeout{5000};
    // Per-tool relevance validators, keyed by tool name.
    std::function<RelevanceValidator(const std::string& tool)> relevance;
    std::vector<std::string> secret_patterns;
    StragglerSet* stragglers = nullptr;
};

// A value a downstream node reads from this node's payload.
struct DependentSlot {
    std::string name;
    NodeId target_node;
    std::string declared_type;
};

std::vector<DependentSlot> dependent_slots(const ExecutionBlueprint& bp, const NodeId& id);

struct NodeOutcome {
    NodeId node;
    std::variant<AgentResponse, AssistanceRequest> result;
    std::optional<AgentRequest> request;  // present iff the tool was called
    std::chrono::steady_clock::duration elapsed{};

    bool succeeded() const noexcept { return std::holds_alternative<AgentResponse>(result); }
};

// Runs one node through input preparation, tool call and output
// validation. Reads the blueprint snapshot only; its sole output is a
// message.
class NodeExecutor {
public:
    explicit NodeExecutor(ExecutorOptions options = {}) : options_(std::move(options)) {}

    // Phase 1. Request-stage failures (601/602/603) come back as an
    // AssistanceRequest.
    std::variant<AgentRequest, AssistanceRequest> prepare_request(const ExecutionBlueprint& snapshot,
                                                                  const NodeId& id,
                                                                  const ToolSchema* schema) const;

    // Phase 2. Exceptions and timeouts become 604.
    std::variant<std::string, AssistanceRequest> invoke_tool(const ExecutionBlueprint& snapshot, const NodeId& id,
                                                             const AgentRequest& request,
                                                             const ToolAdapterPtr& adapter) const;

    // Phase 3. Missing current outputs are 605, missing dependent inputs 606,
    // irrelevant payloads 607.
    std::variant<AgentResponse, AssistanceRequest> validate_response(const ExecutionBlueprint& snapshot,
                                                                     const NodeId& id, std::string_view payload,
                                                                     const ToolSchema* schema) const;

    NodeOutcome execute(const ExecutionBlueprint& snapshot, const NodeId& id, const ToolRegistry& registry) const;

    const ExecutorOptions& options() const noexcept { return options_; }

private:
    AssistanceRequest assistance(const ExecutionBlueprint& snapshot, const NodeId& id, StatusCode code,
                                 std::string description, std::string relevant_context) const;

    ExecutorOptions options_;
};

// Default suggestion per code: request-stage codes reroute, 604 retries,
// extraction-stage codes retry on the first attempt and reroute after.
SuggestedResolution suggest_resolution(StatusCode code, int attempt, std::string_view detail);

// STATUS_UPDATE summarizing progress of the snapshot up to node id.
StatusUpdate make_status_update(const ExecutionBlueprint& snapshot, const NodeId& id, std::string issue);

}  // namespace acp
