#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "acp/error.hpp"
#include "acp/protocol/messages.hpp"
#include "acp/tools/schema.hpp"

namespace acp {

inline constexpr int kDefaultRetryBudget = 2;

enum class NodeStatus { Pending, Ready, Running, Succeeded, Failed, Skipped };

std::string_view status_name(NodeStatus status) noexcept;
std::optional<NodeStatus> node_status_from_name(std::string_view name) noexcept;
bool is_terminal(NodeStatus status) noexcept;

// One tool invocation in the execution blueprint.
struct BlueprintNode {
    NodeId id;  // "subtask.step"
    std::string subtask;
    std::string tool;
    std::string agent;  // owning agent, metadata only
    std::string method;
    std::string endpoint;
    std::vector<ParamBinding> params;
    std::vector<std::string> expected_outputs;

    NodeStatus status = NodeStatus::Pending;
    int retries_remaining = kDefaultRetryBudget;
    int attempts = 0;      // times dispatched
    int resolutions = 0;   // fault resolutions applied so far
    std::vector<std::string> replaced_tools;  // tools swapped out by reroutes
    std::optional<StatusCode> last_error;

    bool operator==(const BlueprintNode&) const = default;
};

using Edge = std::pair<NodeId, NodeId>;

// Replacement binding carried by a Reroute resolution. expected_outputs are
// deliberately absent: a reroute never changes what a node must produce.
struct RerouteBinding {
    std::string tool;
    std::string method;
    std::string endpoint;
    std::vector<ParamBinding> params;
    std::optional<BlueprintNode> inserted_predecessor;

    bool operator==(const RerouteBinding&) const = default;
};

struct ResolutionAction {
    ResolutionKind kind = ResolutionKind::Abandon;
    std::optional<RerouteBinding> reroute;  // present iff kind == Reroute
    std::string rationale;

    static ResolutionAction retry(std::string rationale) {
        return {ResolutionKind::Retry, std::nullopt, std::move(rationale)};
    }
    static ResolutionAction reroute_to(RerouteBinding binding, std::string rationale) {
        return {ResolutionKind::Reroute, std::move(binding), std::move(rationale)};
    }
    static ResolutionAction abandon(std::string rationale) {
        return {ResolutionKind::Abandon, std::nullopt, std::move(rationale)};
    }

    bool operator==(const ResolutionAction&) const = default;
};

class BlueprintError : public Error {
public:
    enum class Kind {
        InvalidNode,
        DuplicateNode,
        DanglingEdge,
        CycleDetected,
        DanglingDependencyBinding,
        UnknownNode,
        NodeNotRunning,
        InvalidTransition,
        InvalidResponse,
        OutputConflict,
        RetryBudgetExhausted,
        RerouteCreatesCycle,
        InvalidResolution,
    };

    BlueprintError(Kind kind, const std::string& what, std::vector<NodeId> cycle = {})
        : Error(what), kind_(kind), cycle_(std::move(cycle)) {}

    Kind kind() const noexcept { return kind_; }
    // Witness for CycleDetected / RerouteCreatesCycle: first id repeated last.
    const std::vector<NodeId>& cycle() const noexcept { return cycle_; }

private:
    Kind kind_;
    std::vector<NodeId> cycle_;
};

std::string_view kind_name(BlueprintError::Kind kind) noexcept;

// A request-stage failure found while resolving a node's parameters.
struct InputFault {
    StatusCode code;
    std::string param;
    std::string description;
};

using InputResolution = std::variant<std::vector<BodyParam>, InputFault>;

// Key of the output store: (node id, output-variable name).
using OutputKey = NodeOutputRef;

// A value a producer extracted for a downstream node, kept apart from the
// target's own outputs.
struct DependentKey {
    NodeId target;
    NodeId source;
    std::string name;

    bool operator==(const DependentKey&) const = default;
    auto operator<=>(const DependentKey&) const = default;
};

// The execution blueprint: a validated DAG of tool invocations plus the
// store of validated node outputs. All mutation goes through member
// functions that keep the graph acyclic and statuses on legal transitions.
class ExecutionBlueprint {
public:
    ExecutionBlueprint() = default;

    // Validates node ids, edges, dependency bindings and acyclicity.
    // Every node is reset to Pending.
    static ExecutionBlueprint build(std::string goal, std::vector<BlueprintNode> nodes,
                                    std::vector<Edge> edges);

    const std::string& goal() const noexcept { return goal_; }
    const std::map<NodeId, BlueprintNode>& nodes() const noexcept { return nodes_; }
    const std::set<Edge>& edges() const noexcept { return edges_; }
    const std::map<OutputKey, std::string>& output_store() const noexcept { return store_; }
    const std::map<DependentKey, std::string>& dependent_store() const noexcept { return dependents_; }

    bool contains(const NodeId& id) const noexcept { return nodes_.count(id) != 0; }
    const BlueprintNode& node(const NodeId& id) const;  // throws UnknownNode
    const std::set<NodeId>& predecessors(const NodeId& id) const;
    const std::set<NodeId>& successors(const NodeId& id) const;
    const std::string* output(const NodeId& node, const std::string& name) const;
    const std::string* dependent_input(const NodeId& target, const NodeId& source, const std::string& name) const;

    // Layer k holds the nodes whose longest predecessor chain has length k.
    std::vector<std::vector<NodeId>> topological_layers() const;

    // Transitive successors of id, excluding id.
    std::set<NodeId> descendants(const NodeId& id) const;

    // Values for the node's parameters in binding order. Dependency bindings
    // read (source node, output) first and fall back to the dependent input
    // the source extracted for this node. With an endpoint schema, required
    // params, arity and format are checked too.
    InputResolution resolve_inputs(const NodeId& id, const EndpointSchema* endpoint = nullptr) const;

    // Marks a Running node Succeeded and records its outputs and the
    // dependent inputs it extracted for downstream nodes.
    void store_output(const NodeId& id, const AgentResponse& response);

    void apply_resolution(const NodeId& id, const ResolutionAction& action);

    // Ordinary lifecycle moves: Pending->Ready, Ready->Running (counts an
    // attempt), Running->Failed, Pending/Ready->Skipped.
    void set_status(const NodeId& id, NodeStatus to);
    void record_error(const NodeId& id, StatusCode code);

    // Directly seeds node state; used when restoring an exported run.
    void restore_node_state(const NodeId& id, NodeStatus status, int retries_remaining,
                            int attempts, std::optional<StatusCode> last_error);
    void restore_output(const OutputKey& key, std::string content);
    void restore_dependent_input(const DependentKey& key, std::string content);

    bool operator==(const ExecutionBlueprint&) const = default;

private:
    BlueprintNode& mutable_node(const NodeId& id);
    void check_bindings(const BlueprintNode& node) const;
    void add_edge(const NodeId& from, const NodeId& to);

    std::string goal_;
    std::map<NodeId, BlueprintNode> nodes_;
    std::set<Edge> edges_;
    std::map<NodeId, std::set<NodeId>> succ_;
    std::map<NodeId, std::set<NodeId>> pred_;
    std::map<OutputKey, std::string> store_;
    std::map<DependentKey, std::string> dependents_;
};

// Returns a witness cycle (first id repeated last) if the edge relation over
// the given nodes has one. Exposed for planner diagnostics and tests.
std::optional<std::vector<NodeId>> find_cycle(const std::map<NodeId, std::set<NodeId>>& successors);

}  // namespace acp
