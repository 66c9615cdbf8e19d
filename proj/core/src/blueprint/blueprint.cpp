#include "acp/blueprint/blueprint.hpp"

#include <algorithm>
#include <deque>
#include <regex>

#include <nlohmann/json.hpp>

namespace acp {

using Kind = BlueprintError::Kind;

std::string_view status_name(NodeStatus status) noexcept {
    switch (status) {
        case NodeStatus::Pending: return "Pending";
        case NodeStatus::Ready: return "Ready";
        case NodeStatus::Running: return "Running";
        case NodeStatus::Succeeded: return "Succeeded";
        case NodeStatus::Failed: return "Failed";
        case NodeStatus::Skipped: return "Skipped";
    }
    return "Unknown";
}

std::optional<NodeStatus> node_status_from_name(std::string_view name) noexcept {
    for (auto s : {NodeStatus::Pending, NodeStatus::Ready, NodeStatus::Running,
                   NodeStatus::Succeeded, NodeStatus::Failed, NodeStatus::Skipped}) {
        if (status_name(s) == name) return s;
    }
    return std::nullopt;
}

bool is_terminal(NodeStatus status) noexcept {
    return status == NodeStatus::Succeeded || status == NodeStatus::Failed ||
           status == NodeStatus::Skipped;
}

std::string_view kind_name(BlueprintError::Kind kind) noexcept {
    switch (kind) {
        case Kind::InvalidNode: return "InvalidNode";
        case Kind::DuplicateNode: return "DuplicateNode";
        case Kind::DanglingEdge: return "DanglingEdge";
        case Kind::CycleDetected: return "CycleDetected";
        case Kind::DanglingDependencyBinding: return "DanglingDependencyBinding";
        case Kind::UnknownNode: return "UnknownNode";
        case Kind::NodeNotRunning: return "NodeNotRunning";
        case Kind::InvalidTransition: return "InvalidTransition";
        case Kind::InvalidResponse: return "InvalidResponse";
        case Kind::OutputConflict: return "OutputConflict";
        case Kind::RetryBudgetExhausted: return "RetryBudgetExhausted";
        case Kind::RerouteCreatesCycle: return "RerouteCreatesCycle";
        case Kind::InvalidResolution: return "InvalidResolution";
    }
    return "Unknown";
}

std::optional<std::vector<NodeId>> find_cycle(const std::map<NodeId, std::set<NodeId>>& successors) {
    enum class Color { White, Gray, Black };
    std::map<NodeId, Color> color;
    for (const auto& [id, _] : successors) color[id] = Color::White;

    // Iterative DFS in ascending id order; the gray path is the witness.
    for (const auto& [root, _] : successors) {
        if (color[root] != Color::White) continue;
        struct Frame {
            NodeId id;
            std::set<NodeId>::const_iterator next;
            std::set<NodeId>::const_iterator end;
        };
        std::vector<Frame> stack;
        auto push = [&](const NodeId& id) {
            color[id] = Color::Gray;
            auto it = successors.find(id);
            static const std::set<NodeId> kEmpty;
            const auto& out = it == successors.end() ? kEmpty : it->second;
            stack.push_back({id, out.begin(), out.end()});
        };
        push(root);
        while (!stack.empty()) {
            auto& top = stack.back();
            if (top.next == top.end) {
                color[top.id] = Color::Black;
                stack.pop_back();
                continue;
            }
            const NodeId& child = *top.next++;
            Color c = color[child];
            if (c == Color::Gray) {
                std::vector<NodeId> cycle;
                auto start = std::find_if(stack.begin(), stack.end(),
                                          [&](const Frame& f) { return f.id == child; });
                for (auto it = start; it != stack.end(); ++it) cycle.push_back(it->id);
                cycle.push_back(child);
                return cycle;
            }
            if (c == Color::White) push(child);
        }
    }
    return std::nullopt;
}

namespace {

std::string join(const std::vector<NodeId>& ids, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out += sep;
        out += ids[i];
    }
    return out;
}

// Number of values a parameter carries: a JSON array counts its elements,
// anything else is one value.
size_t value_arity(const std::string& value) {
    if (value.empty() || value.front() != '[') return 1;
    auto parsed = nlohmann::json::parse(value, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array()) return 1;
    return parsed.size();
}

}  // namespace

ExecutionBlueprint ExecutionBlueprint::build(std::string goal, std::vector<BlueprintNode> nodes,
                                             std::vector<Edge> edges) {
    ExecutionBlueprint bp;
    bp.goal_ = std::move(goal);
    for (auto& n : nodes) {
        if (n.id.empty()) throw BlueprintError(Kind::InvalidNode, "node id must be non-empty");
        std::set<std::string> outs;
        for (const auto& o : n.expected_outputs) {
            if (o.empty() || !outs.insert(o).second)
                throw BlueprintError(Kind::InvalidNode,
                                     "node '" + n.id + "': expected output names must be non-empty and unique");
        }
        n.status = NodeStatus::Pending;
        NodeId id = n.id;
        if (!bp.nodes_.emplace(id, std::move(n)).second)
            throw BlueprintError(Kind::DuplicateNode, "duplicate node id '" + id + "'");
        bp.succ_[id];
        bp.pred_[id];
    }
    for (const auto& [from, to] : edges) {
        if (!bp.contains(from) || !bp.contains(to))
            throw BlueprintError(Kind::DanglingEdge, "edge " + from + " -> " + to +
                                                         " references an unknown node");
        bp.add_edge(from, to);
    }
    if (auto cycle = find_cycle(bp.succ_)) {
        std::string what = "cycle detected: " + join(*cycle, " -> ");
        throw BlueprintError(Kind::CycleDetected, what, std::move(*cycle));
    }
    for (const auto& [id, n] : bp.nodes_) bp.check_bindings(n);
    return bp;
}

void ExecutionBlueprint::add_edge(const NodeId& from, const NodeId& to) {
    edges_.emplace(from, to);
    succ_[from].insert(to);
    pred_[to].insert(from);
}

void ExecutionBlueprint::check_bindings(const BlueprintNode& n) const {
    for (const auto& b : n.params) {
        if (b.is_literal()) continue;
        const auto& src = b.source();
        if (!contains(src.node))
            throw BlueprintError(Kind::DanglingDependencyBinding,
                                 "node '" + n.id + "' param '" + b.name() +
                                     "' depends on unknown node '" + src.node + "'");
        if (!edges_.count({src.node, n.id}))
            throw BlueprintError(Kind::DanglingDependencyBinding,
                                 "node '" + n.id + "' param '" + b.name() + "' depends on '" +
                                     src.node + "' but there is no edge " + src.node + " -> " + n.id);
    }
}

const BlueprintNode& ExecutionBlueprint::node(const NodeId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw BlueprintError(Kind::UnknownNode, "unknown node '" + id + "'");
    return it->second;
}

BlueprintNode& ExecutionBlueprint::mutable_node(const NodeId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw BlueprintError(Kind::UnknownNode, "unknown node '" + id + "'");
    return it->second;
}

const std::set<NodeId>& ExecutionBlueprint::predecessors(const NodeId& id) const {
    auto it = pred_.find(id);
    if (it == pred_.end()) throw BlueprintError(Kind::UnknownNode, "unknown node '" + id + "'");
    return it->second;
}

const std::set<NodeId>& ExecutionBlueprint::successors(const NodeId& id) const {
    auto it = succ_.find(id);
    if (it == succ_.end()) throw BlueprintError(Kind::UnknownNode, "unknown node '" + id + "'");
    return it->second;
}

const std::string* ExecutionBlueprint::output(const NodeId& node, const std::string& name) const {
    auto it = store_.find(OutputKey{node, name});
    return it == store_.end() ? nullptr : &it->second;
}

const std::string* ExecutionBlueprint::dependent_input(const NodeId& target, const NodeId& source,
                                                      const std::string& name) const {
    auto it = dependents_.find(DependentKey{target, source, name});
    return it == dependents_.end() ? nullptr : &it->second;
}

std::vector<std::vector<NodeId>> ExecutionBlueprint::topological_layers() const {
    // Kahn's algorithm; a node's depth is 1 + the deepest predecessor.
    std::map<NodeId, size_t> indegree;
    std::map<NodeId, size_t> depth;
    std::deque<NodeId> queue;
    for (const auto& [id, preds] : pred_) {
        indegree[id] = preds.size();
        depth[id] = 0;
        if (preds.empty()) queue.push_back(id);
    }
    size_t max_depth = 0;
    while (!queue.empty()) {
        NodeId id = queue.front();
        queue.pop_front();
        max_depth = std::max(max_depth, depth[id]);
        for (const auto& s : succ_.at(id)) {
            depth[s] = std::max(depth[s], depth[id] + 1);
            if (--indegree[s] == 0) queue.push_back(s);
        }
    }
    std::vector<std::vector<NodeId>> layers(nodes_.empty() ? 0 : max_depth + 1);
    for (const auto& [id, d] : depth) layers[d].push_back(id);  // map order keeps ids ascending
    return layers;
}

std::set<NodeId> ExecutionBlueprint::descendants(const NodeId& id) const {
    const auto& first = successors(id);
    std::set<NodeId> seen;
    std::vector<NodeId> stack(first.begin(), first.end());
    while (!stack.empty()) {
        NodeId cur = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(cur).second) continue;
        for (const auto& s : succ_.at(cur)) stack.push_back(s);
    }
    return seen;
}

InputResolution ExecutionBlueprint::resolve_inputs(const NodeId& id, const EndpointSchema* endpoint) const {
    const auto& n = node(id);
    std::vector<BodyParam> values;
    std::set<std::string> seen;
    for (const auto& b : n.params) {
        if (!seen.insert(b.name()).second) {
            return InputFault{StatusCode::InvalidParameterUsage, b.name(),
                              "parameter '" + b.name() + "' is bound more than once"};
        }
        std::string value;
        if (b.is_literal()) {
            value = b.literal_value();
        } else {
            const auto& src = b.source();
            const std::string* stored = output(src.node, src.output);
            if (!stored) stored = dependent_input(id, src.node, src.output);
            if (!stored || stored->empty()) {
                return InputFault{StatusCode::MissingRequiredParameters, b.name(),
                                  "parameter '" + b.name() + "' needs output '" + src.output +
                                      "' of node '" + src.node + "', which is absent or empty"};
            }
            value = *stored;
        }
        if (value.empty()) {
            return InputFault{StatusCode::MissingRequiredParameters, b.name(),
                              "parameter '" + b.name() + "' has an empty value"};
        }
        if (endpoint) {
            if (const ParamSpec* spec = endpoint->find_param(b.name())) {
                if (!spec->multi_valued && value_arity(value) > 1) {
                    return InputFault{StatusCode::InvalidParameterUsage, b.name(),
                                      "parameter '" + b.name() +
                                          "' accepts a single value but was given several"};
                }
                if (!spec->pattern.empty() &&
                    !std::regex_match(value, std::regex(spec->pattern, std::regex::ECMAScript))) {
                    return InputFault{StatusCode::InvalidParameterUsage, b.name(),
                                      "parameter '" + b.name() + "' does not match format /" +
                                          spec->pattern + "/"};
                }
            }
        }
        values.push_back({b.name(), std::move(value)});
    }
    if (endpoint) {
        std::vector<std::string> missing;
        for (const auto& p : endpoint->required) {
            if (!seen.count(p.name)) missing.push_back(p.name);
        }
        if (!missing.empty()) {
            return InputFault{StatusCode::MissingRequiredParameters, missing.front(),
                              "endpoint '" + endpoint->id + "' requires " + join(missing, " and ") +
                                  ", which the step does not provide"};
        }
    }
    return values;
}

void ExecutionBlueprint::store_output(const NodeId& id, const AgentResponse& response) {
    auto& n = mutable_node(id);
    if (n.status != NodeStatus::Running)
        throw BlueprintError(Kind::NodeNotRunning, "node '" + id + "' is " +
                                                       std::string(status_name(n.status)) +
                                                       ", not Running");
    if (response.status != StatusCode::Ok)
        throw BlueprintError(Kind::InvalidResponse, "only a 200 response can be stored");
    for (const auto& expected : n.expected_outputs) {
        bool found = std::any_of(response.outputs.begin(), response.outputs.end(),
                                 [&](const OutputVariable& o) { return o.name == expected; });
        if (!found)
            throw BlueprintError(Kind::InvalidResponse, "response for '" + id +
                                                            "' lacks expected output '" + expected + "'");
    }

    for (const auto& d : response.dependent_inputs) {
        if (!contains(d.target_node))
            throw BlueprintError(Kind::UnknownNode, "dependent input '" + d.name +
                                                        "' targets unknown node '" + d.target_node + "'");
    }
    for (const auto& o : response.outputs) {
        auto it = store_.find(OutputKey{id, o.name});
        if (it != store_.end() && it->second != o.content)
            throw BlueprintError(Kind::OutputConflict, "output (" + id + ", " + o.name +
                                                           ") is already stored with different content");
    }
    for (const auto& o : response.outputs) store_.emplace(OutputKey{id, o.name}, o.content);
    for (const auto& d : response.dependent_inputs) dependents_[DependentKey{d.target_node, id, d.name}] = d.content;
    n.status = NodeStatus::Succeeded;
}

void ExecutionBlueprint::set_status(const NodeId& id, NodeStatus to) {
    auto& n = mutable_node(id);
    NodeStatus from = n.status;
    bool ok = (from == NodeStatus::Pending && to == NodeStatus::Ready) ||
              (from == NodeStatus::Ready && to == NodeStatus::Running) ||
              (from == NodeStatus::Running && to == NodeStatus::Failed) ||
              ((from == NodeStatus::Pending || from == NodeStatus::Ready) && to == NodeStatus::Skipped);
    if (!ok)
        throw BlueprintError(Kind::InvalidTransition,
                             "node '" + id + "': illegal transition " + std::string(status_name(from)) +
                                 " -> " + std::string(status_name(to)));
    if (to == NodeStatus::Running) ++n.attempts;
    n.status = to;
}

void ExecutionBlueprint::record_error(const NodeId& id, StatusCode code) {
    mutable_node(id).last_error = code;
}

void ExecutionBlueprint::apply_resolution(const NodeId& id, const ResolutionAction& action) {
    auto& n = mutable_node(id);
    if (n.status != NodeStatus::Running)
        throw BlueprintError(Kind::NodeNotRunning, "cannot resolve node '" + id + "' while it is " +
                                                       std::string(status_name(n.status)));
    switch (action.kind) {
        case ResolutionKind::Retry: {
            if (n.retries_remaining <= 0)
                throw BlueprintError(Kind::RetryBudgetExhausted,
                                     "node '" + id + "' has no retries remaining");
            --n.retries_remaining;
            ++n.resolutions;
            n.status = NodeStatus::Ready;
            return;
        }
        case ResolutionKind::Abandon: {
            ++n.resolutions;
            n.status = NodeStatus::Failed;
            for (const auto& d : descendants(id)) {
                auto& dn = nodes_.at(d);
                if (dn.status == NodeStatus::Pending || dn.status == NodeStatus::Ready)
                    dn.status = NodeStatus::Skipped;
            }
            return;
        }
        case ResolutionKind::Reroute:
            break;
    }

    if (!action.reroute)
        throw BlueprintError(Kind::InvalidResolution, "reroute of '" + id + "' carries no replacement binding");
    const auto& rb = *action.reroute;
    if (rb.tool.empty() || rb.endpoint.empty())
        throw BlueprintError(Kind::InvalidResolution, "reroute of '" + id + "' needs a tool and an endpoint");

    // Mutate a copy so a rejected reroute leaves this blueprint untouched.
    ExecutionBlueprint next = *this;
    auto& target = next.nodes_.at(id);
    if (rb.inserted_predecessor) {
        BlueprintNode ins = *rb.inserted_predecessor;
        ins.status = NodeStatus::Pending;
        ins.attempts = 0;
        ins.resolutions = 0;
        if (ins.id.empty()) throw BlueprintError(Kind::InvalidNode, "inserted node needs an id");
        std::set<std::string> outs;
        for (const auto& o : ins.expected_outputs) {
            if (o.empty() || !outs.insert(o).second)
                throw BlueprintError(Kind::InvalidNode, "inserted node '" + ins.id +
                                                            "': expected outputs must be non-empty and unique");
        }
        if (next.contains(ins.id))
            throw BlueprintError(Kind::DuplicateNode, "inserted node id '" + ins.id + "' already exists");
        NodeId ins_id = ins.id;
        std::vector<NodeId> sources;
        for (const auto& b : ins.params) {
            if (!b.is_literal()) sources.push_back(b.source().node);
        }
        next.nodes_.emplace(ins_id, std::move(ins));
        next.succ_[ins_id];
        next.pred_[ins_id];
        for (const auto& s : sources) {
            if (!next.contains(s))
                throw BlueprintError(Kind::DanglingDependencyBinding,
                                     "inserted node '" + ins_id + "' depends on unknown node '" + s + "'");
            next.add_edge(s, ins_id);
        }
        next.add_edge(ins_id, id);
    }
    target.replaced_tools.push_back(target.tool);
    target.tool = rb.tool;
    target.method = rb.method;
    target.endpoint = rb.endpoint;
    target.params = rb.params;
    for (const auto& b : target.params) {
        if (b.is_literal()) continue;
        if (!next.contains(b.source().node))
            throw BlueprintError(Kind::DanglingDependencyBinding,
                                 "reroute of '" + id + "' binds unknown node '" + b.source().node + "'");
        next.add_edge(b.source().node, id);
    }
    if (auto cycle = find_cycle(next.succ_)) {
        std::string what = "reroute of '" + id + "' would create cycle " + join(*cycle, " -> ");
        throw BlueprintError(Kind::RerouteCreatesCycle, what, std::move(*cycle));
    }
    ++target.resolutions;
    target.status = NodeStatus::Pending;
    *this = std::move(next);
}

void ExecutionBlueprint::restore_node_state(const NodeId& id, NodeStatus status, int retries_remaining,
                                            int attempts, std::optional<StatusCode> last_error) {
    auto& n = mutable_node(id);
    n.status = status;
    n.retries_remaining = retries_remaining;
    n.attempts = attempts;
    n.last_error = last_error;
}

void ExecutionBlueprint::restore_output(const OutputKey& key, std::string content) {
    store_[key] = std::move(content);
}

void ExecutionBlueprint::restore_dependent_input(const DependentKey& key, std::string content) {
    dependents_[key] = std::move(content);
}

}  // namespace acp
