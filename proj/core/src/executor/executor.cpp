#include "acp/executor/executor.hpp"

#include <algorithm>
#include <future>
#include <set>

#include <nlohmann/json.hpp>

namespace acp {

RelevanceValidator json_object_validator() {
    return [](const BlueprintNode&, std::string_view payload) {
        auto doc = nlohmann::json::parse(payload, nullptr, false);
        return !doc.is_discarded() && doc.is_object();
    };
}

void StragglerSet::adopt(std::thread t) {
    std::lock_guard<std::mutex> lock(mu_);
    threads_.push_back(std::move(t));
}

void StragglerSet::join_all() {
    std::vector<std::thread> pending;
    {
        std::lock_guard<std::mutex> lock(mu_);
        pending.swap(threads_);
    }
    for (auto& t : pending) {
        if (t.joinable()) t.join();
    }
}

std::vector<DependentSlot> dependent_slots(const ExecutionBlueprint& bp, const NodeId& id) {
    std::vector<DependentSlot> out;
    for (const auto& succ : bp.successors(id)) {
        for (const auto& b : bp.node(succ).params) {
            if (!b.is_literal() && b.source().node == id) out.push_back({b.source().output, succ, "string"});
        }
    }
    return out;
}

SuggestedResolution suggest_resolution(StatusCode code, int attempt, std::string_view detail) {
    std::string why(detail);
    switch (classify_stage(code)) {
        case Stage::RequestStage:
            return {ResolutionKind::Reroute,
                    "Add a step that provides the missing or malformed inputs, or switch to a tool "
                    "whose parameters the step can satisfy. " + why};
        case Stage::ToolCallStage:
            return {ResolutionKind::Retry, "The failure looks transient; retry the call. " + why};
        case Stage::OutputExtractionStage:
            if (attempt <= 1)
                return {ResolutionKind::Retry, "Tool output varies between calls; retry once. " + why};
            return {ResolutionKind::Reroute,
                    "Retrying did not produce usable output; switch to an alternative tool. " + why};
        case Stage::Success:
            break;
    }
    return {ResolutionKind::Abandon, why};
}

StatusUpdate make_status_update(const ExecutionBlueprint& snapshot, const NodeId& id, std::string issue) {
    const auto& node = snapshot.node(id);
    StatusUpdate su;
    std::vector<NodeId> done;
    for (const auto& [nid, n] : snapshot.nodes()) {
        if (n.status != NodeStatus::Succeeded) continue;
        done.push_back(nid);
        std::string outs;
        for (const auto& o : n.expected_outputs) outs += (outs.empty() ? "" : ", ") + o;
        su.completed_tools.push_back(
            {n.tool, "step " + nid + (outs.empty() ? " completed" : " produced " + outs)});
    }
    su.previous_progress = "Completed " + std::to_string(done.size()) + " of " +
                           std::to_string(snapshot.nodes().size()) + " steps";
    if (!done.empty()) {
        su.previous_progress += " (";
        for (size_t i = 0; i < done.size(); ++i) su.previous_progress += (i ? ", " : "") + done[i];
        su.previous_progress += ")";
    }
    su.current_progress = "Attempted step " + id + " (attempt " + std::to_string(std::max(node.attempts, 1)) +
                          ") using " + node.tool + "/" + node.endpoint;
    su.current_node = id;
    su.encountered_issues = std::move(issue);
    return su;
}

namespace {

std::string binding_context(const BlueprintNode& node) {
    if (node.params.empty()) return "The step binds no parameters.";
    std::string out = "The step binds:";
    for (const auto& b : node.params) {
        out += " " + b.name();
        if (b.is_literal()) out += " (literal);";
        else out += " <- " + b.source().node + "." + b.source().output + ";";
    }
    out.pop_back();
    return out + ".";
}

bool has_content(const nlohmann::json& v) {
    if (v.is_null()) return false;
    if (v.is_string()) return !v.get_ref<const std::string&>().empty();
    if (v.is_array() || v.is_object()) return !v.empty();
    return true;
}

std::string content_of(const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

AssistanceRequest NodeExecutor::assistance(const ExecutionBlueprint& snapshot, const NodeId& id, StatusCode code,
                                           std::string description, std::string relevant_context) const {
    const auto& node = snapshot.node(id);
    AssistanceRequest req;
    req.error = code;
    req.error_node = id;
    req.error_tool = node.tool;
    req.suggested_resolution = suggest_resolution(code, std::max(node.attempts, 1), description);
    req.status_update = make_status_update(snapshot, id, std::string(status_name(code)) + ": " + description);
    req.description = std::move(description);
    req.relevant_context = std::move(relevant_context);
    return req;
}

std::variant<AgentRequest, AssistanceRequest> NodeExecutor::prepare_request(const ExecutionBlueprint& snapshot,
                                                                            const NodeId& id,
                                                                            const ToolSchema* schema) const {
    const auto& node = snapshot.node(id);
    if (!schema) {
        return assistance(snapshot, id, StatusCode::WrongStepDetails,
                          "tool '" + node.tool + "' is not available", binding_context(node));
    }
    const EndpointSchema* endpoint = schema->find_endpoint(node.endpoint);
    if (!endpoint) {
        return assistance(snapshot, id, StatusCode::WrongStepDetails,
                          "tool '" + node.tool + "' has no endpoint '" + node.endpoint + "'",
                          binding_context(node));
    }
    for (const auto& b : node.params) {
        if (!endpoint->find_param(b.name())) {
            return assistance(snapshot, id, StatusCode::WrongStepDetails,
                              "endpoint '" + endpoint->id + "' does not declare parameter '" + b.name() + "'",
                              binding_context(node));
        }
    }
    auto resolved = snapshot.resolve_inputs(id, endpoint);
    if (auto* fault = std::get_if<InputFault>(&resolved)) {
        return assistance(snapshot, id, fault->code, fault->description, binding_context(node));
    }
    AgentRequest req;
    req.method = node.method.empty() ? "FUNCTION" : node.method;
    req.endpoint = node.endpoint;
    req.body = std::move(std::get<std::vector<BodyParam>>(resolved));
    return req;
}

std::variant<std::string, AssistanceRequest> NodeExecutor::invoke_tool(const ExecutionBlueprint& snapshot,
                                                                       const NodeId& id,
                                                                       const AgentRequest& request,
                                                                       const ToolAdapterPtr& adapter) const {
    const auto& node = snapshot.node(id);
    CallContext ctx{id, std::max(node.attempts, 1), options_.timeout};

    auto promise = std::make_shared<std::promise<std::string>>();
    auto future = promise->get_future();
    std::thread worker([adapter, request, ctx, promise] {
        try {
            promise->set_value(adapter->call(request, ctx));
        } catch (...) {
            promise->set_exception(std::current_exception());
        }
    });

    if (future.wait_for(options_.timeout) != std::future_status::ready) {
        if (options_.stragglers) options_.stragglers->adopt(std::move(worker));
        else worker.detach();
        return assistance(snapshot, id, StatusCode::ToolCallFailure,
                          "timeout after " + std::to_string(options_.timeout.count()) + "ms",
                          "tool " + node.tool + "/" + request.endpoint + " did not answer in time");
    }
    worker.join();
    try {
        return future.get();
    } catch (const std::exception& e) {
        return assistance(snapshot, id, StatusCode::ToolCallFailure, e.what(),
                          "tool " + node.tool + "/" + request.endpoint + " raised an error");
    } catch (...) {
        return assistance(snapshot, id, StatusCode::ToolCallFailure, "unknown error",
                          "tool " + node.tool + "/" + request.endpoint + " raised an error");
    }
}

std::variant<AgentResponse, AssistanceRequest> NodeExecutor::validate_response(const ExecutionBlueprint& snapshot,
                                                                               const NodeId& id,
                                                                               std::string_view payload,
                                                                               const ToolSchema* schema) const {
    const auto& node = snapshot.node(id);
    if (payload.empty()) {
        return assistance(snapshot, id, StatusCode::IncompleteInformation, "the tool returned an empty payload",
                          "expected outputs could not be extracted from an empty response");
    }
    RelevanceValidator relevant = options_.relevance ? options_.relevance(node.tool) : RelevanceValidator{};
    if (relevant && !relevant(node, payload)) {
        return assistance(snapshot, id, StatusCode::WrongInformation,
                          "the tool response is irrelevant or erroneous for this step",
                          "the payload failed the relevance check for " + node.tool);
    }

    const EndpointSchema* endpoint = schema ? schema->find_endpoint(node.endpoint) : nullptr;
    OutputMode mode = endpoint ? endpoint->output_mode : OutputMode::WholePayload;
    auto slots = dependent_slots(snapshot, id);

    AgentResponse resp;
    std::vector<std::string> missing;
    std::vector<std::string> missing_deps;

    if (mode == OutputMode::WholePayload) {
        if (node.expected_outputs.empty()) resp.outputs.push_back({"payload", std::string(payload)});
        for (size_t i = 0; i < node.expected_outputs.size(); ++i) {
            if (i == 0) resp.outputs.push_back({node.expected_outputs[0], std::string(payload)});
            else missing.push_back(node.expected_outputs[i]);
        }
        for (const auto& slot : slots) {
            if (!node.expected_outputs.empty() && slot.name == node.expected_outputs.front())
                resp.dependent_inputs.push_back({slot.name, slot.target_node, slot.declared_type, std::string(payload)});
            else
                missing_deps.push_back(slot.name + " for " + slot.target_node);
        }
    } else {
        auto doc = nlohmann::json::parse(payload, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            return assistance(snapshot, id, StatusCode::IncompleteInformation,
                              "the tool payload is not a JSON object, so no output fields could be extracted",
                              "expected fields: " + std::to_string(node.expected_outputs.size()));
        }
        if (node.expected_outputs.empty()) resp.outputs.push_back({"payload", std::string(payload)});
        for (const auto& name : node.expected_outputs) {
            auto it = doc.find(name);
            if (it == doc.end() || !has_content(*it)) missing.push_back(name);
            else resp.outputs.push_back({name, content_of(*it)});
        }
        for (const auto& slot : slots) {
            auto it = doc.find(slot.name);
            if (it == doc.end() || !has_content(*it)) missing_deps.push_back(slot.name + " for " + slot.target_node);
            else resp.dependent_inputs.push_back({slot.name, slot.target_node, slot.declared_type, content_of(*it)});
        }
    }

    auto joined = [](const std::vector<std::string>& v) {
        std::string out;
        for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
        return out;
    };
    if (!missing.empty()) {
        return assistance(snapshot, id, StatusCode::IncompleteInformation,
                          "the tool response lacks " + joined(missing) + " needed by this step",
                          "expected outputs of " + id + " are incomplete");
    }
    if (!missing_deps.empty()) {
        return assistance(snapshot, id, StatusCode::DependencyIncompleteInformation,
                          "the tool response lacks " + joined(missing_deps) + " needed by dependent steps",
                          "outputs for " + id + " are present but downstream inputs cannot be populated");
    }
    return resp;
}

NodeOutcome NodeExecutor::execute(const ExecutionBlueprint& snapshot, const NodeId& id,
                                  const ToolRegistry& registry) const {
    auto started = std::chrono::steady_clock::now();
    NodeOutcome out{id, AgentResponse{}, std::nullopt, {}};
    const auto& node = snapshot.node(id);
    ToolAdapterPtr adapter = registry.find(node.tool);
    const ToolSchema* schema = adapter ? &adapter->schema() : nullptr;

    auto finish = [&](auto&& result) {
        out.result = std::forward<decltype(result)>(result);
        out.elapsed = std::chrono::steady_clock::now() - started;
        return out;
    };

    auto prepared = prepare_request(snapshot, id, schema);
    if (auto* help = std::get_if<AssistanceRequest>(&prepared)) return finish(std::move(*help));
    auto& request = std::get<AgentRequest>(prepared);
    out.request = request;

    auto raw = invoke_tool(snapshot, id, request, adapter);
    if (auto* help = std::get_if<AssistanceRequest>(&raw)) return finish(std::move(*help));

    auto validated = validate_response(snapshot, id, std::get<std::string>(raw), schema);
    if (auto* help = std::get_if<AssistanceRequest>(&validated)) return finish(std::move(*help));
    return finish(std::move(std::get<AgentResponse>(validated)));
}

}  // namespace acp
