#include "acp/protocol/messages.hpp"

#include <set>

namespace acp {

MessageKind kind_of(const Message& msg) noexcept {
    return static_cast<MessageKind>(msg.index());
}

std::string_view kind_name(MessageKind kind) noexcept {
    switch (kind) {
        case MessageKind::AgentRequest: return "AGENT_REQUEST";
        case MessageKind::AgentResponse: return "AGENT_RESPONSE";
        case MessageKind::AssistanceRequest: return "ASSISTANCE_REQUEST";
    }
    return "UNKNOWN";
}

std::string_view resolution_name(ResolutionKind kind) noexcept {
    switch (kind) {
        case ResolutionKind::Retry: return "Retry";
        case ResolutionKind::Reroute: return "Reroute";
        case ResolutionKind::Abandon: return "Abandon";
    }
    return "Unknown";
}

std::optional<ResolutionKind> resolution_from_name(std::string_view name) noexcept {
    for (auto kind : {ResolutionKind::Retry, ResolutionKind::Reroute, ResolutionKind::Abandon}) {
        if (resolution_name(kind) == name) return kind;
    }
    return std::nullopt;
}

namespace {

std::string indexed(std::string_view field, size_t i, std::string_view member) {
    return std::string(field) + "[" + std::to_string(i) + "]." + std::string(member);
}

}  // namespace

void validate(const AgentRequest& msg) {
    if (msg.endpoint.empty()) throw SchemaViolation("endpoint", "must be non-empty");
    std::set<std::string_view> seen;
    for (size_t i = 0; i < msg.headers.size(); ++i) {
        if (msg.headers[i].name.empty())
            throw SchemaViolation(indexed("headers", i, "name"), "must be non-empty");
        if (!seen.insert(msg.headers[i].name).second)
            throw SchemaViolation(indexed("headers", i, "name"),
                                  "duplicate header '" + msg.headers[i].name + "'");
    }
    seen.clear();
    for (size_t i = 0; i < msg.body.size(); ++i) {
        if (msg.body[i].name.empty())
            throw SchemaViolation(indexed("body", i, "name"), "must be non-empty");
        if (!seen.insert(msg.body[i].name).second)
            throw SchemaViolation(indexed("body", i, "name"),
                                  "duplicate body parameter '" + msg.body[i].name + "'");
    }
}

void validate(const AgentResponse& msg) {
    if (msg.status == StatusCode::Ok) {
        if (msg.outputs.empty())
            throw SchemaViolation("outputs", "a 200 response must carry at least one output");
    } else {
        if (!msg.outputs.empty())
            throw SchemaViolation("outputs", "an error response must not carry outputs");
        if (!msg.dependent_inputs.empty())
            throw SchemaViolation("dependent_inputs",
                                  "an error response must not carry dependent inputs");
    }
    for (size_t i = 0; i < msg.outputs.size(); ++i) {
        if (msg.outputs[i].name.empty())
            throw SchemaViolation(indexed("outputs", i, "name"), "must be non-empty");
    }
    for (size_t i = 0; i < msg.dependent_inputs.size(); ++i) {
        if (msg.dependent_inputs[i].name.empty())
            throw SchemaViolation(indexed("dependent_inputs", i, "name"), "must be non-empty");
        if (msg.dependent_inputs[i].target_node.empty())
            throw SchemaViolation(indexed("dependent_inputs", i, "target_node"),
                                  "must be non-empty");
    }
}

void validate(const AssistanceRequest& msg) {
    if (classify_stage(msg.error) == Stage::Success)
        throw SchemaViolation("error", "an assistance request must carry an error code");
    if (msg.error_node.empty()) throw SchemaViolation("error_node", "must be non-empty");
    if (msg.status_update.current_node != msg.error_node)
        throw SchemaViolation("status_update.current_node", "must equal error_node");
}

void validate(const Message& msg) {
    std::visit([](const auto& m) { validate(m); }, msg);
}

}  // namespace acp
