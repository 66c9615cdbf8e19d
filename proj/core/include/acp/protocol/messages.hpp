#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "acp/error.hpp"
#include "acp/protocol/status.hpp"

namespace acp {

using NodeId = std::string;

// Address of one output variable produced by a blueprint node.
struct NodeOutputRef {
    NodeId node;
    std::string output;

    bool operator==(const NodeOutputRef&) const = default;
    auto operator<=>(const NodeOutputRef&) const = default;
};

enum class ParamOrigin { Literal, Dependency };

// A request parameter whose value is either fixed text produced by the
// planning agent, or the output of an upstream node.
class ParamBinding {
public:
    static ParamBinding literal(std::string name, std::string value) {
        return ParamBinding(std::move(name), std::move(value));
    }
    static ParamBinding dependency(std::string name, NodeOutputRef source) {
        return ParamBinding(std::move(name), std::move(source));
    }

    const std::string& name() const noexcept { return name_; }
    ParamOrigin origin() const noexcept {
        return std::holds_alternative<std::string>(value_) ? ParamOrigin::Literal
                                                           : ParamOrigin::Dependency;
    }
    bool is_literal() const noexcept { return origin() == ParamOrigin::Literal; }

    // Precondition: is_literal().
    const std::string& literal_value() const { return std::get<std::string>(value_); }
    // Precondition: !is_literal().
    const NodeOutputRef& source() const { return std::get<NodeOutputRef>(value_); }

    bool operator==(const ParamBinding&) const = default;

private:
    ParamBinding(std::string name, std::variant<std::string, NodeOutputRef> value)
        : name_(std::move(name)), value_(std::move(value)) {}

    std::string name_;
    std::variant<std::string, NodeOutputRef> value_;
};

struct Header {
    std::string name;
    std::string value;
    bool operator==(const Header&) const = default;
};

struct BodyParam {
    std::string name;
    std::string value;
    bool operator==(const BodyParam&) const = default;
};

struct AgentRequest {
    std::string method;    // FUNCTION or an HTTP verb
    std::string endpoint;  // function name or URL path
    std::vector<Header> headers;
    std::vector<BodyParam> body;

    bool operator==(const AgentRequest&) const = default;
};

struct OutputVariable {
    std::string name;
    std::string content;
    bool operator==(const OutputVariable&) const = default;
};

// A value extracted for a downstream node rather than for the producing step.
struct DependentInputVariable {
    std::string name;
    NodeId target_node;
    std::string declared_type;
    std::string content;
    bool operator==(const DependentInputVariable&) const = default;
};

struct AgentResponse {
    StatusCode status = StatusCode::Ok;
    std::vector<OutputVariable> outputs;
    std::vector<DependentInputVariable> dependent_inputs;

    bool operator==(const AgentResponse&) const = default;
};

struct CompletedTool {
    std::string tool;
    std::string summary;
    bool operator==(const CompletedTool&) const = default;
};

struct StatusUpdate {
    std::string previous_progress;
    std::string current_progress;
    NodeId current_node;
    std::vector<CompletedTool> completed_tools;
    std::string encountered_issues;

    bool operator==(const StatusUpdate&) const = default;
};

enum class ResolutionKind { Retry, Reroute, Abandon };

struct SuggestedResolution {
    ResolutionKind action = ResolutionKind::Abandon;
    std::string rationale;
    bool operator==(const SuggestedResolution&) const = default;
};

struct AssistanceRequest {
    StatusCode error = StatusCode::ToolCallFailure;
    NodeId error_node;
    std::string error_tool;
    std::string description;
    std::string relevant_context;
    SuggestedResolution suggested_resolution;
    StatusUpdate status_update;

    bool operator==(const AssistanceRequest&) const = default;
};

using Message = std::variant<AgentRequest, AgentResponse, AssistanceRequest>;

enum class MessageKind { AgentRequest, AgentResponse, AssistanceRequest };

MessageKind kind_of(const Message& msg) noexcept;
std::string_view kind_name(MessageKind kind) noexcept;

std::string_view resolution_name(ResolutionKind kind) noexcept;
std::optional<ResolutionKind> resolution_from_name(std::string_view name) noexcept;

// A message that parsed but breaks a type invariant. field_path uses the
// wire field names, e.g. "outputs" or "body[2].name".
class SchemaViolation : public Error {
public:
    SchemaViolation(std::string field_path, const std::string& what)
        : Error(field_path + ": " + what), field_path_(std::move(field_path)) {}

    const std::string& field_path() const noexcept { return field_path_; }

private:
    std::string field_path_;
};

// Throws SchemaViolation on the first broken invariant.
void validate(const AgentRequest& msg);
void validate(const AgentResponse& msg);
void validate(const AssistanceRequest& msg);
void validate(const Message& msg);

}  // namespace acp
