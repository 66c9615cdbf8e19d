#include "acp/protocol/status.hpp"

namespace acp {

std::optional<StatusCode> status_from_int(int value) noexcept {
    for (StatusCode code : kAllStatusCodes) {
        if (to_int(code) == value) return code;
    }
    return std::nullopt;
}

std::string_view status_name(StatusCode code) noexcept {
    switch (code) {
        case StatusCode::Ok: return "OK";
        case StatusCode::MissingRequiredParameters: return "MISSING_REQUIRED_PARAMETERS";
        case StatusCode::WrongStepDetails: return "WRONG_STEP_DETAILS";
        case StatusCode::InvalidParameterUsage: return "INVALID_PARAMETER_USAGE";
        case StatusCode::ToolCallFailure: return "TOOL_CALL_FAILURE";
        case StatusCode::IncompleteInformation: return "INCOMPLETE_INFORMATION";
        case StatusCode::DependencyIncompleteInformation: return "DEPENDENCY_INCOMPLETE_INFORMATION";
        case StatusCode::WrongInformation: return "WRONG_INFORMATION";
    }
    return "UNKNOWN";
}

std::optional<StatusCode> status_from_name(std::string_view name) noexcept {
    for (StatusCode code : kAllStatusCodes) {
        if (status_name(code) == name) return code;
    }
    return std::nullopt;
}

Stage classify_stage(StatusCode code) noexcept {
    switch (code) {
        case StatusCode::Ok:
            return Stage::Success;
        case StatusCode::MissingRequiredParameters:
        case StatusCode::WrongStepDetails:
        case StatusCode::InvalidParameterUsage:
            return Stage::RequestStage;
        case StatusCode::ToolCallFailure:
            return Stage::ToolCallStage;
        case StatusCode::IncompleteInformation:
        case StatusCode::DependencyIncompleteInformation:
        case StatusCode::WrongInformation:
            return Stage::OutputExtractionStage;
    }
    return Stage::Success;
}

std::string_view stage_name(Stage stage) noexcept {
    switch (stage) {
        case Stage::RequestStage: return "RequestStage";
        case Stage::ToolCallStage: return "ToolCallStage";
        case Stage::OutputExtractionStage: return "OutputExtractionStage";
        case Stage::Success: return "Success";
    }
    return "Unknown";
}

}  // namespace acp
