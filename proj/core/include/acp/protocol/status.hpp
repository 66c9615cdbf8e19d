#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace acp {

// Status codes exchanged between agents and tools. 200 is the only success
// code; the 6xx codes are grouped by the pipeline stage that raises them.
enum class StatusCode : int {
    Ok = 200,
    MissingRequiredParameters = 601,
    WrongStepDetails = 602,
    InvalidParameterUsage = 603,
    ToolCallFailure = 604,
    IncompleteInformation = 605,
    DependencyIncompleteInformation = 606,
    WrongInformation = 607,
};

enum class Stage {
    RequestStage,
    ToolCallStage,
    OutputExtractionStage,
    Success,
};

inline constexpr std::array<StatusCode, 8> kAllStatusCodes = {
    StatusCode::Ok,
    StatusCode::MissingRequiredParameters,
    StatusCode::WrongStepDetails,
    StatusCode::InvalidParameterUsage,
    StatusCode::ToolCallFailure,
    StatusCode::IncompleteInformation,
    StatusCode::DependencyIncompleteInformation,
    StatusCode::WrongInformation,
};

constexpr int to_int(StatusCode code) noexcept { return static_cast<int>(code); }

// Returns nullopt for integers outside the code table.
std::optional<StatusCode> status_from_int(int value) noexcept;

// "OK", "MISSING_REQUIRED_PARAMETERS", ...
std::string_view status_name(StatusCode code) noexcept;
std::optional<StatusCode> status_from_name(std::string_view name) noexcept;

Stage classify_stage(StatusCode code) noexcept;
std::string_view stage_name(Stage stage) noexcept;

}  // namespace acp
