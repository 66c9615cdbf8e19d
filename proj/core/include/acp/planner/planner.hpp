#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "acp/blueprint/blueprint.hpp"
#include "acp/error.hpp"
#include "acp/tools/schema.hpp"

namespace acp {

struct LiteralParam {
    std::string name;
    std::string value;

    bool operator==(const LiteralParam&) const = default;
};

struct StepTemplate {
    std::string tool;
    std::string method = "FUNCTION";
    std::string endpoint;
    std::vector<LiteralParam> params;
    std::vector<std::string> expected_outputs;

    bool operator==(const StepTemplate&) const = default;
};

struct SubtaskSpec {
    std::string id;
    std::string agent;
    std::vector<StepTemplate> steps;

    bool operator==(const SubtaskSpec&) const = default;
};

// producer and consumer name steps as "<subtask>.<k>", k counted from 1.
// param defaults to variable.
struct DependencySpec {
    std::string producer;
    std::string consumer;
    std::string variable;
    std::string param;

    bool operator==(const DependencySpec&) const = default;
};

struct TaskSpec {
    std::string goal;
    std::vector<SubtaskSpec> subtasks;
    std::vector<DependencySpec> dependencies;

    bool operator==(const TaskSpec&) const = default;
};

class InvalidTaskSpec : public Error {
public:
    explicit InvalidTaskSpec(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

class UnknownDependencyVariable : public Error {
public:
    UnknownDependencyVariable(std::string producer, std::string variable);
    const std::string& producer() const noexcept { return producer_; }
    const std::string& variable() const noexcept { return variable_; }

private:
    std::string producer_;
    std::string variable_;
};

// {"goal": "...",
//  "subtasks": [{"id": "weather", "agent": "optional",
//                "steps": [{"tool": "...", "method": "FUNCTION", "endpoint": "...",
//                           "params": {"name": "literal"}, "expected_outputs": ["..."]}]}],
//  "dependencies": [{"producer": "weather.1", "consumer": "venue.1",
//                    "variable": "forecast", "param": "optional"}]}
TaskSpec parse_task_spec(std::string_view json_text, std::string_view source = "<input>");
TaskSpec load_task_spec(const std::filesystem::path& path);
std::string emit_task_spec(const TaskSpec& spec);

// Structural problems, one line each; empty when the spec is well formed.
// Unknown dependency variables are reported here too.
std::vector<std::string> check_task_spec(const TaskSpec& spec);

// One node per step with id "<subtask>.<k>", an edge between consecutive
// steps of a subtask and one per declared dependency. Cycles surface as
// BlueprintError CycleDetected from build.
ExecutionBlueprint compile(const TaskSpec& spec);

// Reads a blueprint file; see serialization.hpp for the format.
ExecutionBlueprint load_blueprint(const std::filesystem::path& path);

class AdapterUnavailable : public Error {
public:
    using Error::Error;
};

class InvalidPlan : public Error {
public:
    explicit InvalidPlan(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

// Slot for an external decomposer. Returns raw TaskSpec JSON text.
class PlannerAdapter {
public:
    virtual ~PlannerAdapter() = default;
    virtual std::string propose(std::string_view goal, std::string_view catalog_json) = 0;
};

// Returns fixed text regardless of the goal. The default is the bundled
// travel-planning spec.
class StubPlannerAdapter : public PlannerAdapter {
public:
    StubPlannerAdapter();
    explicit StubPlannerAdapter(std::string text) : text_(std::move(text)) {}
    std::string propose(std::string_view goal, std::string_view catalog_json) override;

private:
    std::string text_;
};

// Runs `<command> <goal>` with the catalog JSON in ACP_PLAN_CATALOG and
// reads the spec from its stdout. A missing program or nonzero exit is
// AdapterUnavailable.
class CommandPlannerAdapter : public PlannerAdapter {
public:
    explicit CommandPlannerAdapter(std::string command) : command_(std::move(command)) {}
    std::string propose(std::string_view goal, std::string_view catalog_json) override;

private:
    std::string command_;
};

const std::string& travel_task_spec_json();

std::string catalog_json(const std::vector<ToolSchema>& catalog);

// Parses and validates adapter output. Every tool must be in the catalog
// and every endpoint must exist on its tool. Problems are never repaired.
TaskSpec plan_via_adapter(std::string_view goal, const std::vector<ToolSchema>& catalog, PlannerAdapter& adapter);

}  // namespace acp
