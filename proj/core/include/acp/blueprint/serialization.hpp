#pragma once

#include <string>
#include <string_view>

#include "acp/blueprint/blueprint.hpp"
#include "acp/error.hpp"

namespace acp {

// A document that is not valid JSON or does not follow the expected layout.
// where() is "line:column" for syntax errors, a field path otherwise.
class ParseError : public Error {
public:
    ParseError(std::string source, std::string where, const std::string& what)
        : Error(source + ":" + where + ": " + what), source_(std::move(source)), where_(std::move(where)) {}

    const std::string& source() const noexcept { return source_; }
    const std::string& where() const noexcept { return where_; }

private:
    std::string source_;
    std::string where_;
};

// Blueprint file:
// {
//   "goal": "...",
//   "nodes": [{"id": "s1.1", "subtask": "s1", "tool": "kv", "method": "FUNCTION",
//              "endpoint": "lookup", "agent": "optional",
//              "params": [{"name": "query", "origin": "literal", "value": "..."},
//                         {"name": "spots", "origin": "dependency",
//                          "source": {"node": "s1.1", "output": "spots"}}],
//              "expected_outputs": ["..."]}],
//   "edges": [["s1.1", "s1.2"]]
// }
// Node runtime state is not part of this format.
std::string emit_blueprint(const ExecutionBlueprint& bp);

// Parses and validates through ExecutionBlueprint::build. Build errors are
// rethrown as BlueprintError with the source name prefixed.
ExecutionBlueprint parse_blueprint(std::string_view text, std::string_view source = "<input>");

// Run state: the blueprint plus per-node runtime state and the output store.
std::string emit_run_state(const ExecutionBlueprint& bp);
ExecutionBlueprint parse_run_state(std::string_view text, std::string_view source = "<input>");

std::string read_text_file(const std::string& path);

}  // namespace acp
