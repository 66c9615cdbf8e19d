#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "acp/tools/registry.hpp"

namespace acp {

class CalcError : public ToolError {
public:
    using ToolError::ToolError;
};

// Exact rational evaluation of + - * / and parentheses over decimal literals
// (unary minus allowed). Terminating results print as plain decimals with no
// trailing zeros ("2", "-0.125"); others print as a reduced fraction "p/q".
// Throws CalcError on syntax errors and division by zero.
std::string evaluate_expression(std::string_view expr);

// Tool "calculator", endpoint "calculate", required param "query"; the whole
// payload is the single output.
ToolAdapterPtr make_calculator_tool(std::string name = "calculator");

using Fixture = std::map<std::string, std::string>;

// JSON object of key -> value. Non-string values are stored as their
// compact JSON text.
Fixture parse_fixture(std::string_view json_text);
Fixture load_fixture(const std::filesystem::path& path);

// Key/value lookup tool. The lookup key is the values of the endpoint's
// required params, in declared order, joined with " | ". A missing key
// yields an empty payload.
ToolAdapterPtr make_kv_tool(ToolSchema schema, Fixture fixture);

// Sleeps for delay before delegating. Used for timeline and timeout tests.
ToolAdapterPtr with_delay(ToolAdapterPtr inner, std::chrono::milliseconds delay);

}  // namespace acp
