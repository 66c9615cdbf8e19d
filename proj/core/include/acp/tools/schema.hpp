#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "acp/error.hpp"

namespace acp {

struct ParamSpec {
    std::string name;
    // A value that is a JSON array with more than one element counts as
    // several values; single-valued params reject it.
    bool multi_valued = false;
    // ECMAScript regex the whole value must match; empty accepts anything.
    std::string pattern;
};

// How a raw tool payload maps onto a node's expected outputs.
enum class OutputMode {
    WholePayload,  // the node's single expected output is the entire payload
    JsonFields,    // the payload is a JSON object, one member per output
};

struct EndpointSchema {
    std::string id;
    std::vector<ParamSpec> required;
    std::vector<ParamSpec> optional;
    std::vector<std::string> outputs;  // declared output field names
    OutputMode output_mode = OutputMode::JsonFields;

    const ParamSpec* find_param(std::string_view name) const noexcept;
    bool is_required(std::string_view name) const noexcept;
};

struct ToolSchema {
    std::string name;
    std::string description;
    std::vector<EndpointSchema> endpoints;
    // Calls to a single-flight tool are serialized by the registry.
    bool single_flight = false;

    const EndpointSchema* find_endpoint(std::string_view id) const noexcept;
};

class InvalidToolSchema : public Error {
public:
    using Error::Error;
};

// Endpoint ids unique per tool; required and optional params disjoint.
void validate(const ToolSchema& schema);

}  // namespace acp
