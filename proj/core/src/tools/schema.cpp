#include "acp/tools/schema.hpp"

#include <set>

namespace acp {

const ParamSpec* EndpointSchema::find_param(std::string_view name) const noexcept {
    for (const auto& p : required) {
        if (p.name == name) return &p;
    }
    for (const auto& p : optional) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

bool EndpointSchema::is_required(std::string_view name) const noexcept {
    for (const auto& p : required) {
        if (p.name == name) return true;
    }
    return false;
}

const EndpointSchema* ToolSchema::find_endpoint(std::string_view id) const noexcept {
    for (const auto& e : endpoints) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

void validate(const ToolSchema& schema) {
    if (schema.name.empty()) throw InvalidToolSchema("tool name must be non-empty");
    std::set<std::string> ids;
    for (const auto& ep : schema.endpoints) {
        if (ep.id.empty()) throw InvalidToolSchema(schema.name + ": endpoint id must be non-empty");
        if (!ids.insert(ep.id).second)
            throw InvalidToolSchema(schema.name + ": duplicate endpoint '" + ep.id + "'");
        std::set<std::string> required;
        for (const auto& p : ep.required) required.insert(p.name);
        for (const auto& p : ep.optional) {
            if (required.count(p.name))
                throw InvalidToolSchema(schema.name + "/" + ep.id + ": param '" + p.name +
                                        "' is both required and optional");
        }
    }
}

}  // namespace acp
