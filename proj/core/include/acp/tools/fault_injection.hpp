#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acp/tools/registry.hpp"

namespace acp {

enum class FaultBehavior {
    Throw,           // adapter raises             -> 604
    Timeout,         // adapter outlives timeout   -> 604
    EmptyPayload,    // "" returned                -> 605
    DropField,       // JSON member removed        -> 605 or 606
    GarbagePayload,  // random non-JSON text       -> 607 with a relevance validator
};

std::string_view behavior_name(FaultBehavior b) noexcept;
std::optional<FaultBehavior> behavior_from_name(std::string_view name) noexcept;

struct FaultEntry {
    std::string target;  // node id or tool name
    int attempt = 1;     // 1-based dispatch count of the node
    FaultBehavior behavior = FaultBehavior::Throw;
    std::string field;   // DropField only

    bool operator==(const FaultEntry&) const = default;
};

struct FaultPlan {
    std::vector<FaultEntry> entries;
    std::uint64_t seed = 0;

    bool empty() const noexcept { return entries.empty(); }
    // First entry whose target is the node or the tool, at this attempt.
    const FaultEntry* match(std::string_view node, std::string_view tool, int attempt) const noexcept;

    bool operator==(const FaultPlan&) const = default;
};

class InvalidFaultPlan : public Error {
public:
    using Error::Error;
};

// {"seed": 7, "entries": [{"target": "b", "attempt": 1, "behavior": "Throw"},
//                         {"target": "s1.1", "attempt": 1, "behavior": "DropField", "field": "latitude"}]}
FaultPlan parse_fault_plan(std::string_view json_text);
FaultPlan load_fault_plan(const std::filesystem::path& path);
std::string to_json(const FaultPlan& plan);

// Wraps adapter so each call first consults plan for (node, tool, attempt).
ToolAdapterPtr inject(FaultPlan plan, ToolAdapterPtr adapter);

// Applies inject to every adapter in the registry.
ToolRegistry inject_all(const FaultPlan& plan, const ToolRegistry& registry);

}  // namespace acp
