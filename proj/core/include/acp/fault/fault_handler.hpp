#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acp/blueprint/blueprint.hpp"
#include "acp/protocol/messages.hpp"
#include "acp/tools/schema.hpp"

namespace acp {

inline constexpr int kMaxResolutionsPerNode = 3;

// How to fill a missing parameter of `tool` by inserting a predecessor.
struct InsertionRecipe {
    std::string tool;
    std::string missing_param;
    BlueprintNode node_template;  // id may be empty; one is derived
    // Parameter of the failing node -> output of the inserted node.
    // Empty means {missing_param -> missing_param}.
    std::map<std::string, std::string> provides;
};

struct ReroutePolicy {
    std::map<std::string, std::vector<std::string>> alternatives;
    std::vector<InsertionRecipe> insertion_recipes;
};

// {"alternatives": {"tool": ["substitute", ...]},
//  "insertion_recipes": [{"tool": "...", "missing_param": "...",
//                         "node_template": {<blueprint node>},
//                         "provides": {"param": "output"}}]}
ReroutePolicy parse_reroute_policy(std::string_view json_text, std::string_view source = "<input>");
ReroutePolicy load_reroute_policy(const std::filesystem::path& path);

// Optional override consulted before the built-in ladder, e.g. an
// LLM-backed policy. Returning nullopt falls through to the ladder.
using ResolutionHook =
    std::function<std::optional<ResolutionAction>(const AssistanceRequest&, const ExecutionBlueprint&)>;

// Deterministic decision ladder, a pure function of its inputs:
//   0. the node already had kMaxResolutionsPerNode resolutions -> Abandon
//   1. retries remain and code is 604, 605 or 607               -> Retry
//   2. code 601 and a recipe covers an unbound parameter        -> Reroute inserting a predecessor
//   3. a registered alternative tool exists                     -> Reroute substituting it
//   4. otherwise                                                -> Abandon
// catalog lists the registered tool schemas.
ResolutionAction handle_assistance(const AssistanceRequest& req, const ExecutionBlueprint& snapshot,
                                   const ReroutePolicy& policy, const std::vector<ToolSchema>& catalog);

class FaultHandler {
public:
    FaultHandler(ReroutePolicy policy, std::vector<ToolSchema> catalog, ResolutionHook hook = {})
        : policy_(std::move(policy)), catalog_(std::move(catalog)), hook_(std::move(hook)) {}

    ResolutionAction decide(const AssistanceRequest& req, const ExecutionBlueprint& snapshot) const;

    // Decides and applies. Returns the action actually applied: a reroute
    // that would close a cycle, or a retry with no budget left, is downgraded
    // to Abandon.
    ResolutionAction resolve(const AssistanceRequest& req, ExecutionBlueprint& bp) const;

    const ReroutePolicy& policy() const noexcept { return policy_; }

private:
    ReroutePolicy policy_;
    std::vector<ToolSchema> catalog_;
    ResolutionHook hook_;
};

}  // namespace acp
