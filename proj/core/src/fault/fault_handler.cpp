#include "acp/fault/fault_handler.hpp"

#include <algorithm>

#include "json_io.hpp"

namespace acp {

ReroutePolicy parse_reroute_policy(std::string_view json_text, std::string_view source) {
    using detail::JsonFields;
    std::string src(source);
    auto doc = detail::parse_json(json_text, src);
    JsonFields f(doc, src, "");
    ReroutePolicy policy;
    if (f.has("alternatives")) {
        for (const auto& [tool, subs] : f.object("alternatives").items()) {
            std::string path = "alternatives." + tool;
            if (!subs.is_array()) throw ParseError(src, path, "expected an array of tool names");
            auto& list = policy.alternatives[tool];
            for (const auto& s : subs) {
                if (!s.is_string()) throw ParseError(src, path, "expected an array of tool names");
                list.push_back(s.get<std::string>());
            }
        }
    }
    if (f.has("insertion_recipes")) {
        const auto& recipes = f.array("insertion_recipes");
        for (size_t i = 0; i < recipes.size(); ++i) {
            std::string path = "insertion_recipes[" + std::to_string(i) + "]";
            JsonFields r(recipes[i], src, path);
            InsertionRecipe recipe;
            recipe.tool = r.string("tool");
            recipe.missing_param = r.string("missing_param");
            recipe.node_template = detail::node_from_json(r.object("node_template"), src, path + ".node_template");
            if (r.has("provides")) {
                for (const auto& [param, output] : r.object("provides").items()) {
                    if (!output.is_string()) r.fail("provides", "expected param -> output strings");
                    recipe.provides.emplace(param, output.get<std::string>());
                }
            }
            r.reject_unknown();
            policy.insertion_recipes.push_back(std::move(recipe));
        }
    }
    f.reject_unknown();
    return policy;
}

ReroutePolicy load_reroute_policy(const std::filesystem::path& path) {
    return parse_reroute_policy(read_text_file(path.string()), path.string());
}

namespace {

const ToolSchema* find_schema(const std::vector<ToolSchema>& catalog, std::string_view name) {
    for (const auto& s : catalog) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

bool binds(const BlueprintNode& node, std::string_view param) {
    return std::any_of(node.params.begin(), node.params.end(),
                       [&](const ParamBinding& b) { return b.name() == param; });
}

std::string join_and(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
        out += items[i];
    }
    return out;
}

NodeId unique_id(const ExecutionBlueprint& bp, NodeId base) {
    if (!bp.contains(base)) return base;
    for (int k = 2;; ++k) {
        NodeId candidate = base + "~" + std::to_string(k);
        if (!bp.contains(candidate)) return candidate;
    }
}

std::optional<ResolutionAction> try_insertion(const AssistanceRequest& req, const BlueprintNode& node,
                                              const ExecutionBlueprint& snapshot, const ReroutePolicy& policy,
                                              const std::vector<ToolSchema>& catalog) {
    for (const auto& recipe : policy.insertion_recipes) {
        if (recipe.tool != req.error_tool || binds(node, recipe.missing_param)) continue;
        if (!find_schema(catalog, recipe.node_template.tool)) continue;

        BlueprintNode inserted = recipe.node_template;
        inserted.id = unique_id(snapshot, inserted.id.empty() ? node.id + ".pre" : inserted.id);
        if (inserted.subtask.empty()) inserted.subtask = node.subtask;

        std::map<std::string, std::string> provides = recipe.provides;
        if (provides.empty()) provides.emplace(recipe.missing_param, recipe.missing_param);

        RerouteBinding rb{node.tool, node.method, node.endpoint, node.params, std::nullopt};
        std::vector<std::string> bound;
        for (const auto& [param, output] : provides) {
            if (binds(node, param)) continue;
            rb.params.push_back(ParamBinding::dependency(param, {inserted.id, output}));
            bound.push_back(param);
        }
        rb.inserted_predecessor = std::move(inserted);
        std::string rationale = "ladder 2 (insert predecessor): add a step to obtain " + join_and(bound) + " (" +
                                rb.inserted_predecessor->id + " via " + rb.inserted_predecessor->tool + ")";
        return ResolutionAction::reroute_to(std::move(rb), std::move(rationale));
    }
    return std::nullopt;
}

std::optional<ResolutionAction> try_substitute(const BlueprintNode& node, const ReroutePolicy& policy,
                                               const std::vector<ToolSchema>& catalog) {
    auto it = policy.alternatives.find(node.tool);
    if (it == policy.alternatives.end()) return std::nullopt;
    for (const auto& sub : it->second) {
        if (sub == node.tool) continue;
        if (std::find(node.replaced_tools.begin(), node.replaced_tools.end(), sub) != node.replaced_tools.end())
            continue;
        const ToolSchema* schema = find_schema(catalog, sub);
        if (!schema) continue;
        std::string endpoint;
        if (schema->find_endpoint(node.endpoint)) endpoint = node.endpoint;
        else if (schema->endpoints.size() == 1) endpoint = schema->endpoints.front().id;
        else continue;
        RerouteBinding rb{sub, node.method, endpoint, node.params, std::nullopt};
        return ResolutionAction::reroute_to(
            std::move(rb), "ladder 3 (substitute tool): switch " + node.tool + " to " + sub + "/" + endpoint);
    }
    return std::nullopt;
}

}  // namespace

ResolutionAction handle_assistance(const AssistanceRequest& req, const ExecutionBlueprint& snapshot,
                                   const ReroutePolicy& policy, const std::vector<ToolSchema>& catalog) {
    const auto& node = snapshot.node(req.error_node);
    const std::string code = std::to_string(to_int(req.error));

    if (node.resolutions >= kMaxResolutionsPerNode)
        return ResolutionAction::abandon("ladder 0 (resolution cap): " + node.id + " already had " +
                                         std::to_string(node.resolutions) + " resolutions");

    bool transient = req.error == StatusCode::ToolCallFailure || req.error == StatusCode::IncompleteInformation ||
                     req.error == StatusCode::WrongInformation;
    if (transient && node.retries_remaining > 0)
        return ResolutionAction::retry("ladder 1 (retry): " + code + " with " +
                                       std::to_string(node.retries_remaining) + " retries remaining");

    if (req.error == StatusCode::MissingRequiredParameters) {
        if (auto action = try_insertion(req, node, snapshot, policy, catalog)) return *action;
    }
    if (auto action = try_substitute(node, policy, catalog)) return *action;

    return ResolutionAction::abandon("ladder 4 (abandon): no retry, recipe or alternative applies to " + code);
}

ResolutionAction FaultHandler::decide(const AssistanceRequest& req, const ExecutionBlueprint& snapshot) const {
    if (hook_) {
        if (auto action = hook_(req, snapshot)) return *action;
    }
    return handle_assistance(req, snapshot, policy_, catalog_);
}

ResolutionAction FaultHandler::resolve(const AssistanceRequest& req, ExecutionBlueprint& bp) const {
    ResolutionAction action = decide(req, bp);
    try {
        bp.apply_resolution(req.error_node, action);
        return action;
    } catch (const BlueprintError& e) {
        if (action.kind == ResolutionKind::Abandon) throw;
        ResolutionAction fallback = ResolutionAction::abandon(
            "downgraded " + std::string(resolution_name(action.kind)) + " to Abandon: " + e.what());
        bp.apply_resolution(req.error_node, fallback);
        return fallback;
    }
}

}  // namespace acp
