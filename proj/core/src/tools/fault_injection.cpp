#include "acp/tools/fault_injection.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace acp {

std::string_view behavior_name(FaultBehavior b) noexcept {
    switch (b) {
        case FaultBehavior::Throw: return "Throw";
        case FaultBehavior::Timeout: return "Timeout";
        case FaultBehavior::EmptyPayload: return "EmptyPayload";
        case FaultBehavior::DropField: return "DropField";
        case FaultBehavior::GarbagePayload: return "GarbagePayload";
    }
    return "Unknown";
}

std::optional<FaultBehavior> behavior_from_name(std::string_view name) noexcept {
    for (auto b : {FaultBehavior::Throw, FaultBehavior::Timeout, FaultBehavior::EmptyPayload,
                   FaultBehavior::DropField, FaultBehavior::GarbagePayload}) {
        if (behavior_name(b) == name) return b;
    }
    return std::nullopt;
}

const FaultEntry* FaultPlan::match(std::string_view node, std::string_view tool, int attempt) const noexcept {
    for (const auto& e : entries) {
        if (e.attempt == attempt && (e.target == node || e.target == tool)) return &e;
    }
    return nullptr;
}

FaultPlan parse_fault_plan(std::string_view json_text) {
    auto doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw InvalidFaultPlan("fault plan must be a JSON object");
    FaultPlan plan;
    for (const auto& [key, value] : doc.items()) {
        if (key == "seed") {
            if (!value.is_number_unsigned() && !value.is_number_integer())
                throw InvalidFaultPlan("seed: expected an integer");
            plan.seed = value.get<std::uint64_t>();
        } else if (key != "entries") {
            throw InvalidFaultPlan(key + ": unknown field");
        }
    }
    if (!doc.contains("entries") || !doc["entries"].is_array())
        throw InvalidFaultPlan("entries: expected an array");
    size_t i = 0;
    for (const auto& e : doc["entries"]) {
        std::string where = "entries[" + std::to_string(i++) + "]";
        if (!e.is_object()) throw InvalidFaultPlan(where + ": expected an object");
        FaultEntry entry;
        for (const auto& [key, value] : e.items()) {
            if (key == "target" && value.is_string()) {
                entry.target = value.get<std::string>();
            } else if (key == "attempt" && value.is_number_integer()) {
                entry.attempt = value.get<int>();
            } else if (key == "behavior" && value.is_string()) {
                auto b = behavior_from_name(value.get<std::string>());
                if (!b) throw InvalidFaultPlan(where + ".behavior: unknown behavior '" + value.get<std::string>() + "'");
                entry.behavior = *b;
            } else if (key == "field" && value.is_string()) {
                entry.field = value.get<std::string>();
            } else {
                throw InvalidFaultPlan(where + "." + key + ": unknown or mistyped field");
            }
        }
        if (entry.target.empty()) throw InvalidFaultPlan(where + ".target: required");
        if (entry.attempt < 1) throw InvalidFaultPlan(where + ".attempt: must be >= 1");
        if (entry.behavior == FaultBehavior::DropField && entry.field.empty())
            throw InvalidFaultPlan(where + ".field: required for DropField");
        plan.entries.push_back(std::move(entry));
    }
    return plan;
}

FaultPlan load_fault_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidFaultPlan("cannot open fault plan " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_fault_plan(buf.str());
    } catch (const InvalidFaultPlan& e) {
        throw InvalidFaultPlan(path.string() + ": " + e.what());
    }
}

std::string to_json(const FaultPlan& plan) {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : plan.entries) {
        nlohmann::ordered_json j{{"target", e.target}, {"attempt", e.attempt}, {"behavior", behavior_name(e.behavior)}};
        if (e.behavior == FaultBehavior::DropField) j["field"] = e.field;
        entries.push_back(std::move(j));
    }
    return nlohmann::ordered_json{{"seed", plan.seed}, {"entries", std::move(entries)}}.dump(2);
}

namespace {

// FNV-1a, so garbage payloads are stable across platforms.
std::uint64_t mix(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string garbage(std::uint64_t seed, std::string_view node, int attempt) {
    std::uint64_t h = mix(mix(14695981039346656037ULL ^ seed, node), std::to_string(attempt));
    std::mt19937_64 rng(h);
    static constexpr std::string_view kAlphabet = "#%&@!?~^;:<>|$";
    std::uniform_int_distribution<size_t> len(16, 48);
    std::uniform_int_distribution<size_t> pick(0, kAlphabet.size() - 1);
    std::string out(len(rng), ' ');
    for (auto& c : out) c = kAlphabet[pick(rng)];
    return out;
}

class FaultInjectingTool final : public ToolAdapter {
public:
    FaultInjectingTool(FaultPlan plan, ToolAdapterPtr inner) : plan_(std::move(plan)), inner_(std::move(inner)) {}

    const ToolSchema& schema() const override { return inner_->schema(); }

    std::string call(const AgentRequest& request, const CallContext& ctx) override {
        const FaultEntry* fault = plan_.match(ctx.node, inner_->schema().name, ctx.attempt);
        if (!fault) return inner_->call(request, ctx);
        switch (fault->behavior) {
            case FaultBehavior::Throw:
                throw ToolError("injected failure in " + inner_->schema().name);
            case FaultBehavior::Timeout:
                std::this_thread::sleep_for(ctx.timeout + ctx.timeout / 2 + std::chrono::milliseconds(20));
                throw ToolError("injected stall in " + inner_->schema().name);
            case FaultBehavior::EmptyPayload:
                return {};
            case FaultBehavior::GarbagePayload:
                return garbage(plan_.seed, ctx.node, ctx.attempt);
            case FaultBehavior::DropField: {
                std::string payload = inner_->call(request, ctx);
                auto doc = nlohmann::ordered_json::parse(payload, nullptr, false);
                if (doc.is_discarded() || !doc.is_object()) return payload;
                doc.erase(fault->field);
                return doc.dump();
            }
        }
        return inner_->call(request, ctx);
    }

private:
    FaultPlan plan_;
    ToolAdapterPtr inner_;
};

}  // namespace

ToolAdapterPtr inject(FaultPlan plan, ToolAdapterPtr adapter) {
    return std::make_shared<FaultInjectingTool>(std::move(plan), std::move(adapter));
}

ToolRegistry inject_all(const FaultPlan& plan, const ToolRegistry& registry) {
    return registry.wrapped([&](ToolAdapterPtr a) { return inject(plan, std::move(a)); });
}

}  // namespace acp
