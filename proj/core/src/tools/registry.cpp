#include "acp/tools/registry.hpp"

#include <mutex>

namespace acp {

namespace {

class SingleFlightAdapter final : public ToolAdapter {
public:
    explicit SingleFlightAdapter(ToolAdapterPtr inner) : inner_(std::move(inner)) {}

    const ToolSchema& schema() const override { return inner_->schema(); }

    std::string call(const AgentRequest& request, const CallContext& ctx) override {
        std::lock_guard<std::mutex> lock(mu_);
        return inner_->call(request, ctx);
    }

private:
    ToolAdapterPtr inner_;
    std::mutex mu_;
};

}  // namespace

void ToolRegistry::register_tool(ToolAdapterPtr adapter) {
    if (!adapter) throw Error("cannot register a null adapter");
    validate(adapter->schema());
    std::string name = adapter->schema().name;
    if (adapters_.count(name)) throw DuplicateTool("tool '" + name + "' is already registered");
    if (adapter->schema().single_flight) adapter = std::make_shared<SingleFlightAdapter>(std::move(adapter));
    adapters_.emplace(std::move(name), std::move(adapter));
}

bool ToolRegistry::contains(std::string_view name) const noexcept {
    return adapters_.find(name) != adapters_.end();
}

ToolAdapterPtr ToolRegistry::find(std::string_view name) const noexcept {
    auto it = adapters_.find(name);
    return it == adapters_.end() ? nullptr : it->second;
}

ToolAdapterPtr ToolRegistry::at(std::string_view name) const {
    auto it = adapters_.find(name);
    if (it == adapters_.end()) throw UnregisteredTool(std::string(name));
    return it->second;
}

std::vector<std::string> ToolRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : adapters_) out.push_back(name);
    return out;
}

std::vector<ToolSchema> ToolRegistry::catalog() const {
    std::vector<ToolSchema> out;
    for (const auto& [_, adapter] : adapters_) out.push_back(adapter->schema());
    return out;
}

ToolRegistry ToolRegistry::wrapped(const std::function<ToolAdapterPtr(ToolAdapterPtr)>& wrap) const {
    ToolRegistry out;
    for (const auto& [name, adapter] : adapters_) out.adapters_.emplace(name, wrap(adapter));
    return out;
}

}  // namespace acp
