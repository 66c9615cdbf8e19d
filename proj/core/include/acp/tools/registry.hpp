#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "acp/error.hpp"
#include "acp/protocol/messages.hpp"
#include "acp/tools/schema.hpp"

namespace acp {

// Per-invocation facts an adapter may consult. attempt is 1-based and counts
// dispatches of the calling node.
struct CallContext {
    NodeId node;
    int attempt = 1;
    std::chrono::milliseconds timeout{5000};
};

// Any failure inside an adapter. The executor turns it into a 604.
class ToolError : public Error {
public:
    using Error::Error;
};

class ToolAdapter {
public:
    virtual ~ToolAdapter() = default;
    virtual const ToolSchema& schema() const = 0;
    // Returns the raw payload. May throw; any exception counts as a failed call.
    virtual std::string call(const AgentRequest& request, const CallContext& ctx) = 0;
};

using ToolAdapterPtr = std::shared_ptr<ToolAdapter>;

class DuplicateTool : public Error {
public:
    using Error::Error;
};

class UnregisteredTool : public Error {
public:
    explicit UnregisteredTool(std::string tool)
        : Error("tool '" + tool + "' is not registered"), tool_(std::move(tool)) {}
    const std::string& tool() const noexcept { return tool_; }

private:
    std::string tool_;
};

// Name -> adapter map. Registration happens before a run; lookups during a
// run are read-only and safe from any thread.
class ToolRegistry {
public:
    // Single-flight adapters are wrapped so their calls are serialized.
    void register_tool(ToolAdapterPtr adapter);

    bool contains(std::string_view name) const noexcept;
    ToolAdapterPtr find(std::string_view name) const noexcept;
    ToolAdapterPtr at(std::string_view name) const;  // throws UnregisteredTool

    std::vector<std::string> names() const;
    std::vector<ToolSchema> catalog() const;

    // Replaces every adapter with wrap(adapter); used to layer fault
    // injection or delays over a configured registry.
    ToolRegistry wrapped(const std::function<ToolAdapterPtr(ToolAdapterPtr)>& wrap) const;

private:
    std::map<std::string, ToolAdapterPtr, std::less<>> adapters_;
};

}  // namespace acp
