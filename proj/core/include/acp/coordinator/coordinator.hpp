#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "acp/blueprint/blueprint.hpp"
#include "acp/error.hpp"

namespace acp {

class TemplateSlotUnknownNode : public Error {
public:
    TemplateSlotUnknownNode(std::string slot, std::string node);
    const std::string& slot() const noexcept { return slot_; }
    const std::string& node() const noexcept { return node_; }

private:
    std::string slot_;
    std::string node_;
};

struct TemplateSlot {
    size_t begin = 0;  // offset of "{{"
    size_t end = 0;    // one past "}}"
    NodeId node;
    std::string output;
};

// Finds "{{node_id.output}}" slots. The name is split at its last '.', so
// node ids may contain dots. Text without a '.' inside braces is not a slot.
std::vector<TemplateSlot> find_slots(std::string_view tmpl);

// "[unavailable: <node>, <reason>]"; reason is the last error code for a
// Failed node, otherwise "skipped", "pending" or "missing".
std::string gap_marker(const ExecutionBlueprint& bp, const NodeId& node);

// Substitutes stored outputs into the template. Read-only; partial runs get
// gap markers instead of errors. Throws only for slots naming a node the
// blueprint does not have.
std::string aggregate(const ExecutionBlueprint& bp, std::string_view tmpl);

// Content of one "node.output" slot, verbatim, or its gap marker.
std::string answer_extract(const ExecutionBlueprint& bp, std::string_view slot);

}  // namespace acp
