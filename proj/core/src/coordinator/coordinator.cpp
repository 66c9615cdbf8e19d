#include "acp/coordinator/coordinator.hpp"

namespace acp {

TemplateSlotUnknownNode::TemplateSlotUnknownNode(std::string slot, std::string node)
    : Error("template slot '{{" + slot + "}}' names unknown node '" + node + "'"),
      slot_(std::move(slot)),
      node_(std::move(node)) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool split_slot(std::string_view name, NodeId& node, std::string& output) {
    auto dot = name.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == name.size()) return false;
    node.assign(name.substr(0, dot));
    output.assign(name.substr(dot + 1));
    return true;
}

std::string lookup(const ExecutionBlueprint& bp, const NodeId& node, const std::string& output) {
    const auto& n = bp.node(node);
    if (n.status == NodeStatus::Succeeded) {
        if (const std::string* v = bp.output(node, output)) return *v;
        return "[unavailable: " + node + ", missing]";
    }
    return gap_marker(bp, node);
}

}  // namespace

std::vector<TemplateSlot> find_slots(std::string_view tmpl) {
    std::vector<TemplateSlot> out;
    size_t pos = 0;
    while ((pos = tmpl.find("{{", pos)) != std::string_view::npos) {
        size_t close = tmpl.find("}}", pos + 2);
        if (close == std::string_view::npos) break;
        std::string_view inner = trim(tmpl.substr(pos + 2, close - pos - 2));
        TemplateSlot slot;
        if (inner.find('{') == std::string_view::npos && split_slot(inner, slot.node, slot.output)) {
            slot.begin = pos;
            slot.end = close + 2;
            out.push_back(std::move(slot));
            pos = close + 2;
        } else {
            pos += 2;
        }
    }
    return out;
}

std::string gap_marker(const ExecutionBlueprint& bp, const NodeId& node) {
    if (!bp.contains(node)) return "[unavailable: " + node + ", unknown]";
    const auto& n = bp.node(node);
    std::string reason;
    switch (n.status) {
        case NodeStatus::Failed:
            reason = n.last_error ? std::to_string(to_int(*n.last_error)) : "failed";
            break;
        case NodeStatus::Skipped: reason = "skipped"; break;
        case NodeStatus::Succeeded: reason = "missing"; break;
        default: reason = "pending"; break;
    }
    return "[unavailable: " + node + ", " + reason + "]";
}

std::string aggregate(const ExecutionBlueprint& bp, std::string_view tmpl) {
    std::string out;
    size_t cursor = 0;
    for (const auto& slot : find_slots(tmpl)) {
        if (!bp.contains(slot.node))
            throw TemplateSlotUnknownNode(std::string(trim(tmpl.substr(slot.begin + 2, slot.end - slot.begin - 4))),
                                          slot.node);
        out.append(tmpl.substr(cursor, slot.begin - cursor));
        out += lookup(bp, slot.node, slot.output);
        cursor = slot.end;
    }
    out.append(tmpl.substr(cursor));
    return out;
}

std::string answer_extract(const ExecutionBlueprint& bp, std::string_view slot) {
    std::string_view name = trim(slot);
    if (name.size() >= 4 && name.substr(0, 2) == "{{" && name.substr(name.size() - 2) == "}}")
        name = trim(name.substr(2, name.size() - 4));
    NodeId node;
    std::string output;
    if (!split_slot(name, node, output)) return "[unavailable: " + std::string(name) + ", unknown]";
    if (!bp.contains(node)) return gap_marker(bp, node);
    return lookup(bp, node, output);
}

}  // namespace acp
