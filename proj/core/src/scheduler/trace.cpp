#include "acp/scheduler/trace.hpp"

#include <algorithm>
#include <map>

#include "json_io.hpp"

namespace acp {

std::string_view kind_name(TraceEventKind kind) noexcept {
    switch (kind) {
        case TraceEventKind::Dispatched: return "Dispatched";
        case TraceEventKind::ToolCalled: return "ToolCalled";
        case TraceEventKind::Succeeded: return "Succeeded";
        case TraceEventKind::ErrorRaised: return "ErrorRaised";
        case TraceEventKind::AssistancePosted: return "AssistancePosted";
        case TraceEventKind::ResolutionApplied: return "ResolutionApplied";
        case TraceEventKind::Skipped: return "Skipped";
    }
    return "Unknown";
}

std::optional<TraceEventKind> trace_kind_from_name(std::string_view name) noexcept {
    for (auto k : {TraceEventKind::Dispatched, TraceEventKind::ToolCalled, TraceEventKind::Succeeded,
                   TraceEventKind::ErrorRaised, TraceEventKind::AssistancePosted,
                   TraceEventKind::ResolutionApplied, TraceEventKind::Skipped}) {
        if (kind_name(k) == name) return k;
    }
    return std::nullopt;
}

std::vector<TraceEvent> ExecutionTrace::for_node(const NodeId& id) const {
    std::vector<TraceEvent> out;
    std::copy_if(events.begin(), events.end(), std::back_inserter(out),
                 [&](const TraceEvent& e) { return e.node == id; });
    return out;
}

std::string emit_trace_json(const ExecutionTrace& trace) {
    using detail::ojson;
    ojson events = ojson::array();
    for (const auto& e : trace.events) {
        ojson j{{"seq", e.seq}, {"tick", e.tick}, {"node", e.node}, {"kind", kind_name(e.kind)}};
        if (e.code) j["code"] = to_int(*e.code);
        if (e.action) j["action"] = resolution_name(*e.action);
        j["detail"] = e.detail;
        events.push_back(std::move(j));
    }
    ojson doc{{"mode", trace.mode}, {"workers", trace.workers}, {"seed", trace.seed}, {"events", std::move(events)}};
    return doc.dump(2) + "\n";
}

ExecutionTrace parse_trace_json(std::string_view text, std::string_view source) {
    using detail::JsonFields;
    std::string src(source);
    auto doc = detail::parse_json(text, src);
    JsonFields f(doc, src, "");
    ExecutionTrace trace;
    trace.mode = f.string("mode");
    const auto& workers = f.get("workers");
    const auto& seed = f.get("seed");
    if (!workers.is_number_integer()) f.fail("workers", "expected an integer");
    if (!seed.is_number_integer()) f.fail("seed", "expected an integer");
    trace.workers = workers.get<int>();
    trace.seed = seed.get<std::uint64_t>();
    const auto& events = f.array("events");
    for (size_t i = 0; i < events.size(); ++i) {
        JsonFields e(events[i], src, "events[" + std::to_string(i) + "]");
        TraceEvent ev;
        const auto& seq = e.get("seq");
        const auto& tick = e.get("tick");
        if (!seq.is_number_integer()) e.fail("seq", "expected an integer");
        if (!tick.is_number_integer()) e.fail("tick", "expected an integer");
        ev.seq = seq.get<std::uint64_t>();
        ev.tick = tick.get<std::uint64_t>();
        ev.node = e.string("node");
        auto kind = trace_kind_from_name(e.string("kind"));
        if (!kind) e.fail("kind", "unknown event kind");
        ev.kind = *kind;
        if (e.has("code")) {
            const auto& c = e.get("code");
            if (!c.is_number_integer() || !status_from_int(c.get<int>())) e.fail("code", "unknown status code");
            ev.code = status_from_int(c.get<int>());
        }
        if (e.has("action")) {
            auto a = resolution_from_name(e.string("action"));
            if (!a) e.fail("action", "unknown resolution");
            ev.action = a;
        }
        ev.detail = e.string("detail");
        e.reject_unknown();
        trace.events.push_back(std::move(ev));
    }
    f.reject_unknown();
    return trace;
}

std::string emit_timeline(const ExecutionTrace& trace) {
    std::uint64_t last_tick = 0;
    std::map<NodeId, std::string> rows;
    for (const auto& e : trace.events) {
        last_tick = std::max(last_tick, e.tick);
        rows[e.node];
    }
    const size_t width = static_cast<size_t>(last_tick) + 1;
    for (auto& [_, row] : rows) row.assign(width, '.');

    std::map<NodeId, std::uint64_t> running_since;
    auto close = [&](const NodeId& node, std::uint64_t tick, char mark) {
        auto& row = rows[node];
        auto it = running_since.find(node);
        if (it != running_since.end()) {
            for (auto t = it->second; t < tick; ++t) {
                if (row[t] == '.') row[t] = '=';
            }
            running_since.erase(it);
        }
        row[tick] = mark;
    };
    for (const auto& e : trace.events) {
        switch (e.kind) {
            case TraceEventKind::Dispatched: running_since[e.node] = e.tick; break;
            case TraceEventKind::Succeeded: close(e.node, e.tick, 'S'); break;
            case TraceEventKind::ErrorRaised: close(e.node, e.tick, 'E'); break;
            case TraceEventKind::Skipped: close(e.node, e.tick, 's'); break;
            default: break;
        }
    }

    size_t label = 4;
    for (const auto& [id, _] : rows) label = std::max(label, id.size());
    label += 2;

    std::string out = "tick" + std::string(label - 4, ' ');
    for (size_t t = 0; t < width; ++t) out += static_cast<char>('0' + t % 10);
    out += "\n";
    for (const auto& [id, row] : rows) out += id + std::string(label - id.size(), ' ') + row + "\n";
    out += "legend: = running  S succeeded  E error  s skipped  . idle\n";
    return out;
}

std::string emit_trace(const ExecutionTrace& trace) { return emit_timeline(trace) + "\n" + emit_trace_json(trace); }

}  // namespace acp
