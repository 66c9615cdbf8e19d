#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acp/protocol/messages.hpp"

namespace acp {

enum class TraceEventKind {
    Dispatched,
    ToolCalled,
    Succeeded,
    ErrorRaised,
    AssistancePosted,
    ResolutionApplied,
    Skipped,
};

std::string_view kind_name(TraceEventKind kind) noexcept;
std::optional<TraceEventKind> trace_kind_from_name(std::string_view name) noexcept;

// tick is logical time: it advances once per processed node completion, so
// it is reproducible; elapsed is wall time since run start and is not
// exported.
struct TraceEvent {
    std::uint64_t seq = 0;
    std::uint64_t tick = 0;
    std::chrono::microseconds elapsed{0};
    NodeId node;
    TraceEventKind kind = TraceEventKind::Dispatched;
    std::optional<StatusCode> code;        // ErrorRaised
    std::optional<ResolutionKind> action;  // AssistancePosted (suggested), ResolutionApplied
    std::string detail;
};

struct ExecutionTrace {
    std::string mode;
    int workers = 1;
    std::uint64_t seed = 0;
    std::vector<TraceEvent> events;

    std::vector<TraceEvent> for_node(const NodeId& id) const;
};

// Machine-readable event list. Wall-clock times are omitted so identical
// single-worker runs export byte-identical text.
std::string emit_trace_json(const ExecutionTrace& trace);
ExecutionTrace parse_trace_json(std::string_view text, std::string_view source = "<input>");

// Fixed-width timeline: one row per node, one column per tick.
//   '=' running   'S' succeeded   'E' error raised   's' skipped   '.' idle
std::string emit_timeline(const ExecutionTrace& trace);

// Both renderings, as emit_trace promises: the timeline, a blank line, and
// the JSON event list.
std::string emit_trace(const ExecutionTrace& trace);

}  // namespace acp
