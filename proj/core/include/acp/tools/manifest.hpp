#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "acp/tools/registry.hpp"

namespace acp {

// Registry manifest (tools.json):
// {"timeout_ms": 5000,
//  "tools": [
//    {"name": "calculator", "kind": "calculator"},
//    {"name": "perplexity", "kind": "kv", "fixture": "perplexity.json",
//     "relevance": "json_object", "delay_ms": 0, "single_flight": false,
//     "description": "...",
//     "endpoints": [{"id": "search", "required": ["query"], "optional": [],
//                    "outputs": ["answer"], "output_mode": "whole_payload"}]},
//    {"name": "weather", "kind": "http", "base_url": "http://127.0.0.1:8080",
//     "auth_env": "WEATHER_KEY", "endpoints": [...]}]}
//
// A param is a name or {"name": ..., "multi_valued": bool, "pattern": "..."}.
// output_mode is "json_fields" (default) or "whole_payload". A kv fixture is
// a file path relative to the manifest or an inline "data" object.
struct ToolManifest {
    ToolRegistry registry;
    // Tool name -> validator name ("any" or "json_object").
    std::map<std::string, std::string> relevance;
    std::optional<std::chrono::milliseconds> timeout;
};

ToolSchema parse_tool_schema(std::string_view json_text, std::string_view source = "<input>");

ToolManifest parse_tool_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                                 std::string_view source = "<input>");
ToolManifest load_tool_manifest(const std::filesystem::path& path);

}  // namespace acp
