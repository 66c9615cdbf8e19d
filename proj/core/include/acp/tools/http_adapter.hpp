#pragma once

#include <string>

#include "acp/tools/registry.hpp"

namespace acp {

struct HttpToolConfig {
    std::string base_url;  // scheme://host[:port], no trailing path
    // Credentials are read from this environment variable at call time.
    // Empty means ACP_TOOL_<NAME>_KEY with NAME upper-cased.
    std::string auth_env;
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
};

// Environment variable holding credentials for tool name.
std::string default_auth_env(std::string_view tool_name);

// Maps an AgentRequest onto an HTTP call:
//   FUNCTION/POST/PUT/PATCH -> JSON object body {param: value, ...}
//   GET/DELETE              -> body params as query string
// The endpoint is the URL path. Non-2xx statuses and transport failures
// raise ToolError ("HTTP 500: ...", "transport error: ...").
// Throws Error if base_url is not an http:// URL.
ToolAdapterPtr make_http_tool(ToolSchema schema, HttpToolConfig config);

}  // namespace acp
