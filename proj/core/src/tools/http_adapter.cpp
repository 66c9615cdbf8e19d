#include "acp/tools/http_adapter.hpp"

#include <cctype>
#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace acp {

std::string default_auth_env(std::string_view tool_name) {
    std::string out = "ACP_TOOL_";
    for (char c : tool_name) {
        out += std::isalnum(static_cast<unsigned char>(c))
                   ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                   : '_';
    }
    return out + "_KEY";
}

namespace {

class HttpTool final : public ToolAdapter {
public:
    HttpTool(ToolSchema schema, HttpToolConfig config) : schema_(std::move(schema)), config_(std::move(config)) {
        if (config_.auth_env.empty()) config_.auth_env = default_auth_env(schema_.name);
    }

    const ToolSchema& schema() const override { return schema_; }

    std::string call(const AgentRequest& request, const CallContext& ctx) override {
        httplib::Client client(config_.base_url);
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(ctx.timeout);
        auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(ctx.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        httplib::Headers headers;
        for (const auto& h : request.headers) headers.emplace(h.name, h.value);
        if (const char* key = std::getenv(config_.auth_env.c_str()); key && *key)
            headers.emplace(config_.auth_header, config_.auth_prefix + key);

        std::string path = request.endpoint;
        if (path.empty() || path.front() != '/') path.insert(path.begin(), '/');

        std::string method = request.method;
        for (auto& c : method) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));

        httplib::Result res;
        if (method == "GET" || method == "DELETE") {
            httplib::Params params;
            for (const auto& p : request.body) params.emplace(p.name, p.value);
            std::string target = httplib::append_query_params(path, params);
            res = method == "GET" ? client.Get(target, headers) : client.Delete(target, headers);
        } else if (method == "FUNCTION" || method == "POST" || method == "PUT" || method == "PATCH") {
            nlohmann::ordered_json body = nlohmann::ordered_json::object();
            for (const auto& p : request.body) body[p.name] = p.value;
            std::string text = body.dump();
            if (method == "PUT") res = client.Put(path, headers, text, "application/json");
            else if (method == "PATCH") res = client.Patch(path, headers, text, "application/json");
            else res = client.Post(path, headers, text, "application/json");
        } else {
            throw ToolError(schema_.name + ": unsupported method '" + request.method + "'");
        }

        if (!res) throw ToolError("transport error: " + httplib::to_string(res.error()));
        if (res->status < 200 || res->status >= 300) {
            std::string excerpt = res->body.substr(0, 200);
            throw ToolError("HTTP " + std::to_string(res->status) + (excerpt.empty() ? "" : ": " + excerpt));
        }
        return res->body;
    }

private:
    ToolSchema schema_;
    HttpToolConfig config_;
};

}  // namespace

ToolAdapterPtr make_http_tool(ToolSchema schema, HttpToolConfig config) {
    static const std::regex kBaseUrl(R"(^http://[A-Za-z0-9.\-]+(:[0-9]{1,5})?$)");
    if (!std::regex_match(config.base_url, kBaseUrl))
        throw Error("http tool '" + schema.name + "': malformed base url '" + config.base_url + "'");
    return std::make_shared<HttpTool>(std::move(schema), std::move(config));
}

}  // namespace acp
