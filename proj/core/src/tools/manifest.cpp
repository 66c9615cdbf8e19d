#include "acp/tools/manifest.hpp"

#include "json_io.hpp"
#include "acp/tools/http_adapter.hpp"
#include "acp/tools/mock_tools.hpp"

namespace acp {

namespace {

using detail::JsonFields;
using detail::ojson;

std::vector<ParamSpec> params_from_json(const ojson& arr, const std::string& src, const std::string& path) {
    if (!arr.is_array()) throw ParseError(src, path, "expected an array");
    std::vector<ParamSpec> out;
    for (size_t i = 0; i < arr.size(); ++i) {
        const auto& p = arr[i];
        if (p.is_string()) {
            out.push_back({p.get<std::string>(), false, ""});
            continue;
        }
        JsonFields f(p, src, path + "[" + std::to_string(i) + "]");
        ParamSpec spec;
        spec.name = f.string("name");
        if (f.has("multi_valued")) {
            const auto& m = f.get("multi_valued");
            if (!m.is_boolean()) f.fail("multi_valued", "expected a boolean");
            spec.multi_valued = m.get<bool>();
        }
        spec.pattern = f.string_or("pattern", "");
        f.reject_unknown();
        out.push_back(std::move(spec));
    }
    return out;
}

ToolSchema schema_from_json(const ojson& j, const std::string& src, const std::string& path,
                            std::vector<std::string> extra_keys = {}) {
    JsonFields f(j, src, path);
    ToolSchema schema;
    schema.name = f.string("name");
    schema.description = f.string_or("description", "");
    if (f.has("single_flight")) {
        const auto& s = f.get("single_flight");
        if (!s.is_boolean()) f.fail("single_flight", "expected a boolean");
        schema.single_flight = s.get<bool>();
    }
    if (f.has("endpoints")) {
        const auto& eps = f.array("endpoints");
        for (size_t i = 0; i < eps.size(); ++i) {
            std::string epath = f.path_of("endpoints") + "[" + std::to_string(i) + "]";
            JsonFields e(eps[i], src, epath);
            EndpointSchema ep;
            ep.id = e.string("id");
            if (e.has("required")) ep.required = params_from_json(e.get("required"), src, epath + ".required");
            if (e.has("optional")) ep.optional = params_from_json(e.get("optional"), src, epath + ".optional");
            if (e.has("outputs")) {
                for (const auto& o : e.array("outputs")) {
                    if (!o.is_string()) e.fail("outputs", "expected an array of strings");
                    ep.outputs.push_back(o.get<std::string>());
                }
            }
            std::string mode = e.string_or("output_mode", "json_fields");
            if (mode == "json_fields") ep.output_mode = OutputMode::JsonFields;
            else if (mode == "whole_payload") ep.output_mode = OutputMode::WholePayload;
            else e.fail("output_mode", "expected json_fields or whole_payload");
            e.reject_unknown();
            schema.endpoints.push_back(std::move(ep));
        }
    }
    for (const auto& k : extra_keys) {
        if (f.has(k.c_str())) f.get(k.c_str());
    }
    f.reject_unknown();
    try {
        validate(schema);
    } catch (const InvalidToolSchema& e) {
        throw ParseError(src, path.empty() ? "name" : path, e.what());
    }
    return schema;
}

}  // namespace

ToolSchema parse_tool_schema(std::string_view json_text, std::string_view source) {
    std::string src(source);
    return schema_from_json(detail::parse_json(json_text, src), src, "");
}

ToolManifest parse_tool_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                                 std::string_view source) {
    std::string src(source);
    auto doc = detail::parse_json(json_text, src);
    JsonFields f(doc, src, "");
    ToolManifest manifest;
    if (f.has("timeout_ms")) {
        const auto& t = f.get("timeout_ms");
        if (!t.is_number_integer() || t.get<long long>() <= 0) f.fail("timeout_ms", "expected a positive integer");
        manifest.timeout = std::chrono::milliseconds(t.get<long long>());
    }
    const auto& tools = f.array("tools");
    for (size_t i = 0; i < tools.size(); ++i) {
        std::string path = "tools[" + std::to_string(i) + "]";
        JsonFields t(tools[i], src, path);
        std::string name = t.string("name");
        std::string kind = t.string("kind");
        std::string relevance = t.string_or("relevance", "any");
        if (relevance != "any" && relevance != "json_object") t.fail("relevance", "expected any or json_object");
        long long delay_ms = 0;
        if (t.has("delay_ms")) {
            const auto& d = t.get("delay_ms");
            if (!d.is_number_integer() || d.get<long long>() < 0) t.fail("delay_ms", "expected a non-negative integer");
            delay_ms = d.get<long long>();
        }

        ToolAdapterPtr adapter;
        if (kind == "calculator") {
            adapter = make_calculator_tool(name);
        } else if (kind == "kv") {
            ToolSchema schema = schema_from_json(tools[i], src, path,
                                                 {"kind", "relevance", "delay_ms", "fixture", "data"});
            Fixture fixture;
            if (t.has("fixture")) {
                std::filesystem::path fp = t.string("fixture");
                if (fp.is_relative()) fp = base_dir / fp;
                try {
                    fixture = load_fixture(fp);
                } catch (const ParseError&) {
                    throw;
                } catch (const Error& e) {
                    t.fail("fixture", e.what());
                }
            } else if (t.has("data")) {
                fixture = parse_fixture(t.object("data").dump());
            }
            adapter = make_kv_tool(std::move(schema), std::move(fixture));
        } else if (kind == "http") {
            ToolSchema schema = schema_from_json(tools[i], src, path,
                                                 {"kind", "relevance", "delay_ms", "base_url", "auth_env",
                                                  "auth_header", "auth_prefix"});
            HttpToolConfig config;
            config.base_url = t.string("base_url");
            config.auth_env = t.string_or("auth_env", "");
            config.auth_header = t.string_or("auth_header", config.auth_header);
            config.auth_prefix = t.string_or("auth_prefix", config.auth_prefix);
            try {
                adapter = make_http_tool(std::move(schema), std::move(config));
            } catch (const Error& e) {
                t.fail("base_url", e.what());
            }
        } else {
            t.fail("kind", "unknown tool kind '" + kind + "' (expected calculator, kv or http)");
        }
        if (kind == "calculator") t.reject_unknown();
        if (delay_ms > 0) adapter = with_delay(adapter, std::chrono::milliseconds(delay_ms));
        if (manifest.registry.contains(name)) t.fail("name", "duplicate tool '" + name + "'");
        manifest.registry.register_tool(adapter);
        manifest.relevance[name] = relevance;
    }
    f.reject_unknown();
    return manifest;
}

ToolManifest load_tool_manifest(const std::filesystem::path& path) {
    return parse_tool_manifest(read_text_file(path.string()), path.parent_path(), path.string());
}

}  // namespace acp
