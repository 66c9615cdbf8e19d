#include "acp/blueprint/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json_io.hpp"

namespace acp {
namespace detail {

ojson parse_json(std::string_view text, const std::string& source) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        size_t offset = e.byte == 0 ? 0 : std::min<size_t>(e.byte - 1, text.size());
        size_t line = 1, column = 1;
        for (size_t i = 0; i < offset; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        auto cut = what.find("; ");
        throw ParseError(source, std::to_string(line) + ":" + std::to_string(column),
                         "invalid JSON" + (cut == std::string::npos ? "" : what.substr(cut)));
    }
}

JsonFields::JsonFields(const ojson& obj, std::string source, std::string path)
    : obj_(obj), source_(std::move(source)), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParseError(source_, path_.empty() ? "$" : path_, "expected an object");
}

bool JsonFields::has(const char* key) const { return obj_.contains(key); }

const ojson& JsonFields::get(const char* key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) fail(key, "missing required field");
    used_.emplace_back(key);
    return *it;
}

std::string JsonFields::string(const char* key) {
    const auto& v = get(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
}

std::string JsonFields::string_or(const char* key, std::string fallback) {
    if (!has(key)) return fallback;
    return string(key);
}

const ojson& JsonFields::array(const char* key) {
    const auto& v = get(key);
    if (!v.is_array()) fail(key, "expected an array");
    return v;
}

const ojson& JsonFields::object(const char* key) {
    const auto& v = get(key);
    if (!v.is_object()) fail(key, "expected an object");
    return v;
}

void JsonFields::reject_unknown() const {
    for (const auto& [key, _] : obj_.items()) {
        if (std::find(used_.begin(), used_.end(), key) == used_.end()) fail(key, "unknown field");
    }
}

std::string JsonFields::path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

void JsonFields::fail(const std::string& key, const std::string& what) const {
    throw ParseError(source_, path_of(key), what);
}

ojson param_to_json(const ParamBinding& b) {
    if (b.is_literal()) return ojson{{"name", b.name()}, {"origin", "literal"}, {"value", b.literal_value()}};
    return ojson{{"name", b.name()},
                 {"origin", "dependency"},
                 {"source", ojson{{"node", b.source().node}, {"output", b.source().output}}}};
}

ParamBinding param_from_json(const ojson& j, const std::string& source, const std::string& path) {
    JsonFields f(j, source, path);
    std::string name = f.string("name");
    if (name.empty()) f.fail("name", "must be non-empty");
    std::string origin = f.string("origin");
    if (origin == "literal") {
        std::string value = f.string("value");
        f.reject_unknown();
        return ParamBinding::literal(std::move(name), std::move(value));
    }
    if (origin == "dependency") {
        JsonFields src(f.object("source"), source, f.path_of("source"));
        NodeOutputRef ref{src.string("node"), src.string("output")};
        src.reject_unknown();
        f.reject_unknown();
        return ParamBinding::dependency(std::move(name), std::move(ref));
    }
    f.fail("origin", "expected \"literal\" or \"dependency\", got \"" + origin + "\"");
}

ojson node_to_json(const BlueprintNode& node) {
    ojson params = ojson::array();
    for (const auto& b : node.params) params.push_back(param_to_json(b));
    ojson j{{"id", node.id}, {"subtask", node.subtask}, {"tool", node.tool}};
    if (!node.agent.empty()) j["agent"] = node.agent;
    j["method"] = node.method;
    j["endpoint"] = node.endpoint;
    j["params"] = std::move(params);
    j["expected_outputs"] = node.expected_outputs;
    return j;
}

BlueprintNode node_from_json(const ojson& j, const std::string& source, const std::string& path) {
    JsonFields f(j, source, path);
    BlueprintNode n;
    n.id = f.string_or("id", "");
    n.tool = f.string("tool");
    n.endpoint = f.string("endpoint");
    n.method = f.string_or("method", "");
    n.agent = f.string_or("agent", "");
    auto dot = n.id.rfind('.');
    n.subtask = f.string_or("subtask", dot == std::string::npos ? n.id : n.id.substr(0, dot));
    if (f.has("params")) {
        const auto& params = f.array("params");
        for (size_t i = 0; i < params.size(); ++i)
            n.params.push_back(param_from_json(params[i], source, f.path_of("params") + "[" + std::to_string(i) + "]"));
    }
    if (f.has("expected_outputs")) {
        const auto& outs = f.array("expected_outputs");
        for (size_t i = 0; i < outs.size(); ++i) {
            if (!outs[i].is_string())
                throw ParseError(source, f.path_of("expected_outputs") + "[" + std::to_string(i) + "]",
                                 "expected a string");
            n.expected_outputs.push_back(outs[i].get<std::string>());
        }
    }
    f.reject_unknown();
    return n;
}

ojson blueprint_to_json(const ExecutionBlueprint& bp) {
    ojson nodes = ojson::array();
    for (const auto& [_, n] : bp.nodes()) nodes.push_back(node_to_json(n));
    ojson edges = ojson::array();
    for (const auto& [from, to] : bp.edges()) edges.push_back(ojson::array({from, to}));
    return ojson{{"goal", bp.goal()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

ExecutionBlueprint blueprint_from_json(const ojson& j, const std::string& source) {
    JsonFields f(j, source, "");
    std::string goal = f.string("goal");
    std::vector<BlueprintNode> nodes;
    const auto& jn = f.array("nodes");
    for (size_t i = 0; i < jn.size(); ++i) {
        std::string path = "nodes[" + std::to_string(i) + "]";
        nodes.push_back(node_from_json(jn[i], source, path));
        if (nodes.back().id.empty()) throw ParseError(source, path + ".id", "missing required field");
    }
    std::vector<Edge> edges;
    const auto& je = f.array("edges");
    for (size_t i = 0; i < je.size(); ++i) {
        const auto& e = je[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
            throw ParseError(source, "edges[" + std::to_string(i) + "]", "expected [from, to] node ids");
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    f.reject_unknown();
    try {
        return ExecutionBlueprint::build(std::move(goal), std::move(nodes), std::move(edges));
    } catch (const BlueprintError& e) {
        throw BlueprintError(e.kind(), source + ": " + e.what(), e.cycle());
    }
}

}  // namespace detail

std::string emit_blueprint(const ExecutionBlueprint& bp) { return detail::blueprint_to_json(bp).dump(2) + "\n"; }

ExecutionBlueprint parse_blueprint(std::string_view text, std::string_view source) {
    std::string src(source);
    return detail::blueprint_from_json(detail::parse_json(text, src), src);
}

std::string emit_run_state(const ExecutionBlueprint& bp) {
    using detail::ojson;
    ojson nodes = ojson::object();
    for (const auto& [id, n] : bp.nodes()) {
        ojson s{{"status", status_name(n.status)},
                {"retries_remaining", n.retries_remaining},
                {"attempts", n.attempts}};
        if (n.last_error) s["last_error"] = to_int(*n.last_error);
        nodes[id] = std::move(s);
    }
    ojson store = ojson::array();
    for (const auto& [key, content] : bp.output_store())
        store.push_back(ojson{{"node", key.node}, {"output", key.output}, {"content", content}});
    ojson deps = ojson::array();
    for (const auto& [key, content] : bp.dependent_store())
        deps.push_back(ojson{{"target", key.target}, {"source", key.source}, {"name", key.name}, {"content", content}});
    ojson doc{{"blueprint", detail::blueprint_to_json(bp)},
              {"nodes", std::move(nodes)},
              {"output_store", std::move(store)},
              {"dependent_inputs", std::move(deps)}};
    return doc.dump(2) + "\n";
}

ExecutionBlueprint parse_run_state(std::string_view text, std::string_view source) {
    using detail::JsonFields;
    std::string src(source);
    auto doc = detail::parse_json(text, src);
    JsonFields f(doc, src, "");
    ExecutionBlueprint bp = detail::blueprint_from_json(f.object("blueprint"), src);
    const auto& nodes = f.object("nodes");
    for (const auto& [id, state] : nodes.items()) {
        std::string path = "nodes." + id;
        if (!bp.contains(id)) throw ParseError(src, path, "state for unknown node");
        JsonFields s(state, src, path);
        auto status = node_status_from_name(s.string("status"));
        if (!status) s.fail("status", "unknown node status");
        const auto& retries = s.get("retries_remaining");
        const auto& attempts = s.get("attempts");
        if (!retries.is_number_integer()) s.fail("retries_remaining", "expected an integer");
        if (!attempts.is_number_integer()) s.fail("attempts", "expected an integer");
        std::optional<StatusCode> last_error;
        if (s.has("last_error")) {
            const auto& le = s.get("last_error");
            if (!le.is_number_integer() || !status_from_int(le.get<int>())) s.fail("last_error", "unknown status code");
            last_error = status_from_int(le.get<int>());
        }
        s.reject_unknown();
        bp.restore_node_state(id, *status, retries.get<int>(), attempts.get<int>(), last_error);
    }
    const auto& store = f.array("output_store");
    for (size_t i = 0; i < store.size(); ++i) {
        JsonFields e(store[i], src, "output_store[" + std::to_string(i) + "]");
        OutputKey key{e.string("node"), e.string("output")};
        std::string content = e.string("content");
        e.reject_unknown();
        bp.restore_output(key, std::move(content));
    }
    if (f.has("dependent_inputs")) {
        const auto& deps = f.array("dependent_inputs");
        for (size_t i = 0; i < deps.size(); ++i) {
            JsonFields e(deps[i], src, "dependent_inputs[" + std::to_string(i) + "]");
            DependentKey key{e.string("target"), e.string("source"), e.string("name")};
            std::string content = e.string("content");
            e.reject_unknown();
            if (!bp.contains(key.target) || !bp.contains(key.source))
                throw ParseError(src, "dependent_inputs[" + std::to_string(i) + "]", "unknown node");
            bp.restore_dependent_input(key, std::move(content));
        }
    }
    f.reject_unknown();
    return bp;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace acp
