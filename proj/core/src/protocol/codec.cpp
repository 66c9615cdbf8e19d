#include "acp/protocol/codec.hpp"

#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

namespace acp {

using ojson = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- encoding

ojson encode_request(const AgentRequest& msg) {
    ojson headers = ojson::object();
    for (const auto& h : msg.headers) headers[h.name] = h.value;
    ojson body = ojson::array();
    for (const auto& p : msg.body) body.push_back(ojson{{"name", p.name}, {"value", p.value}});
    return ojson{{"kind", kind_name(MessageKind::AgentRequest)},
                 {"method", msg.method},
                 {"endpoint", msg.endpoint},
                 {"headers", std::move(headers)},
                 {"body", std::move(body)}};
}

ojson encode_response(const AgentResponse& msg) {
    ojson outputs = ojson::array();
    for (const auto& o : msg.outputs) outputs.push_back(ojson{{"name", o.name}, {"content", o.content}});
    ojson deps = ojson::array();
    for (const auto& d : msg.dependent_inputs) {
        deps.push_back(ojson{{"name", d.name},
                             {"target_node", d.target_node},
                             {"declared_type", d.declared_type},
                             {"content", d.content}});
    }
    return ojson{{"kind", kind_name(MessageKind::AgentResponse)},
                 {"status", to_int(msg.status)},
                 {"outputs", std::move(outputs)},
                 {"dependent_inputs", std::move(deps)}};
}

ojson encode_status_update(const StatusUpdate& su) {
    ojson tools = ojson::array();
    for (const auto& t : su.completed_tools) tools.push_back(ojson{{"tool", t.tool}, {"summary", t.summary}});
    return ojson{{"previous_progress", su.previous_progress},
                 {"current_progress", su.current_progress},
                 {"current_node", su.current_node},
                 {"completed_tools", std::move(tools)},
                 {"encountered_issues", su.encountered_issues}};
}

ojson encode_assistance(const AssistanceRequest& msg) {
    return ojson{{"kind", kind_name(MessageKind::AssistanceRequest)},
                 {"error", to_int(msg.error)},
                 {"error_node", msg.error_node},
                 {"error_tool", msg.error_tool},
                 {"description", msg.description},
                 {"relevant_context", msg.relevant_context},
                 {"suggested_resolution",
                  ojson{{"action", resolution_name(msg.suggested_resolution.action)},
                        {"rationale", msg.suggested_resolution.rationale}}},
                 {"status_update", encode_status_update(msg.status_update)}};
}

// ---------------------------------------------------------------- decoding

// Walks one JSON object, handing out typed members and remembering which
// keys were consumed so leftovers can be rejected.
class ObjectReader {
public:
    ObjectReader(const ojson& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw SchemaViolation(display_path(), "expected an object");
    }

    const ojson& member(std::string_view key) {
        auto it = obj_.find(std::string(key));
        if (it == obj_.end()) throw SchemaViolation(child(key), "missing required field");
        consumed_.insert(std::string(key));
        return *it;
    }

    std::string string(std::string_view key) {
        const auto& v = member(key);
        if (!v.is_string()) throw SchemaViolation(child(key), "expected a string");
        return v.get<std::string>();
    }

    int integer(std::string_view key) {
        const auto& v = member(key);
        if (!v.is_number_integer()) throw SchemaViolation(child(key), "expected an integer");
        return v.get<int>();
    }

    const ojson& array(std::string_view key) {
        const auto& v = member(key);
        if (!v.is_array()) throw SchemaViolation(child(key), "expected an array");
        return v;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!consumed_.count(key)) throw SchemaViolation(child(key), "unknown field");
        }
    }

    std::string child(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }
    std::string element(std::string_view key, size_t i) const {
        return child(key) + "[" + std::to_string(i) + "]";
    }

private:
    std::string display_path() const { return path_.empty() ? "$" : path_; }

    const ojson& obj_;
    std::string path_;
    std::set<std::string> consumed_;
};

StatusCode decode_code(ObjectReader& r, std::string_view key) {
    int raw = r.integer(key);
    auto code = status_from_int(raw);
    if (!code) throw SchemaViolation(r.child(key), "unknown status code " + std::to_string(raw));
    return *code;
}

AgentRequest decode_request(ObjectReader& r) {
    AgentRequest msg;
    msg.method = r.string("method");
    msg.endpoint = r.string("endpoint");
    const auto& headers = r.member("headers");
    if (!headers.is_object()) throw SchemaViolation("headers", "expected an object");
    for (const auto& [name, value] : headers.items()) {
        if (!value.is_string()) throw SchemaViolation("headers." + name, "expected a string");
        msg.headers.push_back({name, value.get<std::string>()});
    }
    const auto& body = r.array("body");
    for (size_t i = 0; i < body.size(); ++i) {
        ObjectReader p(body[i], r.element("body", i));
        msg.body.push_back({p.string("name"), p.string("value")});
        p.finish();
    }
    return msg;
}

AgentResponse decode_response(ObjectReader& r) {
    AgentResponse msg;
    msg.status = decode_code(r, "status");
    const auto& outputs = r.array("outputs");
    for (size_t i = 0; i < outputs.size(); ++i) {
        ObjectReader o(outputs[i], r.element("outputs", i));
        msg.outputs.push_back({o.string("name"), o.string("content")});
        o.finish();
    }
    const auto& deps = r.array("dependent_inputs");
    for (size_t i = 0; i < deps.size(); ++i) {
        ObjectReader d(deps[i], r.element("dependent_inputs", i));
        DependentInputVariable v;
        v.name = d.string("name");
        v.target_node = d.string("target_node");
        v.declared_type = d.string("declared_type");
        v.content = d.string("content");
        d.finish();
        msg.dependent_inputs.push_back(std::move(v));
    }
    return msg;
}

AssistanceRequest decode_assistance(ObjectReader& r) {
    AssistanceRequest msg;
    msg.error = decode_code(r, "error");
    msg.error_node = r.string("error_node");
    msg.error_tool = r.string("error_tool");
    msg.description = r.string("description");
    msg.relevant_context = r.string("relevant_context");

    ObjectReader res(r.member("suggested_resolution"), "suggested_resolution");
    auto action_text = res.string("action");
    auto action = resolution_from_name(action_text);
    if (!action)
        throw SchemaViolation("suggested_resolution.action", "unknown action '" + action_text + "'");
    msg.suggested_resolution.action = *action;
    msg.suggested_resolution.rationale = res.string("rationale");
    res.finish();

    ObjectReader su(r.member("status_update"), "status_update");
    msg.status_update.previous_progress = su.string("previous_progress");
    msg.status_update.current_progress = su.string("current_progress");
    msg.status_update.current_node = su.string("current_node");
    const auto& tools = su.array("completed_tools");
    for (size_t i = 0; i < tools.size(); ++i) {
        ObjectReader t(tools[i], su.element("completed_tools", i));
        msg.status_update.completed_tools.push_back({t.string("tool"), t.string("summary")});
        t.finish();
    }
    msg.status_update.encountered_issues = su.string("encountered_issues");
    su.finish();
    return msg;
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

std::string encode_message(const Message& msg) {
    validate(msg);
    ojson doc = std::visit(
        [](const auto& m) -> ojson {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AgentRequest>) return encode_request(m);
            else if constexpr (std::is_same_v<T, AgentResponse>) return encode_response(m);
            else return encode_assistance(m);
        },
        msg);
    try {
        return doc.dump();
    } catch (const nlohmann::json::type_error& e) {
        throw SchemaViolation("$", std::string("text is not valid UTF-8: ") + e.what());
    }
}

Message decode_message(std::string_view text) {
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedMessage(std::string("unparseable message: ") + e.what());
    }
    if (!doc.is_object()) throw MalformedMessage("message must be a JSON object");

    ObjectReader r(doc, "");
    auto kind = r.string("kind");
    Message msg;
    if (kind == kind_name(MessageKind::AgentRequest)) msg = decode_request(r);
    else if (kind == kind_name(MessageKind::AgentResponse)) msg = decode_response(r);
    else if (kind == kind_name(MessageKind::AssistanceRequest)) msg = decode_assistance(r);
    else throw SchemaViolation("kind", "unknown message kind '" + kind + "'");
    r.finish();
    validate(msg);
    return msg;
}

std::vector<std::string> default_secret_patterns() { return {"*_key", "*_token"}; }

bool glob_match(std::string_view pattern, std::string_view text) noexcept {
    // Iterative wildcard match with single-star backtracking.
    size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (p < pattern.size() && lower(pattern[p]) == lower(text[t])) {
            ++p;
            ++t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

AgentRequest redact_secrets(const AgentRequest& req, const std::vector<std::string>& patterns) {
    auto secret = [&](std::string_view name) {
        for (const auto& pat : patterns) {
            if (glob_match(pat, name)) return true;
        }
        return false;
    };
    AgentRequest out = req;
    for (auto& h : out.headers) {
        if (secret(h.name)) h.value = "***";
    }
    for (auto& p : out.body) {
        if (secret(p.name)) p.value = "***";
    }
    return out;
}

}  // namespace acp
