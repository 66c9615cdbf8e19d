#include "acp/planner/planner.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

#include <sys/wait.h>

#include "json_io.hpp"
#include "acp/blueprint/serialization.hpp"

namespace acp {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += (out.empty() ? "" : "; ") + l;
    return out;
}

std::string step_id(const std::string& subtask, size_t index) { return subtask + "." + std::to_string(index + 1); }

}  // namespace

InvalidTaskSpec::InvalidTaskSpec(std::vector<std::string> diagnostics)
    : Error("invalid task spec: " + join_lines(diagnostics)), diagnostics_(std::move(diagnostics)) {}

UnknownDependencyVariable::UnknownDependencyVariable(std::string producer, std::string variable)
    : Error("step '" + producer + "' does not produce '" + variable + "'"),
      producer_(std::move(producer)),
      variable_(std::move(variable)) {}

InvalidPlan::InvalidPlan(std::vector<std::string> diagnostics)
    : Error("invalid plan: " + join_lines(diagnostics)), diagnostics_(std::move(diagnostics)) {}

TaskSpec parse_task_spec(std::string_view json_text, std::string_view source) {
    using detail::JsonFields;
    using detail::ojson;
    std::string src(source);
    auto doc = detail::parse_json(json_text, src);
    JsonFields f(doc, src, "");
    TaskSpec spec;
    spec.goal = f.string_or("goal", "");

    const auto& subtasks = f.array("subtasks");
    for (size_t i = 0; i < subtasks.size(); ++i) {
        std::string path = "subtasks[" + std::to_string(i) + "]";
        JsonFields s(subtasks[i], src, path);
        SubtaskSpec sub;
        sub.id = s.string("id");
        sub.agent = s.string_or("agent", "");
        const auto& steps = s.array("steps");
        for (size_t k = 0; k < steps.size(); ++k) {
            std::string spath = path + ".steps[" + std::to_string(k) + "]";
            JsonFields t(steps[k], src, spath);
            StepTemplate step;
            step.tool = t.string("tool");
            step.method = t.string_or("method", "FUNCTION");
            step.endpoint = t.string("endpoint");
            if (t.has("params")) {
                for (const auto& [name, value] : t.object("params").items()) {
                    if (!value.is_string()) t.fail("params." + name, "expected a string");
                    step.params.push_back({name, value.get<std::string>()});
                }
            }
            if (t.has("expected_outputs")) {
                for (const auto& o : t.array("expected_outputs")) {
                    if (!o.is_string()) t.fail("expected_outputs", "expected an array of strings");
                    step.expected_outputs.push_back(o.get<std::string>());
                }
            }
            t.reject_unknown();
            sub.steps.push_back(std::move(step));
        }
        s.reject_unknown();
        spec.subtasks.push_back(std::move(sub));
    }

    if (f.has("dependencies")) {
        const auto& deps = f.array("dependencies");
        for (size_t i = 0; i < deps.size(); ++i) {
            JsonFields d(deps[i], src, "dependencies[" + std::to_string(i) + "]");
            DependencySpec dep;
            dep.producer = d.string("producer");
            dep.consumer = d.string("consumer");
            dep.variable = d.string("variable");
            dep.param = d.string_or("param", dep.variable);
            d.reject_unknown();
            spec.dependencies.push_back(std::move(dep));
        }
    }
    f.reject_unknown();
    return spec;
}

TaskSpec load_task_spec(const std::filesystem::path& path) {
    return parse_task_spec(read_text_file(path.string()), path.string());
}

std::string emit_task_spec(const TaskSpec& spec) {
    using detail::ojson;
    ojson subtasks = ojson::array();
    for (const auto& sub : spec.subtasks) {
        ojson steps = ojson::array();
        for (const auto& step : sub.steps) {
            ojson params = ojson::object();
            for (const auto& p : step.params) params[p.name] = p.value;
            steps.push_back({{"tool", step.tool},
                             {"method", step.method},
                             {"endpoint", step.endpoint},
                             {"params", std::move(params)},
                             {"expected_outputs", step.expected_outputs}});
        }
        ojson s{{"id", sub.id}};
        if (!sub.agent.empty()) s["agent"] = sub.agent;
        s["steps"] = std::move(steps);
        subtasks.push_back(std::move(s));
    }
    ojson deps = ojson::array();
    for (const auto& d : spec.dependencies) {
        deps.push_back({{"producer", d.producer}, {"consumer", d.consumer}, {"variable", d.variable}, {"param", d.param}});
    }
    ojson doc{{"goal", spec.goal}, {"subtasks", std::move(subtasks)}, {"dependencies", std::move(deps)}};
    return doc.dump(2) + "\n";
}

std::vector<std::string> check_task_spec(const TaskSpec& spec) {
    std::vector<std::string> diags;
    std::map<std::string, const StepTemplate*> steps;
    std::set<std::string> subtask_ids;
    for (const auto& sub : spec.subtasks) {
        if (sub.id.empty()) diags.push_back("subtask with empty id");
        if (!subtask_ids.insert(sub.id).second) diags.push_back("duplicate subtask '" + sub.id + "'");
        if (sub.steps.empty()) diags.push_back("subtask '" + sub.id + "' has no steps");
        for (size_t k = 0; k < sub.steps.size(); ++k) {
            const auto& step = sub.steps[k];
            std::string id = step_id(sub.id, k);
            if (!steps.emplace(id, &step).second) diags.push_back("step id '" + id + "' is produced twice");
            if (step.tool.empty()) diags.push_back("step '" + id + "' names no tool");
            if (step.endpoint.empty()) diags.push_back("step '" + id + "' names no endpoint");
            std::set<std::string> names;
            for (const auto& p : step.params) {
                if (!names.insert(p.name).second) diags.push_back("step '" + id + "' binds '" + p.name + "' twice");
            }
        }
    }
    std::set<std::pair<std::string, std::string>> bound;
    for (const auto& d : spec.dependencies) {
        auto prod = steps.find(d.producer);
        auto cons = steps.find(d.consumer);
        if (prod == steps.end()) diags.push_back("dependency names unknown producer '" + d.producer + "'");
        if (cons == steps.end()) diags.push_back("dependency names unknown consumer '" + d.consumer + "'");
        if (prod != steps.end()) {
            const auto& outs = prod->second->expected_outputs;
            if (std::find(outs.begin(), outs.end(), d.variable) == outs.end())
                diags.push_back("step '" + d.producer + "' does not produce '" + d.variable + "'");
        }
        if (cons != steps.end()) {
            std::string param = d.param.empty() ? d.variable : d.param;
            const auto& lits = cons->second->params;
            bool literal = std::any_of(lits.begin(), lits.end(), [&](const LiteralParam& p) { return p.name == param; });
            if (literal || !bound.emplace(d.consumer, param).second)
                diags.push_back("step '" + d.consumer + "' binds '" + param + "' twice");
        }
    }
    return diags;
}

ExecutionBlueprint compile(const TaskSpec& spec) {
    std::map<std::string, const StepTemplate*> steps;
    for (const auto& sub : spec.subtasks) {
        for (size_t k = 0; k < sub.steps.size(); ++k) steps.emplace(step_id(sub.id, k), &sub.steps[k]);
    }
    for (const auto& d : spec.dependencies) {
        auto prod = steps.find(d.producer);
        if (prod == steps.end()) continue;
        const auto& outs = prod->second->expected_outputs;
        if (std::find(outs.begin(), outs.end(), d.variable) == outs.end())
            throw UnknownDependencyVariable(d.producer, d.variable);
    }
    if (auto diags = check_task_spec(spec); !diags.empty()) throw InvalidTaskSpec(std::move(diags));

    std::map<NodeId, BlueprintNode> nodes;
    std::vector<Edge> edges;
    for (const auto& sub : spec.subtasks) {
        for (size_t k = 0; k < sub.steps.size(); ++k) {
            const auto& step = sub.steps[k];
            BlueprintNode n;
            n.id = step_id(sub.id, k);
            n.subtask = sub.id;
            n.agent = sub.agent;
            n.tool = step.tool;
            n.method = step.method;
            n.endpoint = step.endpoint;
            for (const auto& p : step.params) n.params.push_back(ParamBinding::literal(p.name, p.value));
            n.expected_outputs = step.expected_outputs;
            if (k > 0) edges.emplace_back(step_id(sub.id, k - 1), n.id);
            nodes.emplace(n.id, std::move(n));
        }
    }
    for (const auto& d : spec.dependencies) {
        std::string param = d.param.empty() ? d.variable : d.param;
        nodes.at(d.consumer).params.push_back(ParamBinding::dependency(param, {d.producer, d.variable}));
        edges.emplace_back(d.producer, d.consumer);
    }
    std::vector<BlueprintNode> list;
    for (auto& [_, n] : nodes) list.push_back(std::move(n));
    return ExecutionBlueprint::build(spec.goal, std::move(list), std::move(edges));
}

ExecutionBlueprint load_blueprint(const std::filesystem::path& path) {
    return parse_blueprint(read_text_file(path.string()), path.string());
}

const std::string& travel_task_spec_json() {
    static const std::string text = R"({
  "goal": "Plan a weekend in Lisbon: check the weather, pick a book for the trip, find a flight, then choose venues that fit all three",
  "subtasks": [
    {
      "id": "weather",
      "agent": "weather_agent",
      "steps": [
        {"tool": "weather", "method": "GET", "endpoint": "forecast",
         "params": {"city": "Lisbon", "days": "3"}, "expected_outputs": ["forecast"]}
      ]
    },
    {
      "id": "book",
      "agent": "reading_agent",
      "steps": [
        {"tool": "books", "method": "GET", "endpoint": "search",
         "params": {"topic": "Portuguese travel writing"}, "expected_outputs": ["title"]}
      ]
    },
    {
      "id": "flight",
      "agent": "flight_agent",
      "steps": [
        {"tool": "flights", "method": "GET", "endpoint": "search",
         "params": {"origin": "BER", "destination": "LIS"}, "expected_outputs": ["itinerary"]}
      ]
    },
    {
      "id": "venue",
      "agent": "venue_agent",
      "steps": [
        {"tool": "venues", "method": "GET", "endpoint": "recommend",
         "params": {"city": "Lisbon"}, "expected_outputs": ["plan"]}
      ]
    }
  ],
  "dependencies": [
    {"producer": "weather.1", "consumer": "venue.1", "variable": "forecast"},
    {"producer": "book.1", "consumer": "venue.1", "variable": "title", "param": "book"},
    {"producer": "flight.1", "consumer": "venue.1", "variable": "itinerary"}
  ]
}
)";
    return text;
}

StubPlannerAdapter::StubPlannerAdapter() : text_(travel_task_spec_json()) {}

std::string StubPlannerAdapter::propose(std::string_view, std::string_view) { return text_; }

namespace {

std::string shell_quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    return out + "'";
}

}  // namespace

std::string CommandPlannerAdapter::propose(std::string_view goal, std::string_view catalog) {
    if (command_.empty()) throw AdapterUnavailable("no planner command configured");
    std::error_code ec;
    if (!std::filesystem::exists(command_, ec)) throw AdapterUnavailable("planner command not found: " + command_);
    ::setenv("ACP_PLAN_CATALOG", std::string(catalog).c_str(), 1);
    std::string cmd = shell_quote(command_) + " " + shell_quote(goal);
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw AdapterUnavailable("cannot start planner command: " + command_);
    std::string out;
    std::array<char, 4096> buf{};
    size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    int status = ::pclose(pipe);
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
        throw AdapterUnavailable("planner command failed: " + command_ + " (status " + std::to_string(status) + ")");
    return out;
}

std::string catalog_json(const std::vector<ToolSchema>& catalog) {
    using detail::ojson;
    ojson tools = ojson::array();
    for (const auto& t : catalog) {
        ojson endpoints = ojson::array();
        for (const auto& e : t.endpoints) {
            ojson req = ojson::array();
            ojson opt = ojson::array();
            for (const auto& p : e.required) req.push_back(p.name);
            for (const auto& p : e.optional) opt.push_back(p.name);
            endpoints.push_back({{"id", e.id}, {"required", req}, {"optional", opt}, {"outputs", e.outputs}});
        }
        tools.push_back({{"name", t.name}, {"description", t.description}, {"endpoints", std::move(endpoints)}});
    }
    return tools.dump();
}

TaskSpec plan_via_adapter(std::string_view goal, const std::vector<ToolSchema>& catalog, PlannerAdapter& adapter) {
    std::string text = adapter.propose(goal, catalog_json(catalog));
    TaskSpec spec;
    try {
        spec = parse_task_spec(text, "<adapter>");
    } catch (const Error& e) {
        throw InvalidPlan({e.what()});
    }
    std::vector<std::string> diags = check_task_spec(spec);
    for (const auto& sub : spec.subtasks) {
        for (size_t k = 0; k < sub.steps.size(); ++k) {
            const auto& step = sub.steps[k];
            auto it = std::find_if(catalog.begin(), catalog.end(), [&](const ToolSchema& t) { return t.name == step.tool; });
            if (it == catalog.end()) {
                diags.push_back("step '" + step_id(sub.id, k) + "' uses tool '" + step.tool + "' absent from the catalog");
            } else if (!it->find_endpoint(step.endpoint)) {
                diags.push_back("step '" + step_id(sub.id, k) + "' uses endpoint '" + step.endpoint +
                                "' unknown to tool '" + step.tool + "'");
            }
        }
    }
    if (diags.empty()) {
        try {
            compile(spec);
        } catch (const Error& e) {
            diags.push_back(e.what());
        }
    }
    if (!diags.empty()) throw InvalidPlan(std::move(diags));
    return spec;
}

}  // namespace acp
