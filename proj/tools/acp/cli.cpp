#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "acp/blueprint/serialization.hpp"
#include "acp/coordinator/coordinator.hpp"
#include "acp/planner/planner.hpp"
#include "acp/scheduler/scheduler.hpp"
#include "acp/tools/fault_injection.hpp"
#include "acp/tools/manifest.hpp"
#include "acp/tools/mock_tools.hpp"

namespace acp::cli {

namespace {

namespace fs = std::filesystem;

enum class LogLevel { Quiet, Info, Trace };

LogLevel log_level() {
    const char* v = std::getenv("ACP_LOG");
    if (!v) return LogLevel::Info;
    std::string s(v);
    if (s == "quiet") return LogLevel::Quiet;
    if (s == "trace") return LogLevel::Trace;
    return LogLevel::Info;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << text;
    if (!f) throw Error("cannot write " + path);
}

struct Environment {
    ToolManifest manifest;
    ReroutePolicy reroute;
};

// Without --fixtures the registry holds the calculator only.
Environment load_environment(const std::string& fixtures) {
    Environment env;
    if (fixtures.empty()) {
        env.manifest.registry.register_tool(make_calculator_tool());
        env.manifest.relevance["calculator"] = "any";
        return env;
    }
    fs::path dir(fixtures);
    fs::path manifest = dir / "tools.json";
    if (!fs::exists(manifest)) throw Error(manifest.string() + ": registry manifest not found");
    env.manifest = load_tool_manifest(manifest);
    fs::path reroute = dir / "reroute.json";
    if (fs::exists(reroute)) env.reroute = load_reroute_policy(reroute);
    return env;
}

std::function<RelevanceValidator(const std::string&)> relevance_lookup(const std::map<std::string, std::string>& names) {
    return [names](const std::string& tool) -> RelevanceValidator {
        auto it = names.find(tool);
        if (it != names.end() && it->second == "json_object") return json_object_validator();
        return {};
    };
}

// Registry problems, one per node.
std::vector<std::string> registry_violations(const ExecutionBlueprint& bp, const ToolRegistry& registry) {
    std::vector<std::string> out;
    for (const auto& [id, n] : bp.nodes()) {
        auto adapter = registry.find(n.tool);
        if (!adapter) {
            out.push_back("node '" + id + "': tool '" + n.tool + "' is not in the registry manifest");
            continue;
        }
        const auto* ep = adapter->schema().find_endpoint(n.endpoint);
        if (!ep) {
            out.push_back("node '" + id + "': tool '" + n.tool + "' has no endpoint '" + n.endpoint + "'");
            continue;
        }
        for (const auto& b : n.params) {
            if (!ep->find_param(b.name()))
                out.push_back("node '" + id + "': endpoint '" + n.endpoint + "' does not accept '" + b.name() + "'");
        }
    }
    return out;
}

int cmd_validate(const std::string& blueprint, const std::string& fixtures, std::ostream& out, std::ostream& err) {
    ExecutionBlueprint bp;
    try {
        bp = load_blueprint(blueprint);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIncomplete;
    }
    std::vector<std::string> violations;
    if (!fixtures.empty()) {
        try {
            violations = registry_violations(bp, load_environment(fixtures).manifest.registry);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        }
    }
    for (const auto& v : violations) err << "error: " << blueprint << ": " << v << "\n";
    if (!violations.empty()) return kExitIncomplete;
    if (log_level() != LogLevel::Quiet)
        out << blueprint << ": ok (" << bp.nodes().size() << " nodes, " << bp.edges().size() << " edges, "
            << bp.topological_layers().size() << " layers)\n";
    return kExitOk;
}

struct RunArgs {
    std::string blueprint;
    std::string mode = "fullacp";
    int workers = 1;
    std::optional<std::uint64_t> seed;
    std::string faults;
    std::string fixtures;
    std::string trace;
    std::string report;
    std::string state;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
    const LogLevel level = log_level();
    auto mode = mode_from_name(a.mode);
    if (!mode) {
        err << "error: --mode must be fullacp, noassist or single\n";
        return kExitUsage;
    }
    if (a.workers < 1) {
        err << "error: --workers must be at least 1\n";
        return kExitUsage;
    }

    ExecutionBlueprint bp;
    Environment env;
    FaultPlan plan;
    try {
        bp = load_blueprint(a.blueprint);
        env = load_environment(a.fixtures);
        if (!a.faults.empty()) plan = load_fault_plan(a.faults);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (a.seed) plan.seed = *a.seed;
    auto violations = registry_violations(bp, env.manifest.registry);
    if (!violations.empty()) {
        for (const auto& v : violations) err << "error: " << a.blueprint << ": " << v << "\n";
        return kExitUsage;
    }

    ToolRegistry registry = plan.empty() ? env.manifest.registry : inject_all(plan, env.manifest.registry);
    ExecutionPolicy policy;
    policy.mode = *mode;
    policy.worker_count = a.workers;
    policy.random_seed = plan.seed;
    if (env.manifest.timeout) policy.per_node_timeout = *env.manifest.timeout;

    RunOptions options;
    options.reroute = env.reroute;
    options.relevance = relevance_lookup(env.manifest.relevance);
    if (level == LogLevel::Trace) {
        options.on_event = [&err](const TraceEvent& e) {
            err << "[" << e.tick << "] " << e.node << " " << kind_name(e.kind);
            if (e.code) err << " " << to_int(*e.code);
            if (e.action) err << " " << resolution_name(*e.action);
            err << ": " << e.detail << "\n";
        };
    } else if (level == LogLevel::Info) {
        options.on_event = [&err](const TraceEvent& e) {
            if (e.kind == TraceEventKind::ErrorRaised)
                err << e.node << ": " << to_int(*e.code) << " " << status_name(*e.code) << ": " << e.detail << "\n";
            else if (e.kind == TraceEventKind::ResolutionApplied)
                err << e.node << ": " << resolution_name(*e.action) << ": " << e.detail << "\n";
        };
    }

    RunResult result;
    try {
        result = run(std::move(bp), registry, policy, options);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (!a.trace.empty()) write_file(a.trace, emit_trace(result.trace));
        if (!a.report.empty()) write_file(a.report, emit_report_json(result.report));
        if (!a.state.empty()) write_file(a.state, emit_run_state(result.blueprint));
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto& r = result.report;
    if (level != LogLevel::Quiet) {
        if (level == LogLevel::Trace) out << emit_timeline(result.trace);
        std::ostringstream rate;
        rate.precision(3);
        rate << std::fixed << r.completion_rate;
        out << mode_name(policy.mode) << ": " << r.succeeded << "/" << r.total << " succeeded, " << r.failed
            << " failed, " << r.skipped << " skipped, completion_rate " << rate.str() << "\n";
    }
    return r.succeeded == r.total ? kExitOk : kExitIncomplete;
}

int cmd_render(const std::string& state, const std::string& tmpl, const std::string& output, std::ostream& out,
               std::ostream& err) {
    std::string text;
    try {
        ExecutionBlueprint bp = parse_run_state(read_text_file(state), state);
        text = aggregate(bp, read_text_file(tmpl));
    } catch (const TemplateSlotUnknownNode& e) {
        err << "error: " << tmpl << ": " << e.what() << "\n";
        return kExitIncomplete;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (output.empty() || output == "-") {
        out << text;
        return kExitOk;
    }
    try {
        write_file(output, text);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_plan(const std::string& adapter_spec, const std::string& goal, const std::string& fixtures,
             const std::string& emit, const std::string& output, std::ostream& out, std::ostream& err) {
    std::unique_ptr<PlannerAdapter> adapter;
    if (adapter_spec == "stub") {
        adapter = std::make_unique<StubPlannerAdapter>();
    } else if (adapter_spec.rfind("command:", 0) == 0 && adapter_spec.size() > 8) {
        adapter = std::make_unique<CommandPlannerAdapter>(adapter_spec.substr(8));
    } else {
        err << "error: --adapter must be stub or command:<path>\n";
        return kExitUsage;
    }
    std::string text;
    try {
        auto catalog = load_environment(fixtures).manifest.registry.catalog();
        TaskSpec spec = plan_via_adapter(goal, catalog, *adapter);
        text = emit == "spec" ? emit_task_spec(spec) : emit_blueprint(compile(spec));
    } catch (const InvalidPlan& e) {
        for (const auto& d : e.diagnostics()) err << "error: plan: " << d << "\n";
        return kExitIncomplete;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (output.empty() || output == "-") {
        out << text;
        return kExitOk;
    }
    try {
        write_file(output, text);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

// Accepts either a bare JSON trace or the combined timeline + JSON file.
ExecutionTrace read_trace(const std::string& path) {
    std::string text = read_text_file(path);
    size_t start = 0;
    if (text.empty() || text.front() != '{') {
        size_t pos = text.find("\n{");
        if (pos == std::string::npos) throw Error(path + ": no JSON event list found");
        start = pos + 1;
    }
    return parse_trace_json(std::string_view(text).substr(start), path);
}

int cmd_replay(const std::string& trace_path, const std::string& blueprint, std::ostream& out, std::ostream& err) {
    ExecutionTrace trace;
    try {
        trace = read_trace(trace_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    out << emit_timeline(trace);

    std::map<NodeId, std::string> final_state;
    for (const auto& e : trace.events) {
        switch (e.kind) {
            case TraceEventKind::Succeeded: final_state[e.node] = "Succeeded"; break;
            case TraceEventKind::Skipped: final_state[e.node] = "Skipped"; break;
            case TraceEventKind::ResolutionApplied:
                if (e.action == ResolutionKind::Abandon) final_state[e.node] = "Failed";
                break;
            default: final_state.emplace(e.node, "Pending"); break;
        }
    }
    size_t ok = 0;
    for (const auto& [_, s] : final_state) ok += s == "Succeeded";
    out << trace.mode << " workers=" << trace.workers << " seed=" << trace.seed << ": " << trace.events.size()
        << " events, " << ok << "/" << final_state.size() << " nodes succeeded\n";

    if (blueprint.empty()) return kExitOk;
    // Check each dispatch against the static edges of the blueprint.
    ExecutionBlueprint bp;
    try {
        bp = load_blueprint(blueprint);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::set<NodeId> done;
    int violations = 0;
    for (const auto& e : trace.events) {
        if (e.kind == TraceEventKind::Succeeded) done.insert(e.node);
        if (e.kind != TraceEventKind::Dispatched || !bp.contains(e.node)) continue;
        for (const auto& p : bp.predecessors(e.node)) {
            if (!done.count(p)) {
                err << "violation: seq " << e.seq << " dispatched " << e.node << " before " << p << " succeeded\n";
                ++violations;
            }
        }
    }
    return violations == 0 ? kExitOk : kExitIncomplete;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Agent context protocol runtime: validate, run, render, plan and replay execution blueprints", "acp"};
    app.require_subcommand(1);

    std::string validate_bp, validate_fixtures;
    auto* validate = app.add_subcommand("validate", "Check a blueprint file and, optionally, its tools");
    validate->add_option("blueprint", validate_bp, "Blueprint JSON file")->required();
    validate->add_option("--fixtures", validate_fixtures, "Directory with tools.json to check tool names against");

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Execute a blueprint under a policy");
    run_cmd->add_option("blueprint", run_args.blueprint, "Blueprint JSON file")->required();
    run_cmd->add_option("--mode", run_args.mode, "fullacp, noassist or single")->capture_default_str();
    run_cmd->add_option("--workers", run_args.workers, "Concurrent node executors")->capture_default_str();
    run_cmd->add_option("--seed", run_args.seed, "Seed for fault injection (overrides the plan's seed)");
    run_cmd->add_option("--faults", run_args.faults, "Fault plan JSON file");
    run_cmd->add_option("--fixtures", run_args.fixtures, "Directory with tools.json and optional reroute.json");
    run_cmd->add_option("--trace", run_args.trace, "Write the trace (timeline and JSON events) here");
    run_cmd->add_option("--report", run_args.report, "Write the report JSON here");
    run_cmd->add_option("--state", run_args.state, "Write the final run state JSON here");

    std::string render_state, render_tmpl, render_out;
    auto* render = app.add_subcommand("render", "Fill a deliverable template from a run state");
    render->add_option("state", render_state, "Run state JSON written by run --state")->required();
    render->add_option("template", render_tmpl, "Markdown template with {{node.output}} slots")->required();
    render->add_option("-o,--out", render_out, "Output file (default stdout)");

    std::string plan_adapter = "stub", plan_goal, plan_fixtures, plan_emit = "blueprint", plan_out;
    auto* plan = app.add_subcommand("plan", "Decompose a goal into a blueprint through a planner adapter");
    plan->add_option("--adapter", plan_adapter, "stub or command:<path>")->capture_default_str();
    plan->add_option("--goal", plan_goal, "Goal text passed to the adapter");
    plan->add_option("--fixtures", plan_fixtures, "Directory with tools.json listing the catalog")->required();
    plan->add_option("--emit", plan_emit, "blueprint or spec")
        ->check(CLI::IsMember({"blueprint", "spec"}))
        ->capture_default_str();
    plan->add_option("-o,--out", plan_out, "Output file (default stdout)");

    std::string replay_trace, replay_bp;
    auto* replay = app.add_subcommand("replay", "Re-render a recorded trace and optionally audit it");
    replay->add_option("trace", replay_trace, "Trace file written by run --trace")->required();
    replay->add_option("--blueprint", replay_bp, "Blueprint to audit dispatch order against");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back("acp");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*validate) return cmd_validate(validate_bp, validate_fixtures, out, err);
        if (*run_cmd) return cmd_run(run_args, out, err);
        if (*render) return cmd_render(render_state, render_tmpl, render_out, out, err);
        if (*plan) return cmd_plan(plan_adapter, plan_goal, plan_fixtures, plan_emit, plan_out, out, err);
        if (*replay) return cmd_replay(replay_trace, replay_bp, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace acp::cli
