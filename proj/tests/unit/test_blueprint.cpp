#include <random>

#include <gtest/gtest.h>

#include "acp/blueprint/serialization.hpp"
#include "oracles.hpp"

using namespace acp;
using oracle::node;

namespace {

ExecutionBlueprint diamond() {
    auto lit = [](const char* q) { return ParamBinding::literal("query", q); };
    return ExecutionBlueprint::build(
        "diamond",
        {node("a", "calculator", "calculate", {lit("1+2")}, {"result"}),
         node("b", "calculator", "calculate", {ParamBinding::dependency("query", {"a", "result"})}, {"result"}),
         node("c", "calculator", "calculate", {lit("3")}, {"result"}),
         node("d", "calculator", "calculate", {ParamBinding::dependency("query", {"b", "result"})}, {"result"})},
        {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
}

BlueprintError::Kind build_error(std::vector<BlueprintNode> nodes, std::vector<Edge> edges) {
    try {
        ExecutionBlueprint::build("g", std::move(nodes), std::move(edges));
    } catch (const BlueprintError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "build accepted";
    return BlueprintError::Kind::InvalidNode;
}

void run_to_success(ExecutionBlueprint& bp, const NodeId& id, std::vector<OutputVariable> outputs,
                    std::vector<DependentInputVariable> deps = {}) {
    bp.set_status(id, NodeStatus::Ready);
    bp.set_status(id, NodeStatus::Running);
    AgentResponse r;
    r.outputs = std::move(outputs);
    r.dependent_inputs = std::move(deps);
    bp.store_output(id, r);
}

const InputFault& fault_of(const InputResolution& r) {
    static InputFault none{StatusCode::Ok, "", ""};
    if (!std::holds_alternative<InputFault>(r)) {
        ADD_FAILURE() << "expected an input fault";
        return none;
    }
    return std::get<InputFault>(r);
}

EndpointSchema endpoint(std::vector<ParamSpec> required, std::vector<ParamSpec> optional = {}) {
    EndpointSchema ep;
    ep.id = "forecast";
    ep.required = std::move(required);
    ep.optional = std::move(optional);
    return ep;
}

}  // namespace

TEST(Build, DiamondIsValidWithFourPendingNodes) {
    auto bp = diamond();
    EXPECT_EQ(bp.nodes().size(), 4u);
    EXPECT_EQ(bp.edges().size(), 4u);
    for (const auto& [_, n] : bp.nodes()) {
        EXPECT_EQ(n.status, NodeStatus::Pending);
        EXPECT_EQ(n.retries_remaining, kDefaultRetryBudget);
    }
}

TEST(Build, TwoCycleReportsWitness) {
    try {
        ExecutionBlueprint::build("g", {node("a", "t", "e", {}, {"x"}), node("b", "t", "e", {}, {"x"})},
                                  {{"a", "b"}, {"b", "a"}});
        FAIL();
    } catch (const BlueprintError& e) {
        EXPECT_EQ(e.kind(), BlueprintError::Kind::CycleDetected);
        EXPECT_EQ(e.cycle(), (std::vector<NodeId>{"a", "b", "a"}));
        EXPECT_NE(std::string(e.what()).find("a -> b -> a"), std::string::npos);
    }
}

TEST(Build, SelfLoopIsACycle) {
    EXPECT_EQ(build_error({node("a", "t", "e", {}, {"x"})}, {{"a", "a"}}), BlueprintError::Kind::CycleDetected);
}

TEST(Build, StructuralErrors) {
    EXPECT_EQ(build_error({node("a", "t", "e", {}, {"x"})}, {{"a", "z"}}), BlueprintError::Kind::DanglingEdge);
    EXPECT_EQ(build_error({node("a", "t", "e", {}, {"x"}), node("a", "t", "e", {}, {"x"})}, {}),
              BlueprintError::Kind::DuplicateNode);
    EXPECT_EQ(build_error({node("a", "t", "e", {}, {"x"}),
                           node("b", "t", "e", {ParamBinding::dependency("q", {"a", "x"})}, {"x"})},
                          {}),
              BlueprintError::Kind::DanglingDependencyBinding);
    EXPECT_EQ(build_error({node("b", "t", "e", {ParamBinding::dependency("q", {"zz", "x"})}, {"x"})}, {}),
              BlueprintError::Kind::DanglingDependencyBinding);
    EXPECT_EQ(build_error({node("a", "t", "e", {}, {"x", "x"})}, {}), BlueprintError::Kind::InvalidNode);
    EXPECT_EQ(build_error({node("", "t", "e", {}, {"x"})}, {}), BlueprintError::Kind::InvalidNode);
}

TEST(Build, AcceptRejectMatchesBruteForceCycleOracle) {
    std::mt19937_64 rng(8);
    int cyclic = 0;
    for (int trial = 0; trial < 100; ++trial) {
        oracle::RandomGraph g;
        g.n = 8;
        std::bernoulli_distribution coin(0.08);
        for (size_t u = 0; u < 8; ++u)
            for (size_t v = 0; v < 8; ++v)
                if (u != v && coin(rng)) g.edges.emplace_back(u, v);
        bool expect_cycle = oracle::has_cycle(g.n, g.edges);
        cyclic += expect_cycle;
        std::vector<BlueprintNode> nodes;
        for (size_t i = 0; i < g.n; ++i) nodes.push_back(node(oracle::node_name(i), "t", "e", {}, {"x"}));
        std::vector<Edge> edges;
        for (auto [u, v] : g.edges) edges.emplace_back(oracle::node_name(u), oracle::node_name(v));
        bool rejected = false;
        try {
            ExecutionBlueprint::build("g", nodes, edges);
        } catch (const BlueprintError& e) {
            ASSERT_EQ(e.kind(), BlueprintError::Kind::CycleDetected);
            rejected = true;
            // The witness must be a real closed walk over existing edges.
            const auto& w = e.cycle();
            ASSERT_GE(w.size(), 2u);
            EXPECT_EQ(w.front(), w.back());
            for (size_t i = 0; i + 1 < w.size(); ++i) {
                EXPECT_NE(std::find(edges.begin(), edges.end(), Edge{w[i], w[i + 1]}), edges.end());
            }
        }
        ASSERT_EQ(rejected, expect_cycle) << "trial " << trial;
    }
    EXPECT_GT(cyclic, 10);
    EXPECT_LT(cyclic, 90);
}

TEST(Layers, DiamondAndSingleNode) {
    EXPECT_EQ(diamond().topological_layers(),
              (std::vector<std::vector<NodeId>>{{"a"}, {"b", "c"}, {"d"}}));
    auto single = ExecutionBlueprint::build("g", {node("a", "t", "e", {}, {"x"})}, {});
    EXPECT_EQ(single.topological_layers(), (std::vector<std::vector<NodeId>>{{"a"}}));
}

TEST(Layers, RandomDagsRespectEveryEdgeAndLongestChain) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = oracle::random_dag(rng, 8, 0.3);
        auto bp = oracle::calculator_blueprint(g);
        auto layers = bp.topological_layers();
        std::map<NodeId, size_t> layer_of;
        size_t count = 0;
        for (size_t k = 0; k < layers.size(); ++k) {
            EXPECT_TRUE(std::is_sorted(layers[k].begin(), layers[k].end()));
            for (const auto& id : layers[k]) layer_of[id] = k;
            count += layers[k].size();
        }
        ASSERT_EQ(count, g.n);
        for (const auto& [u, v] : bp.edges()) EXPECT_LT(layer_of[u], layer_of[v]);
        auto depth = oracle::longest_chain(g.n, g.edges);
        for (size_t i = 0; i < g.n; ++i) EXPECT_EQ(layer_of[oracle::node_name(i)], depth[i]);
    }
}

TEST(ResolveInputs, LiteralPassesThrough) {
    auto bp = ExecutionBlueprint::build(
        "g", {node("a", "calculator", "calculate", {ParamBinding::literal("query", "2+3")}, {"result"})}, {});
    auto r = bp.resolve_inputs("a");
    ASSERT_TRUE(std::holds_alternative<std::vector<BodyParam>>(r));
    EXPECT_EQ(std::get<std::vector<BodyParam>>(r), (std::vector<BodyParam>{{"query", "2+3"}}));
}

TEST(ResolveInputs, WeatherStepWithoutCoordinatesIs601) {
    auto bp = ExecutionBlueprint::build(
        "g",
        {node("s1.1", "perplexity", "perplexity_api_response", {ParamBinding::literal("query", "spots?")},
              {"vacation_spots_list"}),
         node("s1.2", "open_meteo", "forecast",
              {ParamBinding::dependency("location_names", {"s1.1", "vacation_spots_list"}),
               ParamBinding::literal("daily", "temperature_2m_mean")},
              {"average_temperatures"})},
        {{"s1.1", "s1.2"}});
    run_to_success(bp, "s1.1", {{"vacation_spots_list", "Santorini, Greece; Prague, Czech Republic"}});
    auto ep = endpoint({{"latitude"}, {"longitude"}, {"daily"}}, {{"location_names"}});
    const auto& f = fault_of(bp.resolve_inputs("s1.2", &ep));
    EXPECT_EQ(f.code, StatusCode::MissingRequiredParameters);
    EXPECT_EQ(f.param, "latitude");
    EXPECT_NE(f.description.find("latitude and longitude"), std::string::npos);
}

TEST(ResolveInputs, DuplicateParamIs603) {
    auto bp = ExecutionBlueprint::build(
        "g", {node("a", "t", "e", {ParamBinding::literal("q", "1"), ParamBinding::literal("q", "2")}, {"x"})}, {});
    EXPECT_EQ(fault_of(bp.resolve_inputs("a")).code, StatusCode::InvalidParameterUsage);
}

TEST(ResolveInputs, AbsentOrEmptyDependencyIs601) {
    auto bp = ExecutionBlueprint::build(
        "g",
        {node("a", "t", "e", {}, {"x", "y"}),
         node("b", "t", "e", {ParamBinding::dependency("q", {"a", "missing"})}, {"x"})},
        {{"a", "b"}});
    run_to_success(bp, "a", {{"x", "1"}, {"y", "2"}});
    EXPECT_EQ(fault_of(bp.resolve_inputs("b")).code, StatusCode::MissingRequiredParameters);

    auto bp2 = ExecutionBlueprint::build(
        "g", {node("a", "t", "e", {}, {"x"}), node("b", "t", "e", {ParamBinding::dependency("q", {"a", "x"})}, {"x"})},
        {{"a", "b"}});
    run_to_success(bp2, "a", {{"x", ""}});
    EXPECT_EQ(fault_of(bp2.resolve_inputs("b")).code, StatusCode::MissingRequiredParameters);
}

TEST(ResolveInputs, ArityAndFormatViolationsAre603) {
    auto bp = ExecutionBlueprint::build(
        "g", {node("a", "t", "forecast", {ParamBinding::literal("latitude", "[1, 2]"),
                                          ParamBinding::literal("longitude", "x"), ParamBinding::literal("daily", "d")},
                   {"x"})},
        {});
    auto single = endpoint({{"latitude"}, {"longitude"}, {"daily"}});
    EXPECT_EQ(fault_of(bp.resolve_inputs("a", &single)).code, StatusCode::InvalidParameterUsage);

    auto multi = endpoint({{"latitude", true, ""}, {"longitude", false, "^-?[0-9.]+$"}, {"daily"}});
    const auto& f = fault_of(bp.resolve_inputs("a", &multi));
    EXPECT_EQ(f.code, StatusCode::InvalidParameterUsage);
    EXPECT_EQ(f.param, "longitude");
}

TEST(StoreOutput, OutputsAndDependentInputsLandInStore) {
    auto bp = ExecutionBlueprint::build(
        "g",
        {node("s1.1", "perplexity", "q", {}, {"vacation_spots_list_usa"}),
         node("s2.1", "perplexity", "q", {ParamBinding::dependency("query", {"s1.1", "vacation_spots_list_usa"})},
              {"coords"})},
        {{"s1.1", "s2.1"}});
    run_to_success(bp, "s1.1", {{"vacation_spots_list_usa", "Yellowstone National Park, Grand Canyon, Hawaii"}},
                   {{"vacation_spots_list_usa", "s2.1", "string", "Yellowstone National Park, Grand Canyon, Hawaii"}});
    EXPECT_EQ(bp.node("s1.1").status, NodeStatus::Succeeded);
    ASSERT_NE(bp.output("s1.1", "vacation_spots_list_usa"), nullptr);
    EXPECT_EQ(bp.output("s2.1", "vacation_spots_list_usa"), nullptr);
    ASSERT_NE(bp.dependent_input("s2.1", "s1.1", "vacation_spots_list_usa"), nullptr);
    EXPECT_EQ(*bp.dependent_input("s2.1", "s1.1", "vacation_spots_list_usa"),
              "Yellowstone National Park, Grand Canyon, Hawaii");
}

TEST(StoreOutput, WriteThenReadIsVerbatim) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        auto bp = diamond();
        std::string content = "line one\n  \"quoted\" \t" + std::to_string(rng()) + "\n";
        run_to_success(bp, "a", {{"result", content}});
        auto r = bp.resolve_inputs("b");
        ASSERT_TRUE(std::holds_alternative<std::vector<BodyParam>>(r));
        EXPECT_EQ(std::get<std::vector<BodyParam>>(r).at(0).value, content);
    }
}

TEST(StoreOutput, NodeMustBeRunning) {
    auto bp = diamond();
    run_to_success(bp, "a", {{"result", "3"}});
    AgentResponse r;
    r.outputs = {{"result", "4"}};
    try {
        bp.store_output("a", r);
        FAIL();
    } catch (const BlueprintError& e) {
        EXPECT_EQ(e.kind(), BlueprintError::Kind::NodeNotRunning);
    }
    try {
        bp.store_output("zz", r);
        FAIL();
    } catch (const BlueprintError& e) {
        EXPECT_EQ(e.kind(), BlueprintError::Kind::UnknownNode);
    }
}

TEST(StoreOutput, MissingExpectedOutputIsRejected) {
    auto bp = diamond();
    bp.set_status("a", NodeStatus::Ready);
    bp.set_status("a", NodeStatus::Running);
    AgentResponse r;
    r.outputs = {{"other", "4"}};
    EXPECT_THROW(bp.store_output("a", r), BlueprintError);
}

TEST(Descendants, DiamondAndSink) {
    auto bp = diamond();
    EXPECT_EQ(bp.descendants("a"), (std::set<NodeId>{"b", "c", "d"}));
    EXPECT_EQ(bp.descendants("b"), (std::set<NodeId>{"d"}));
    EXPECT_TRUE(bp.descendants("d").empty());
    EXPECT_THROW(bp.descendants("zz"), BlueprintError);
}

TEST(Descendants, MatchesClosureBySquaring) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = oracle::random_dag(rng, 8, 0.25);
        auto bp = oracle::calculator_blueprint(g);
        auto closure = oracle::closure_by_squaring(oracle::adjacency(g.n, g.edges));
        for (size_t i = 0; i < g.n; ++i) {
            std::set<NodeId> expect;
            for (size_t j = 0; j < g.n; ++j)
                if (closure[i][j]) expect.insert(oracle::node_name(j));
            ASSERT_EQ(bp.descendants(oracle::node_name(i)), expect);
        }
    }
}

TEST(ApplyResolution, AbandonInDiamondSkipsOnlyDescendants) {
    auto bp = diamond();
    run_to_success(bp, "a", {{"result", "3"}});
    bp.set_status("b", NodeStatus::Ready);
    bp.set_status("b", NodeStatus::Running);
    bp.apply_resolution("b", ResolutionAction::abandon("x"));
    EXPECT_EQ(bp.node("a").status, NodeStatus::Succeeded);
    EXPECT_EQ(bp.node("b").status, NodeStatus::Failed);
    EXPECT_EQ(bp.node("c").status, NodeStatus::Pending);
    EXPECT_EQ(bp.node("d").status, NodeStatus::Skipped);
}

TEST(ApplyResolution, AbandonMatchesReachabilityOracleOnRandomDags) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        auto g = oracle::random_dag(rng, std::uniform_int_distribution<size_t>(2, 10)(rng), 0.3);
        auto bp = oracle::calculator_blueprint(g);
        NodeId victim = oracle::node_name(std::uniform_int_distribution<size_t>(0, g.n - 1)(rng));
        // Ids sort in topological order, so one pass runs every node whose
        // predecessors have already succeeded.
        std::vector<NodeId> ids;
        for (const auto& [id, _] : bp.nodes()) ids.push_back(id);
        for (const auto& id : ids) {
            if (id == victim) break;
            bool ready = true;
            for (const auto& p : bp.predecessors(id)) ready &= bp.node(p).status == NodeStatus::Succeeded;
            if (ready) run_to_success(bp, id, {{"result", "1"}});
        }
        bool victim_ready = true;
        for (const auto& p : bp.predecessors(victim)) victim_ready &= bp.node(p).status == NodeStatus::Succeeded;
        if (!victim_ready) continue;
        auto before = bp;
        bp.set_status(victim, NodeStatus::Ready);
        bp.set_status(victim, NodeStatus::Running);
        bp.apply_resolution(victim, ResolutionAction::abandon("x"));
        auto desc = oracle::descendants_of(before, victim);
        for (const auto& [id, n] : bp.nodes()) {
            if (id == victim) EXPECT_EQ(n.status, NodeStatus::Failed);
            else if (desc.count(id)) EXPECT_EQ(n.status, NodeStatus::Skipped) << id;
            else EXPECT_EQ(n.status, before.node(id).status) << id;
        }
    }
}

TEST(ApplyResolution, RetryDecrementsBudgetThenExhausts) {
    auto bp = diamond();
    for (int left = kDefaultRetryBudget; left > 0; --left) {
        bp.set_status("a", NodeStatus::Ready);
        bp.set_status("a", NodeStatus::Running);
        bp.apply_resolution("a", ResolutionAction::retry("again"));
        EXPECT_EQ(bp.node("a").status, NodeStatus::Ready);
        EXPECT_EQ(bp.node("a").retries_remaining, left - 1);
        bp.set_status("a", NodeStatus::Running);
        bp.set_status("a", NodeStatus::Failed);
        bp.restore_node_state("a", NodeStatus::Pending, left - 1, bp.node("a").attempts, std::nullopt);
    }
    bp.set_status("a", NodeStatus::Ready);
    bp.set_status("a", NodeStatus::Running);
    try {
        bp.apply_resolution("a", ResolutionAction::retry("again"));
        FAIL();
    } catch (const BlueprintError& e) {
        EXPECT_EQ(e.kind(), BlueprintError::Kind::RetryBudgetExhausted);
    }
}

TEST(ApplyResolution, RerouteInsertsCoordinatePredecessor) {
    auto bp = ExecutionBlueprint::build(
        "g",
        {node("s1.1", "perplexity", "perplexity_api_response", {ParamBinding::literal("query", "spots?")},
              {"vacation_spots_list"}),
         node("s1.2", "open_meteo", "forecast",
              {ParamBinding::dependency("location_names", {"s1.1", "vacation_spots_list"})},
              {"average_temperatures"})},
        {{"s1.1", "s1.2"}});
    run_to_success(bp, "s1.1", {{"vacation_spots_list", "Santorini, Greece"}});
    bp.set_status("s1.2", NodeStatus::Ready);
    bp.set_status("s1.2", NodeStatus::Running);
    size_t nodes_before = bp.nodes().size();
    size_t edges_before = bp.edges().size();

    auto pre = node("s1.2.pre", "perplexity", "perplexity_structured",
                    {ParamBinding::literal("query", "coordinates of Santorini, Greece")}, {"latitude", "longitude"});
    auto params = bp.node("s1.2").params;
    params.push_back(ParamBinding::dependency("latitude", {"s1.2.pre", "latitude"}));
    params.push_back(ParamBinding::dependency("longitude", {"s1.2.pre", "longitude"}));
    bp.apply_resolution("s1.2", ResolutionAction::reroute_to({"open_meteo", "GET", "forecast", params, pre},
                                                             "Add a step to obtain latitude and longitude"));
    EXPECT_EQ(bp.nodes().size(), nodes_before + 1);
    EXPECT_EQ(bp.edges().size(), edges_before + 1);
    EXPECT_TRUE(bp.edges().count({"s1.2.pre", "s1.2"}));
    EXPECT_EQ(bp.node("s1.2").status, NodeStatus::Pending);
    EXPECT_EQ(bp.node("s1.2.pre").status, NodeStatus::Pending);
    EXPECT_NO_THROW(bp.topological_layers());
}

TEST(ApplyResolution, RerouteThatClosesCycleIsRejectedAndLeavesStateUntouched) {
    auto bp = ExecutionBlueprint::build(
        "g", {node("a", "t", "e", {}, {"x"}), node("b", "t", "e", {}, {"x"}), node("c", "t", "e", {}, {"x"})},
        {{"a", "b"}, {"b", "c"}});
    run_to_success(bp, "a", {{"x", "1"}});
    bp.set_status("b", NodeStatus::Ready);
    bp.set_status("b", NodeStatus::Running);
    auto before = bp;
    // b would read from c, but c already depends on b.
    std::vector<ParamBinding> params{ParamBinding::dependency("q", {"c", "x"})};
    try {
        bp.apply_resolution("b", ResolutionAction::reroute_to({"t", "FUNCTION", "e", params, std::nullopt}, "x"));
        FAIL();
    } catch (const BlueprintError& e) {
        EXPECT_EQ(e.kind(), BlueprintError::Kind::RerouteCreatesCycle);
        EXPECT_EQ(e.cycle().front(), e.cycle().back());
    }
    EXPECT_EQ(bp, before);
}

TEST(Transitions, OnlyLegalMovesAreAccepted) {
    auto bp = diamond();
    EXPECT_THROW(bp.set_status("a", NodeStatus::Running), BlueprintError);
    EXPECT_THROW(bp.set_status("a", NodeStatus::Succeeded), BlueprintError);
    bp.set_status("a", NodeStatus::Ready);
    bp.set_status("a", NodeStatus::Running);
    EXPECT_EQ(bp.node("a").attempts, 1);
    EXPECT_THROW(bp.set_status("a", NodeStatus::Skipped), BlueprintError);
    bp.set_status("c", NodeStatus::Skipped);
    EXPECT_THROW(bp.set_status("c", NodeStatus::Ready), BlueprintError);
}

TEST(Serialization, DiamondFileRoundTrips) {
    auto bp = parse_blueprint(read_text_file(ACP_DATA_DIR "/blueprints/diamond.json"), "diamond.json");
    EXPECT_EQ(bp.nodes().size(), 4u);
    EXPECT_EQ(parse_blueprint(emit_blueprint(bp)), bp);
    EXPECT_EQ(emit_blueprint(parse_blueprint(emit_blueprint(bp))), emit_blueprint(bp));
}

TEST(Serialization, SyntaxErrorsCarryLineAndColumn) {
    try {
        parse_blueprint("{\n  \"goal\": \"x\",\n  \"nodes\": [,]\n}", "bad.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.source(), "bad.json");
        EXPECT_EQ(e.where().substr(0, 2), "3:");
    }
}

TEST(Serialization, FieldErrorsCarryPaths) {
    try {
        parse_blueprint(R"({"goal":"x","nodes":[{"id":"a","tool":"t","endpoint":"e","params":[{"name":"q","origin":"other"}]}],"edges":[]})",
                        "f.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(e.where().find("nodes[0].params[0]"), std::string::npos) << e.what();
    }
    try {
        parse_blueprint(R"({"goal":"x","nodes":[{"id":"a","tool":"t","endpoint":"e","bogus":1}],"edges":[]})", "f.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.where(), "nodes[0].bogus");
    }
}

TEST(Serialization, BuildErrorsNameTheFile) {
    try {
        parse_blueprint(read_text_file(ACP_DATA_DIR "/blueprints/cycle.json"), "cycle.json");
        FAIL();
    } catch (const BlueprintError& e) {
        EXPECT_EQ(e.kind(), BlueprintError::Kind::CycleDetected);
        EXPECT_EQ(std::string(e.what()).rfind("cycle.json: ", 0), 0u);
        EXPECT_EQ(e.cycle(), (std::vector<NodeId>{"a", "b", "a"}));
    }
}

TEST(Serialization, RunStateRoundTripsStatusesAndStore) {
    auto bp = diamond();
    run_to_success(bp, "a", {{"result", "3\nwith newline"}}, {{"result", "b", "string", "3\nwith newline"}});
    bp.set_status("b", NodeStatus::Ready);
    bp.set_status("b", NodeStatus::Running);
    bp.record_error("b", StatusCode::ToolCallFailure);
    bp.apply_resolution("b", ResolutionAction::abandon("x"));
    auto back = parse_run_state(emit_run_state(bp));
    EXPECT_EQ(back.node("b").status, NodeStatus::Failed);
    EXPECT_EQ(back.node("b").last_error, StatusCode::ToolCallFailure);
    EXPECT_EQ(back.node("d").status, NodeStatus::Skipped);
    EXPECT_EQ(*back.output("a", "result"), "3\nwith newline");
    EXPECT_EQ(*back.dependent_input("b", "a", "result"), "3\nwith newline");
    EXPECT_EQ(emit_run_state(back), emit_run_state(bp));
}
