#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "acp/blueprint/blueprint.hpp"
#include "acp/protocol/codec.hpp"
#include "acp/scheduler/scheduler.hpp"
#include "acp/tools/mock_tools.hpp"

using namespace acp;

namespace {

std::string name(size_t i) { return "n" + std::to_string(i); }

// Calculator DAG where node i reads the result of one earlier node.
ExecutionBlueprint random_blueprint(size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<BlueprintNode> nodes;
    std::vector<Edge> edges;
    for (size_t v = 0; v < n; ++v) {
        BlueprintNode node;
        node.id = name(v);
        node.subtask = "n";
        node.tool = "calculator";
        node.method = "FUNCTION";
        node.endpoint = "calculate";
        node.expected_outputs = {"result"};
        std::vector<size_t> preds;
        for (size_t u = 0; u < v; ++u)
            if (coin(rng)) preds.push_back(u);
        for (size_t u : preds) edges.emplace_back(name(u), name(v));
        if (preds.empty())
            node.params.push_back(ParamBinding::literal("query", std::to_string(v) + " * 2"));
        else
            node.params.push_back(ParamBinding::dependency("query", {name(preds.front()), "result"}));
        nodes.push_back(std::move(node));
    }
    return ExecutionBlueprint::build("bench", std::move(nodes), std::move(edges));
}

void BM_BuildAndLayers(benchmark::State& state) {
    auto n = static_cast<size_t>(state.range(0));
    auto bp = random_blueprint(n, 4.0 / double(n), 1);
    std::vector<BlueprintNode> nodes;
    for (const auto& [id, node] : bp.nodes()) nodes.push_back(node);
    std::vector<Edge> edges(bp.edges().begin(), bp.edges().end());
    for (auto _ : state) {
        auto built = ExecutionBlueprint::build("bench", nodes, edges);
        benchmark::DoNotOptimize(built.topological_layers());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildAndLayers)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_CodecRoundTrip(benchmark::State& state) {
    AgentRequest req;
    req.method = "GET";
    req.endpoint = "https://api.open-meteo.com/v1/forecast";
    for (int i = 0; i < state.range(0); ++i) req.body.push_back({"param" + std::to_string(i), "value " + std::to_string(i)});
    Message msg = req;
    for (auto _ : state) {
        auto text = encode_message(msg);
        benchmark::DoNotOptimize(decode_message(text));
    }
}
BENCHMARK(BM_CodecRoundTrip)->Arg(2)->Arg(32);

void BM_WideDagRun(benchmark::State& state) {
    auto bp = random_blueprint(static_cast<size_t>(state.range(0)), 0.05, 2);
    ToolRegistry reg;
    reg.register_tool(make_calculator_tool());
    ExecutionPolicy p;
    p.worker_count = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(run(bp, reg, p).report);
}
BENCHMARK(BM_WideDagRun)->Args({64, 1})->Args({64, 4})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
