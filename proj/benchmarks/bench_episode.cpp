#include "femtoq/radio_env.hpp"
#include "femtoq/sim_harness.hpp"
#include "femtoq/trace_io.hpp"

#include <benchmark/benchmark.h>

using namespace femtoq;

static void BM_Episode(benchmark::State& state)
{
    SimConfig cfg;
    cfg.n_femto = static_cast<std::size_t>(state.range(0));
    cfg.paradigm = state.range(1) ? Paradigm::CL : Paradigm::IL;
    for (auto _ : state) {
        auto trace = run_episode(cfg);
        benchmark::DoNotOptimize(trace.summary);
    }
    state.SetLabel(std::string(to_string(cfg.paradigm)));
}
BENCHMARK(BM_Episode)->ArgsProduct({{4, 11, 15}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_EvaluateCapacities(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto topo = generate_topology(n, 1);
    const auto ch = channel_gains(topo, 2.0, 6);
    PowerAllocation pa(n, 6, 4.0);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_capacities(ch, pa, 1e-7));
}
BENCHMARK(BM_EvaluateCapacities)->Arg(4)->Arg(15);

static void BM_TraceCsv(benchmark::State& state)
{
    SimConfig cfg;
    cfg.n_femto = 4;
    const auto trace = run_episode(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(trace_to_csv(trace));
}
BENCHMARK(BM_TraceCsv)->Unit(benchmark::kMillisecond);

static void BM_TopologyPlacement(benchmark::State& state)
{
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(generate_topology(static_cast<std::size_t>(state.range(0)), seed++));
}
BENCHMARK(BM_TopologyPlacement)->Arg(4)->Arg(15);
BENCHMARK_MAIN();
