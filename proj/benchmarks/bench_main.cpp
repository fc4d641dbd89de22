#include <benchmark/benchmark.h>

#include "stiffjnd/observer.hpp"
#include "stiffjnd/session.hpp"
#include "stiffjnd/spring_render.hpp"
#include "stiffjnd/staircase.hpp"

using namespace stiffjnd;

static void BM_Tick(benchmark::State& state) {
    const PlantParams plant;
    const SpringParams spring{1.25, 1.5};
    WristState w{12.3, -4.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(tick(ConditionMode::C4L, spring, w, plant));
        w.theta_left += 0.01;
    }
}
BENCHMARK(BM_Tick);

static void BM_StaircaseUpdate(benchmark::State& state) {
    StaircaseConfig config;
    config.terminate_after_reversals = 1 << 30;
    StaircaseState s = init(config);
    Rng rng(1);
    for (auto _ : state) {
        s = update(std::move(s), rng.bernoulli(0.83), config);
        if (s.reversals.size() > 1000) s = init(config);
    }
}
BENCHMARK(BM_StaircaseUpdate);

static void BM_ExploreAndEstimate(benchmark::State& state) {
    const EmbodiedObserver obs;
    const PlantParams plant;
    Rng rng(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(explore_and_estimate(obs, ConditionMode::C1, {1.2, 1.5}, plant, rng));
    }
}
BENCHMARK(BM_ExploreAndEstimate);

static void BM_RunSession(benchmark::State& state) {
    ProtocolConfig config;
    if (state.range(0) == 1) config.observer = EmbodiedObserver{};
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_session(plan_session(++seed, config)));
}
BENCHMARK(BM_RunSession)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
