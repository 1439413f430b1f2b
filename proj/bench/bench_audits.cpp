#include <benchmark/benchmark.h>

#include "kreg/kappa_phase.hpp"
#include "kreg/kepler.hpp"
#include "kreg/ligon_schaaf.hpp"
#include "kreg/stereo.hpp"

namespace {

using kreg::batch::Exec;

constexpr std::uint64_t kSeed = 7;

kreg::KappaParams params()
{
    kreg::KappaParams p;
    p.a = 0.1;
    return p;
}

template <class Audit>
void run(benchmark::State& state, Audit audit)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const Exec exec = state.range(1) == 0 ? Exec::Serial : Exec::Parallel;
    for (auto _ : state) {
        benchmark::DoNotOptimize(audit(n, exec));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.SetLabel(exec == Exec::Serial ? "serial" : "parallel");
}

void BM_BracketAudit(benchmark::State& state)
{
    run(state, [](std::size_t n, Exec e) { return kreg::bracket_audit(params(), n, kSeed, e); });
}

void BM_StereoAudit(benchmark::State& state)
{
    run(state, [](std::size_t n, Exec e) { return kreg::stereo_audit(params(), n, kSeed, e); });
}

void BM_So4Audit(benchmark::State& state)
{
    const auto sys = kreg::KeplerSystem::from_params(params());
    run(state, [&sys](std::size_t n, Exec e) { return kreg::so4_audit(sys, n, kSeed, e); });
}

void BM_IntertwineAudit(benchmark::State& state)
{
    const auto sys = kreg::KeplerSystem::from_params(params());
    run(state, [&sys](std::size_t n, Exec e) { return kreg::intertwine_audit(sys, n, kSeed, e); });
}

void args(benchmark::internal::Benchmark* b)
{
    for (int n : {64, 512}) {
        b->Args({n, 0})->Args({n, 1});
    }
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_BracketAudit)->Apply(args);
BENCHMARK(BM_StereoAudit)->Apply(args);
BENCHMARK(BM_So4Audit)->Apply(args);
BENCHMARK(BM_IntertwineAudit)->Apply(args);

BENCHMARK_MAIN();
