#include <benchmark/benchmark.h>

#include "snn/model.hpp"

namespace {

void BM_EvolveTo(benchmark::State& state) {
    const auto p = snn::default_excitatory_params();
    // Fresh state each time so c never decays into denormals.
    snn::NeuronState s0;
    s0.v = 12.0;
    s0.c = 0.7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(s0);
        benchmark::DoNotOptimize(snn::evolve_to(s0, p, 1.0));
    }
}
BENCHMARK(BM_EvolveTo);

void BM_PropagatorApply(benchmark::State& state) {
    const auto p = snn::default_excitatory_params();
    const snn::Propagator prop(p, 1.0);
    snn::NeuronState s0;
    s0.v = 12.0;
    s0.c = 0.7;
    for (auto _ : state) {
        auto s = s0;
        benchmark::DoNotOptimize(s);
        prop.apply(s);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_PropagatorApply);

void BM_ExternalDrive(benchmark::State& state) {
    const snn::ExternalDriveSampler sampler(snn::default_external_drive(), 1);
    snn::Step step = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler(17, step++));
    }
}
BENCHMARK(BM_ExternalDrive);

}  // namespace
