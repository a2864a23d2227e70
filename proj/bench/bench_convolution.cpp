// Response convolution: serial direct sum, OpenMP direct sum and the exponential propagator.

#include <benchmark/benchmark.h>

#include "bispec/convolution.hpp"
#include "bispec/probe.hpp"

using namespace bispec;

namespace {

struct Setup {
    StateSpace ss;
    TimeGrid g;
    cvec u;
};

Setup make_setup(int n)
{
    MatterSystem m = MatterSystem::cd(0.15, 0.05, 0.5, -0.7, 0.3, 1.0, 1.5, 0.0);
    Setup s;
    s.ss = state_space(m, Param::J);
    s.g = TimeGrid::make(0, 200, n);
    s.u = make_envelope(EnvelopeKind::Exponential, {5.0, 0, 0}, s.g).amp;
    return s;
}

void BM_DirectSerial(benchmark::State& st)
{
    Setup s = make_setup(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(respond_direct(s.ss, s.g, s.u, false));
    st.SetComplexityN(st.range(0));
}

void BM_DirectParallel(benchmark::State& st)
{
    Setup s = make_setup(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(respond_direct(s.ss, s.g, s.u, true));
    st.SetComplexityN(st.range(0));
}

void BM_Exponential(benchmark::State& st)
{
    Setup s = make_setup(static_cast<int>(st.range(0)));
    ExpStepper e = make_stepper(s.ss, s.g.dt);
    for (auto _ : st) benchmark::DoNotOptimize(respond_exponential(e, s.u));
    st.SetComplexityN(st.range(0));
}

} // namespace

BENCHMARK(BM_DirectSerial)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DirectParallel)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Exponential)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
