// Serial references against their OpenMP versions.
//   bench_kernels --benchmark_filter=Covariance
#include <benchmark/benchmark.h>

#include "mls/kernels.hpp"
#include "mls/simharness.hpp"

namespace {

mls::Matrix locations(std::size_t n) {
    return mls::sample_locations(mls::SamplingDesign{}, n, 42);
}

const mls::CovarianceSpec kCov{mls::CovarianceFamily::Exponential, 1.0, 0.2, 0.5, 0.0};

void BM_CovarianceSerial(benchmark::State& state) {
    const auto locs = locations(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mls::kernels::covariance_matrix_serial(kCov, locs));
    state.SetComplexityN(state.range(0));
}

void BM_CovarianceParallel(benchmark::State& state) {
    const auto locs = locations(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mls::kernels::covariance_matrix(kCov, locs));
    state.SetComplexityN(state.range(0));
}

BENCHMARK(BM_CovarianceSerial)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_CovarianceParallel)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oNSquared);

// One study cell; range(0) is the worker count.
void BM_StudyCell(benchmark::State& state) {
    mls::StudyConfig c;
    c.repetitions = 8;
    c.error_sds = {0.1};
    const mls::StudyCell cell{0.5, 0.1, c.covariances[0], mls::Method::PMLS, mls::PenaltyFamily::Lasso, 100};
    for (auto _ : state) benchmark::DoNotOptimize(mls::run_cell(c, cell, static_cast<int>(state.range(0))));
}

BENCHMARK(BM_StudyCell)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
