// Microbenchmarks for the hot paths of the toolkit: windowed band power,
// full-catalog feature extraction, FastICA, and end-to-end denoising of a
// single recording.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "mwl/bandindex.hpp"
#include "mwl/featex.hpp"
#include "mwl/preprocess.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> noisy_tone(std::size_t n, double freq_hz, double fs,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::sin(2.0 * kPi * freq_hz * double(i) / fs) + 0.1 * gauss(rng);
    return x;
}

mwl::EegRecording synthetic_recording(long n_samples, std::uint64_t seed) {
    static const std::vector<std::string> names = {
        "AF3", "F7", "F3", "FC5", "T7",  "P7", "O1",
        "O2",  "P8", "T8", "FC6", "F4",  "F8", "AF4"};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    mwl::EegRecording rec;
    rec.sampling_rate_hz = 128.0;
    rec.channel_names = names;
    rec.samples.resize(n_samples, 14);
    for (long i = 0; i < n_samples; ++i) {
        double t = double(i) / 128.0;
        for (int c = 0; c < 14; ++c)
            rec.samples(i, c) = std::sin(2.0 * kPi * (6.0 + c) * t) +
                                0.5 * gauss(rng);
    }
    return rec;
}

void bm_band_power(benchmark::State& state) {
    auto x = noisy_tone(std::size_t(state.range(0)), 6.0, 128.0, 11);
    for (auto _ : state) {
        double p = mwl::bandindex::band_power(x, 128.0, 4.0, 8.0);
        benchmark::DoNotOptimize(p);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_band_power)->Arg(128)->Arg(256)->Arg(512);

void bm_compute_indexes(benchmark::State& state) {
    auto rec = synthetic_recording(128 * state.range(0), 23);
    for (auto _ : state) {
        auto series = mwl::bandindex::compute_indexes(rec, 1.0);
        benchmark::DoNotOptimize(series);
    }
}
BENCHMARK(bm_compute_indexes)->Arg(30)->Arg(150)->Unit(benchmark::kMillisecond);

void bm_extract_features(benchmark::State& state) {
    auto x = noisy_tone(std::size_t(state.range(0)), 8.0, 1.0, 7);
    const auto& catalog = mwl::featex::FeatureCatalog::standard();
    for (auto _ : state) {
        auto r = mwl::featex::extract_features(x, catalog, 1.0);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(bm_extract_features)->Arg(32)->Arg(150)->Arg(600)
    ->Unit(benchmark::kMillisecond);

void bm_fast_ica(benchmark::State& state) {
    auto rec = synthetic_recording(128 * state.range(0), 5);
    mwl::preprocess::IcaOptions opts;
    for (auto _ : state) {
        auto dec = mwl::preprocess::fast_ica(rec.samples, opts);
        benchmark::DoNotOptimize(dec);
    }
}
BENCHMARK(bm_fast_ica)->Arg(30)->Arg(150)->Unit(benchmark::kMillisecond);

void bm_denoise(benchmark::State& state) {
    auto rec = synthetic_recording(128 * state.range(0), 3);
    mwl::preprocess::DenoiseOptions opts;
    for (auto _ : state) {
        auto [clean, report] = mwl::preprocess::denoise(rec, opts);
        benchmark::DoNotOptimize(clean);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(bm_denoise)->Arg(30)->Arg(150)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
