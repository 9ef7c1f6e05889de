#include <cmath>
#include <vector>

#include "doctest.h"
#include "mwl/dsp.hpp"
#include "oracles.hpp"

using namespace mwl;

namespace {
std::vector<double> sine(std::size_t n, double freq_hz, double fs,
                         double amp = 1.0, double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = amp * std::sin(2.0 * oracle::kPi * freq_hz * double(i) / fs + phase);
    return x;
}
}  // namespace

TEST_CASE("fft matches the direct-summation oracle") {
    oracle::Rng rng(11);
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
        std::vector<double> x(n);
        for (auto& v : x) v = rng.gauss();
        auto fast = dsp::dft(x);
        auto ref = oracle::dft(x);
        for (std::size_t k = 0; k < n; ++k)
            CHECK(std::abs(fast[k] - ref[k]) < 1e-9 * (1.0 + std::abs(ref[k])));
    }
}

TEST_CASE("non-power-of-two lengths use an equivalent direct transform") {
    oracle::Rng rng(3);
    std::vector<double> x(21);
    for (auto& v : x) v = rng.gauss();
    auto got = dsp::dft(x);
    auto ref = oracle::dft(x);
    for (std::size_t k = 0; k < x.size(); ++k)
        CHECK(std::abs(got[k] - ref[k]) < 1e-9 * (1.0 + std::abs(ref[k])));
}

TEST_CASE("periodogram recovers unit sinusoid amplitude at a bin center") {
    // 8 Hz tone, 128 samples @ 128 Hz: exactly bin 8.
    auto x = sine(128, 8.0, 128.0);
    auto psd = dsp::periodogram(x, 128.0);
    // One-sided amplitude-corrected convention: a unit sinusoid carries
    // power 2 * (1/2)^2 = 0.5 at its bin.
    CHECK(psd.freq_hz[8] == doctest::Approx(8.0));
    // The symmetric Hann window (n-1 denominator) leaks a sliver into the
    // neighbours, so the bin-center value is 0.5 only to ~1e-4 relative.
    CHECK(psd.power[8] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("periodogram matches the reference implementation bin by bin") {
    oracle::Rng rng(7);
    std::vector<double> x(64);
    for (auto& v : x) v = rng.gauss();
    auto got = dsp::periodogram(x, 100.0);
    auto ref = oracle::periodogram(x, 100.0);
    REQUIRE(got.power.size() == ref.power.size());
    for (std::size_t k = 0; k < ref.power.size(); ++k) {
        CHECK(got.freq_hz[k] == doctest::Approx(ref.freq[k]));
        CHECK(got.power[k] == doctest::Approx(ref.power[k]).epsilon(1e-9));
    }
}

TEST_CASE("welch averages segment periodograms") {
    auto x = sine(512, 10.0, 128.0);
    auto psd = dsp::welch(x, 128.0, 128);
    std::size_t peak = 0;
    for (std::size_t k = 1; k < psd.power.size(); ++k)
        if (psd.power[k] > psd.power[peak]) peak = k;
    CHECK(psd.freq_hz[peak] == doctest::Approx(10.0));
    // Segment length clamps to the signal length.
    auto clamped = dsp::welch(x, 128.0, 4096);
    CHECK(clamped.power.size() == x.size() / 2 + 1);
}

TEST_CASE("butterworth high-pass attenuates DC by at least 40 dB") {
    auto sections = dsp::butterworth_highpass(4, 1.0, 128.0);
    std::vector<double> dc(1024, 1.0);
    auto y = dsp::filtfilt(sections, dc, 128);
    double out_rms = 0.0;
    for (double v : y) out_rms += v * v;
    out_rms = std::sqrt(out_rms / double(y.size()));
    CHECK(20.0 * std::log10(std::max(out_rms, 1e-300)) < -40.0);
}

TEST_CASE("high-pass preserves in-band tones") {
    auto x = sine(2048, 10.0, 128.0);
    auto sections = dsp::butterworth_highpass(4, 1.0, 128.0);
    auto y = dsp::filtfilt(sections, x, 128);
    double ex = 0.0, ey = 0.0;
    for (std::size_t i = 256; i + 256 < x.size(); ++i) {
        ex += x[i] * x[i];
        ey += y[i] * y[i];
    }
    CHECK(ey / ex == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("filtfilt is zero-phase") {
    // A symmetric pulse must stay centered after forward-backward filtering.
    std::vector<double> x(513, 0.0);
    for (int i = -16; i <= 16; ++i)
        x[std::size_t(256 + i)] = std::exp(-double(i * i) / 32.0);
    auto sections = dsp::butterworth_highpass(4, 1.0, 128.0);
    auto y = dsp::filtfilt(sections, x, 128);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[peak]) peak = i;
    CHECK(peak == 256);
}

TEST_CASE("invalid filter parameters throw") {
    CHECK_THROWS(dsp::butterworth_highpass(3, 1.0, 128.0));
    CHECK_THROWS(dsp::butterworth_highpass(4, 0.0, 128.0));
    CHECK_THROWS(dsp::butterworth_highpass(4, 70.0, 128.0));
}
