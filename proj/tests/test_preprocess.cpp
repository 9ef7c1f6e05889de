#include <cmath>
#include <set>

#include "doctest.h"
#include "mwl/preprocess.hpp"
#include "oracles.hpp"

using namespace mwl;

namespace {

EegRecording make_recording(const Matrix& samples, double fs = 128.0) {
    EegRecording rec;
    rec.subject_id = 1;
    rec.samples = samples;
    rec.sampling_rate_hz = fs;
    for (int c = 0; c < samples.cols(); ++c)
        rec.channel_names.push_back("ch" + std::to_string(c));
    return rec;
}

// Mixture of smooth oscillatory sources through a fixed mixing matrix.
Matrix synthetic_eeg(long n, long nch, std::uint64_t seed) {
    oracle::Rng rng(seed);
    long nsrc = nch;
    Matrix s(n, nsrc);
    for (long j = 0; j < nsrc; ++j) {
        double f = 2.0 + 1.5 * double(j);
        double ph = 2.0 * oracle::kPi * rng.uniform();
        for (long i = 0; i < n; ++i)
            s(i, j) = std::sin(2.0 * oracle::kPi * f * double(i) / 128.0 + ph) +
                      0.3 * rng.gauss();
    }
    Matrix a(nch, nsrc);
    for (long i = 0; i < nch; ++i)
        for (long j = 0; j < nsrc; ++j) a(i, j) = rng.gauss();
    return s * a.transpose();
}

}  // namespace

TEST_CASE("average re-reference zeroes the cross-channel mean") {
    auto rec = make_recording(synthetic_eeg(256, 4, 5));
    auto out = preprocess::average_rereference(rec);
    for (int r = 0; r < out.n_samples(); ++r)
        CHECK(std::abs(out.samples.row(r).mean()) < 1e-12);
    // Channel differences are untouched.
    CHECK((out.samples.col(0) - out.samples.col(1) -
           (rec.samples.col(0) - rec.samples.col(1)))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("high-pass removes a DC offset") {
    Matrix m = synthetic_eeg(2048, 3, 9);
    m.array() += 40.0;  // large offset
    auto out = preprocess::highpass_1hz(make_recording(m));
    for (int c = 0; c < 3; ++c)
        CHECK(std::abs(out.samples.col(c).mean()) < 0.1);
}

TEST_CASE("fast_ica round trip reconstructs the input") {
    Matrix x = synthetic_eeg(2048, 6, 17);
    preprocess::IcaOptions opts;
    opts.seed = 1;
    auto dec = preprocess::fast_ica(x, opts);
    Matrix back = preprocess::reconstruct(dec, {});
    double rel = (back - x).norm() / x.norm();
    CHECK(rel < 1e-6);
}

TEST_CASE("fast_ica is deterministic per seed") {
    Matrix x = synthetic_eeg(1024, 4, 23);
    preprocess::IcaOptions opts;
    opts.seed = 7;
    auto a = preprocess::fast_ica(x, opts);
    auto b = preprocess::fast_ica(x, opts);
    CHECK((a.sources - b.sources).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fast_ica rejects too-short inputs") {
    Matrix x = Matrix::Random(10, 8);
    CHECK_THROWS_AS(preprocess::fast_ica(x), Error);
}

TEST_CASE("an injected blink-like component is the flagged extreme") {
    // Smooth background sources plus one spiky blink train.
    const long n = 19200, nch = 14;
    Matrix x = synthetic_eeg(n, nch, 31);
    x /= x.norm() / std::sqrt(double(n * nch));  // normalize scale
    Vector blink = Vector::Zero(n);
    for (long t = 600; t < n; t += 2400)
        for (long i = 0; i < 64 && t + i < n; ++i)
            blink(t + i) = 40.0 * std::exp(-std::pow((double(i) - 32.0) / 10.0, 2));
    Vector topo = Vector::Zero(nch);
    topo(0) = 1.0;  // frontal-dominant projection
    topo(13) = 0.9;
    topo(2) = 0.5;
    Matrix mixed = x + blink * topo.transpose();

    preprocess::IcaOptions opts;
    opts.seed = 3;
    auto dec = preprocess::fast_ica(mixed, opts);
    auto stats = preprocess::component_stats(dec, 128.0);
    auto flagged = preprocess::flag_bad_components(stats);
    REQUIRE_FALSE(flagged.empty());

    // The flagged component must be the one carrying the blink: its source
    // correlates most strongly with the injected train.
    double best_corr = 0.0;
    long best = 0;
    for (long c = 0; c < dec.sources.cols(); ++c) {
        double num = 0.0, d1 = 0.0, d2 = 0.0;
        for (long i = 0; i < n; ++i) {
            num += dec.sources(i, c) * blink(i);
            d1 += dec.sources(i, c) * dec.sources(i, c);
            d2 += blink(i) * blink(i);
        }
        double corr = std::abs(num) / std::sqrt(d1 * d2);
        if (corr > best_corr) {
            best_corr = corr;
            best = c;
        }
    }
    CHECK(best_corr > 0.8);
    CHECK(flagged.count(int(best)) == 1);
}

TEST_CASE("denoise with a high threshold flags nothing and is lossless") {
    Matrix x = synthetic_eeg(4096, 6, 41);
    auto rec = make_recording(x);
    preprocess::DenoiseOptions opts;
    opts.z_threshold = 1e6;  // nothing can exceed this
    opts.ica.seed = 5;
    auto [clean, report] = preprocess::denoise(rec, opts);
    CHECK(report.removed_components.empty());
    // Compare against the preprocessed (re-referenced + filtered) input.
    auto pre = preprocess::highpass_1hz(preprocess::average_rereference(rec),
                                        opts.filter_order);
    double rel = (clean.samples - pre.samples).norm() / pre.samples.norm();
    CHECK(rel < 1e-6);
}

TEST_CASE("hurst exponent separates noise from a random walk") {
    oracle::Rng rng(13);
    std::vector<double> noise(4096), walk(4096);
    double acc = 0.0;
    for (std::size_t i = 0; i < noise.size(); ++i) {
        noise[i] = rng.gauss();
        acc += noise[i];
        walk[i] = acc;
    }
    double h_noise = preprocess::hurst_exponent(noise);
    double h_walk = preprocess::hurst_exponent(walk);
    CHECK(h_noise == doctest::Approx(0.5).epsilon(0.35));
    CHECK(h_walk > 0.8);
    CHECK(h_walk > h_noise);
}

TEST_CASE("component z-scores are zero-mean unit-scale across components") {
    Matrix x = synthetic_eeg(2048, 8, 53);
    auto dec = preprocess::fast_ica(x, {});
    auto cs = preprocess::component_stats(dec, 128.0);
    REQUIRE(cs.z.rows() >= 2);
    for (int s = 0; s < 4; ++s) {
        double m = cs.z.col(s).mean();
        CHECK(std::abs(m) < 1e-9);
    }
}
