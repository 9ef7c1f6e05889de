#include "mwl/demo.hpp"

#include <cmath>
#include <random>
#include <set>

#include "mwl/stats.hpp"

namespace mwl::demo {

namespace {

const std::vector<std::string> kChannels = {"AF3", "F7", "F3", "FC5", "T7",
                                            "P7",  "O1", "O2", "P8",  "T8",
                                            "FC6", "F4", "F8", "AF4"};

const std::set<std::string> kFrontal = {"AF3", "AF4", "F3", "F4", "F7", "F8"};
const std::set<std::string> kParietal = {"P7", "P8"};

double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gauss(std::mt19937_64& rng) {
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * uniform(rng));
}

Matrix synth_recording(int subject, Condition cond, const DemoOptions& opts) {
    auto n = static_cast<long>(std::lround(opts.duration_s * opts.sampling_rate_hz));
    std::mt19937_64 rng(stats::derive_seed(
        opts.seed, static_cast<std::uint64_t>(subject) * 2 +
                       (cond == Condition::Simkap ? 1 : 0)));

    // Simkap carries ~50% more frontal theta and mildly suppressed parietal
    // alpha, the textbook workload signature the pipeline should recover.
    double jitter = 0.9 + 0.2 * uniform(rng);
    bool loaded = cond == Condition::Simkap;
    double theta_amp = (loaded ? 12.0 : 8.0) * jitter;
    double alpha_amp = (loaded ? 7.0 : 9.0) * jitter;

    Matrix m(n, static_cast<long>(kChannels.size()));
    const double dt = 1.0 / opts.sampling_rate_hz;
    for (std::size_t c = 0; c < kChannels.size(); ++c) {
        double theta_phase = 2.0 * M_PI * uniform(rng);
        double alpha_phase = 2.0 * M_PI * uniform(rng);
        bool frontal = kFrontal.count(kChannels[c]) > 0;
        bool parietal = kParietal.count(kChannels[c]) > 0;
        for (long t = 0; t < n; ++t) {
            double v = 5.0 * gauss(rng);  // broadband background, microvolts
            double time = static_cast<double>(t) * dt;
            if (frontal)
                v += theta_amp * std::sin(2.0 * M_PI * 6.0 * time + theta_phase);
            if (parietal)
                v += alpha_amp * std::sin(2.0 * M_PI * 10.0 * time + alpha_phase);
            m(t, static_cast<long>(c)) = v;
        }
    }
    return m;
}

}  // namespace

dataio::DatasetManifest write_demo_cohort(const std::filesystem::path& dir,
                                          const DemoOptions& opts) {
    if (opts.n_subjects < 4) throw Error("demo cohort: need >= 4 subjects");
    if (opts.duration_s < 16.0)
        throw Error("demo cohort: need >= 16 s per recording");
    std::filesystem::create_directories(dir);

    dataio::DatasetManifest m;
    m.root = dir;
    m.sampling_rate_hz = opts.sampling_rate_hz;
    m.channel_names = kChannels;

    std::vector<Rating> ratings;
    for (int s = 1; s <= opts.n_subjects; ++s) {
        for (Condition cond : {Condition::Rest, Condition::Simkap}) {
            char name[32];
            std::snprintf(name, sizeof(name), "sub%02d_%s.txt", s,
                          cond == Condition::Rest ? "lo" : "hi");
            auto path = dir / name;
            dataio::save_matrix_txt(synth_recording(s, cond, opts), path);
            m.entries.push_back({path, s, cond});
        }
        ratings.push_back({s, Condition::Rest, 2 + (s % 3)});    // 2..4
        ratings.push_back({s, Condition::Simkap, 6 + (s % 3)});  // 6..8
    }
    m.ratings_file = dir / "ratings.txt";
    dataio::save_ratings(ratings, m.ratings_file);
    dataio::save_manifest(m, dir / "manifest.json");
    m.validate();
    return m;
}

}  // namespace mwl::demo
