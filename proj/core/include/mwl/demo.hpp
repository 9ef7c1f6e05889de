#pragma once

#include <cstdint>
#include <filesystem>

#include "mwl/dataio.hpp"

namespace mwl::demo {

struct DemoOptions {
    int n_subjects = 24;
    double duration_s = 40.0;
    double sampling_rate_hz = 128.0;
    std::uint64_t seed = 42;
};

/// Deterministically generates a self-contained demo cohort in `dir`:
/// sub{NN}_lo.txt / sub{NN}_hi.txt recordings, ratings.txt, manifest.json.
/// The Simkap condition carries boosted frontal theta so the pipeline has a
/// real class signal. Returns the written manifest.
dataio::DatasetManifest write_demo_cohort(const std::filesystem::path& dir,
                                          const DemoOptions& opts = {});

}  // namespace mwl::demo
