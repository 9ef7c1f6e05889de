#pragma once

#include <span>
#include <string>
#include <vector>

#include "mwl/types.hpp"

namespace mwl::bandindex {

enum class Band { Theta, Alpha };

/// Half-open band edges: theta [4, 8) Hz, alpha [8, 12) Hz.
double band_lo_hz(Band b);
double band_hi_hz(Band b);

struct ClusterSpec {
    std::string name;  // c1-t, c2-t, c3-t, c-a
    Band band;
    std::vector<std::string> electrodes;
};

/// The four canonical frontal/parietal clusters.
const std::vector<ClusterSpec>& canonical_clusters();

/// All ten index ids in canonical order:
/// c1-t, c2-t, c3-t, c-a, at-1..3, ta-1..3.
const std::vector<std::string>& index_ids();

/// Non-overlapping windows in temporal order; trailing partial dropped.
std::vector<Matrix> segment_windows(const EegRecording& rec, double window_s = 1.0);

/// Mean of the one-sided Hann periodogram PSD over bins with
/// f_lo <= f < f_hi, floored at 1e-12.
double band_power(std::span<const double> window, double sampling_rate_hz,
                  double f_lo_hz, double f_hi_hz);

/// Arithmetic mean of band_power over the cluster's electrodes.
double cluster_power(const Matrix& window, const ClusterSpec& spec,
                     double sampling_rate_hz,
                     const std::vector<std::string>& channel_names);

/// The ten per-window MWL index series for one (denoised) recording.
std::vector<IndexSeries> compute_indexes(const EegRecording& rec,
                                         double window_s = 1.0);

}  // namespace mwl::bandindex
