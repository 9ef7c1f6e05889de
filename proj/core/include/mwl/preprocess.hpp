#pragma once

#include <cstdint>
#include <set>
#include <span>

#include "mwl/types.hpp"

namespace mwl::preprocess {

/// Subtracts the cross-channel mean at every sample. Requires >= 2 channels.
EegRecording average_rereference(const EegRecording& rec);

/// Zero-phase 4th-order Butterworth high-pass at 1 Hz (forward-backward,
/// 1 s odd-reflection padding at each end).
EegRecording highpass_1hz(const EegRecording& rec, int order = 4);

struct IcaOptions {
    int max_iterations = 200;
    double tolerance = 1e-4;
    std::uint64_t seed = 0;
    int n_components = -1;  // -1: all channels
};

struct IcaDecomposition {
    Matrix mixing;    // n_channels x n_components
    Matrix unmixing;  // n_components x n_channels (applied to centered data)
    Matrix sources;   // n_samples x n_components
    Vector channel_means;
    bool converged = true;
    int iterations = 0;
};

/// Symmetric FastICA with tanh contrast on PCA-whitened data.
/// Deterministic given the seed. On non-convergence the whitened PCA
/// decomposition is still returned with converged = false.
IcaDecomposition fast_ica(const Matrix& samples, const IcaOptions& opts = {});

/// sources * mixing^T + channel means, with the listed components zeroed.
Matrix reconstruct(const IcaDecomposition& dec, const std::set<int>& zeroed = {});

struct ComponentStats {
    Vector spectral_kurtosis;  // kurtosis of Welch PSD values over 1-45 Hz
    Vector slope;              // log-log PSD slope over 1-45 Hz
    Vector hurst;              // rescaled-range estimate
    Vector gradient_median;    // median |first difference|
    // z-scores across components, one column per statistic above.
    Matrix z;  // n_components x 4
    std::vector<bool> degenerate;  // constant components (z forced to 0)
};

ComponentStats component_stats(const IcaDecomposition& dec, double sampling_rate_hz);

/// Components with |z| > threshold on any of the four statistics.
std::set<int> flag_bad_components(const ComponentStats& stats, double threshold = 3.0);

/// Rescaled-range Hurst estimate over dyadic window sizes 16..n/4.
double hurst_exponent(std::span<const double> x);

struct DenoiseOptions {
    IcaOptions ica;
    double z_threshold = 3.0;
    int filter_order = 4;
};

struct DenoiseReport {
    int subject_id = 0;
    Condition condition = Condition::Rest;
    std::vector<int> removed_components;
    ComponentStats stats;
    bool ica_converged = true;
};

/// Full pipeline: re-reference, high-pass, ICA, flag, zero, reconstruct.
std::pair<EegRecording, DenoiseReport> denoise(const EegRecording& rec,
                                               const DenoiseOptions& opts = {});

}  // namespace mwl::preprocess
