#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mwl/dataio.hpp"
#include "mwl/types.hpp"

namespace mwl::featex {

enum class Domain { Spectral, Wavelet, Statistical, Temporal };

std::string to_string(Domain d);

/// Dispatch kinds; indexed entries (FFT coefficients, wavelet scales, bins)
/// carry the index in FeatureDef::param.
enum class Kind {
    FftMeanCoefficient,   // param 0..75, fixed 256-point transform
    FundamentalFrequency,
    HumanRangeEnergy,
    Lpcc,                 // param 0..12
    Mfcc,                 // param 0..11
    MaxPowerSpectrum,
    MaxFrequency,
    MedianFrequency,
    PowerBandwidth,
    SpectralCentroid,
    SpectralDecrease,
    SpectralDistance,
    SpectralEntropy,
    SpectralKurtosis,
    SpectralPositiveTurning,
    SpectralRollOff,
    SpectralRollOn,
    SpectralSkewness,
    SpectralSlope,
    SpectralSpread,
    SpectralVariation,
    WaveletAbsMean,       // param = scale index 0..8 (Ricker scale param+1)
    WaveletEnergy,
    WaveletEntropy,
    WaveletStd,
    WaveletVariance,
    Ecdf,                 // param 0..9
    EcdfPercentile,       // param 0 (p=0.2) or 1 (p=0.8)
    EcdfPercentileCount,
    Histogram,            // param 0..9, 10 equal-width bins
    InterquartileRange,
    Kurtosis,
    Max,
    Mean,
    MeanAbsoluteDeviation,
    Median,
    MedianAbsoluteDeviation,
    Min,
    RootMeanSquare,
    Skewness,
    StandardDeviation,
    Variance,
    AbsoluteEnergy,
    AreaUnderCurve,
    Autocorrelation,      // lag-1 Pearson
    Centroid,
    Entropy,
    MeanAbsoluteDiff,
    MeanDiff,
    MedianAbsoluteDiff,
    MedianDiff,
    NegativeTurningPoints,
    NeighbourhoodPeaks,   // radius 10
    PeakToPeak,
    PositiveTurningPoints,
    SignalDistance,
    Slope,
    SumAbsoluteDiff,
    TotalEnergy,
    ZeroCrossingRate,
};

struct FeatureDef {
    std::string name;
    Domain domain;
    Kind kind;
    int param = 0;
};

/// The fixed 210-entry catalog. Per-feature formulas are documented in
/// docs/formats.md; that document is normative for the conventions.
class FeatureCatalog {
public:
    static const FeatureCatalog& standard();

    const std::vector<FeatureDef>& defs() const { return defs_; }
    std::size_t size() const { return defs_.size(); }

    void save_json(const std::filesystem::path& path) const;

private:
    std::vector<FeatureDef> defs_;
};

struct ExtractionResult {
    std::vector<double> values;
    std::vector<bool> imputed;  // degenerate cells mapped to 0
};

/// One finite value per catalog entry. Requires series length >= 16.
ExtractionResult extract_features(std::span<const double> series,
                                  const FeatureCatalog& catalog,
                                  double sampling_rate_hz = 1.0);

/// One row per (subject, condition, index); series whose rating is 5 or
/// missing are dropped (logged into warnings).
dataio::FeatureMatrix extract_all(const std::vector<IndexSeries>& series,
                                  const FeatureCatalog& catalog,
                                  const std::vector<Rating>& ratings,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace mwl::featex
