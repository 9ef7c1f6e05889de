#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mwl/dataio.hpp"
#include "mwl/types.hpp"

namespace mwl::synth {

/// Gaussian-copula generator fitted on tabular rows: per-field empirical
/// marginals plus a rank-based normal-score correlation matrix (eigenvalue
/// floor keeps it positive semi-definite).
struct CopulaModel {
    std::vector<std::string> fields;
    std::vector<std::vector<double>> marginals;  // sorted values per field
    Matrix correlation;
};

CopulaModel fit_copula(const Matrix& rows, const std::vector<std::string>& fields);

/// Draws n rows: correlated normals -> normal CDF -> inverse empirical CDF of
/// each marginal. Deterministic per seed; constant fields stay constant.
Matrix generate(const CopulaModel& model, int n, std::uint64_t seed);

/// Jensen-Shannon distance between two histograms (renormalized internally),
/// entropies in bits so the result lies in [0, 1].
double js_distance(std::span<const double> p, std::span<const double> q);

/// Equal-width histogram with the given bin count over [lo, hi]; values
/// outside the range are clamped to the edge bins. lo == hi puts all mass in
/// bin 0.
std::vector<double> histogram(std::span<const double> x, double lo, double hi,
                              int bins);

/// 100 * (1 - mean |r_orig - r_synth| / 2) over all field pairs.
double field_correlation_stability(const Matrix& original, const Matrix& synthetic);

/// PCA on the standardized original (components covering >= 95% variance,
/// max 5, truncated to rank); both datasets projected; per-component JSD on
/// 20-bin histograms over the pooled range; 100 * (1 - mean JSD).
double deep_structure_stability(const Matrix& original, const Matrix& synthetic);

/// Per-field JSD on 20-bin histograms over the pooled per-field range;
/// 100 * (1 - mean JSD).
double field_distribution_stability(const Matrix& original, const Matrix& synthetic);

struct SyntheticQualityReport {
    double field_correlation_stability = 0.0;
    double deep_structure_stability = 0.0;
    double field_distribution_stability = 0.0;
    double overall = 0.0;  // arithmetic mean of the three
    std::string band;      // Excellent / Good / Moderate / Poor / Very Poor

    void save_json(const std::filesystem::path& path) const;
};

/// (80,100] Excellent, (60,80] Good, (40,60] Moderate, (20,40] Poor,
/// [0,20] Very Poor.
std::string quality_band(double overall_percent);

SyntheticQualityReport quality_report(const Matrix& original, const Matrix& synthetic);

/// Appends synthetic rows to a feature matrix: a copula is fitted per
/// (condition, class) stratum and each synthetic row becomes a fresh subject
/// (ids continue past the original maximum) flagged synthetic = true.
/// n_rows is apportioned across strata by their original share.
dataio::FeatureMatrix augment(const dataio::FeatureMatrix& fm, int n_rows,
                              std::uint64_t seed);

}  // namespace mwl::synth
