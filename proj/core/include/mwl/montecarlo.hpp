#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mwl/dataio.hpp"
#include "mwl/learn.hpp"

namespace mwl::montecarlo {

struct ExperimentConfig {
    std::vector<std::string> indexes;        // empty: all present
    std::vector<learn::ModelSpec> learners;  // empty: the three defaults
    double train_fraction = 0.7;
    int iterations = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

/// (train subject ids, test subject ids). Stratified by each subject's class
/// profile so no subject straddles the split; per-stratum train count is
/// round-half-up of fraction * stratum size. Deterministic per seed.
std::pair<std::vector<int>, std::vector<int>> stratified_subject_split(
    const dataio::FeatureMatrix& fm, double fraction, std::uint64_t seed);

struct MetricDistribution {
    std::string index_id;
    std::string learner;
    // metric name -> per-iteration values (accuracy, precision, recall, f1)
    std::map<std::string, std::vector<double>> values;

    double mean(const std::string& metric) const;
    double sd(const std::string& metric) const;  // sample sd
};

struct ExperimentLog {
    std::vector<std::string> notes;  // resampled degenerate folds etc.
};

/// Per iteration: subject split, fit normalizer on train rows only, train,
/// evaluate on test, record the four metrics. Degenerate single-class test
/// folds are resampled with the next derived seed (logged).
MetricDistribution run_single(const dataio::FeatureMatrix& fm,
                              const learn::ModelSpec& learner,
                              const ExperimentConfig& cfg, ExperimentLog* log);

/// All (index, learner) pairs over per-index feature matrices.
std::vector<MetricDistribution> run_experiment(
    const ExperimentConfig& cfg,
    const std::map<std::string, dataio::FeatureMatrix>& fm_by_index,
    ExperimentLog* log = nullptr);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;            // two-tailed
    double p_bonferroni = 1.0; // min(1, m * p)
    bool significant_05 = false;
    bool significant_005 = false;
};

/// Pooled-variance two-sample t; p from t(n_a + n_b - 2).
TTestResult two_tailed_ttest(std::span<const double> a, std::span<const double> b,
                             int m_comparisons);

struct Comparison {
    std::string learner;
    std::string metric;
    std::string index_a;
    std::string index_b;
    TTestResult result;
};

/// Direct at-k vs ta-k comparisons for k = 1..3.
std::vector<Comparison> compare_at_vs_ta(
    const std::vector<MetricDistribution>& dists);

/// Ratio-vs-constituent comparisons (at-k / ta-k against ck-t and c-a).
std::vector<Comparison> compare_ratio_vs_constituents(
    const std::vector<MetricDistribution>& dists);

/// Electrode-count comparisons: at-1/at-3 vs at-2, ta-1/ta-3 vs ta-2.
std::vector<Comparison> compare_ratio_pairs(
    const std::vector<MetricDistribution>& dists);

}  // namespace mwl::montecarlo
