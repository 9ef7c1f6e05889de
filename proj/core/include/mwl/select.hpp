#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mwl/dataio.hpp"

namespace mwl::select {

struct RankedFeature {
    std::string name;
    double f_value = 0.0;
    double p_value = 1.0;
};

/// Sorted descending by F; ties broken by catalog (column) order.
using FeatureRanking = std::vector<RankedFeature>;

/// One-way ANOVA F between the two class groups; p from F(1, n-2).
/// Perfect separation with zero within-group variance yields F = +inf, p = 0.
std::pair<double, double> anova_f(std::span<const double> feature,
                                  const std::vector<WorkloadClass>& labels);

FeatureRanking rank_features(const dataio::FeatureMatrix& fm);

/// Top-k of rank_features; throws if k outside [1, n_features].
FeatureRanking select_k_best(const dataio::FeatureMatrix& fm, int k);

struct SelectionResult {
    std::vector<std::string> chosen;
    int k = 0;
    std::vector<std::pair<int, double>> trace;  // (K, mean accuracy)
    Matrix correlation;  // pairwise Pearson r over the chosen features
    std::vector<std::string> dropped_correlated;
};

/// Mean Monte Carlo accuracy of a candidate feature subset; supplied by the
/// caller so the K search stays decoupled from the evaluation harness.
using AccuracyFn = std::function<double(const dataio::FeatureMatrix&,
                                        const std::vector<std::string>& features)>;

/// Halving search K = n, n/2, n/4, ... while accuracy strictly increases;
/// stops at the first decrease, keeping the previous (best) K.
SelectionResult iterative_k_search(const dataio::FeatureMatrix& fm,
                                   const AccuracyFn& accuracy);

/// Greedy pass in F-rank order; drops a feature whose |r| with any retained
/// feature exceeds the threshold. Result carries the post-filter correlation
/// matrix over the retained set.
SelectionResult multicollinearity_filter(const dataio::FeatureMatrix& fm,
                                         const FeatureRanking& ranking,
                                         double threshold = 0.5);

/// Restricts a feature matrix to the named columns (in the given order).
dataio::FeatureMatrix restrict_columns(const dataio::FeatureMatrix& fm,
                                       const std::vector<std::string>& names);

}  // namespace mwl::select
