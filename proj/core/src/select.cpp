#include "mwl/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mwl/stats.hpp"

namespace mwl::select {

std::pair<double, double> anova_f(std::span<const double> feature,
                                  const std::vector<WorkloadClass>& labels) {
    if (feature.size() != labels.size())
        throw Error("anova_f: feature/label length mismatch");
    const std::size_t n = feature.size();
    if (n < 3) throw Error("anova_f: need at least 3 instances");

    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i)
        (labels[i] == WorkloadClass::Suboptimal ? a : b).push_back(feature[i]);
    if (a.empty() || b.empty()) throw Error("anova_f: both classes required");

    double ma = stats::mean(a), mb = stats::mean(b);
    double grand = stats::mean(feature);
    double ss_between = a.size() * (ma - grand) * (ma - grand) +
                        b.size() * (mb - grand) * (mb - grand);
    double ss_within = 0.0;
    for (double v : a) ss_within += (v - ma) * (v - ma);
    for (double v : b) ss_within += (v - mb) * (v - mb);

    double df_within = static_cast<double>(n - 2);
    if (ss_within <= 0.0) {
        if (ss_between <= 0.0) return {0.0, 1.0};
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    double f = ss_between / (ss_within / df_within);
    return {f, stats::f_sf(f, 1.0, df_within)};
}

FeatureRanking rank_features(const dataio::FeatureMatrix& fm) {
    FeatureRanking ranking;
    for (int c = 0; c < fm.n_cols(); ++c) {
        std::span<const double> col(fm.values.col(c).data(),
                                    static_cast<std::size_t>(fm.n_rows()));
        auto [f, p] = anova_f(col, fm.labels);
        ranking.push_back({fm.columns[static_cast<std::size_t>(c)], f, p});
    }
    // Stable sort keeps catalog order for ties.
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const RankedFeature& x, const RankedFeature& y) {
                         return x.f_value > y.f_value;
                     });
    return ranking;
}

FeatureRanking select_k_best(const dataio::FeatureMatrix& fm, int k) {
    if (k < 1 || k > fm.n_cols())
        throw Error("select_k_best: k out of range [1, " +
                    std::to_string(fm.n_cols()) + "]");
    auto ranking = rank_features(fm);
    ranking.resize(static_cast<std::size_t>(k));
    return ranking;
}

dataio::FeatureMatrix restrict_columns(const dataio::FeatureMatrix& fm,
                                       const std::vector<std::string>& names) {
    dataio::FeatureMatrix out;
    out.rows = fm.rows;
    out.labels = fm.labels;
    out.columns = names;
    out.values.resize(fm.values.rows(), static_cast<long>(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
        int c = fm.column_index(names[i]);
        if (c < 0) throw Error("restrict_columns: unknown feature '" + names[i] + "'");
        out.values.col(static_cast<long>(i)) = fm.values.col(c);
    }
    return out;
}

SelectionResult iterative_k_search(const dataio::FeatureMatrix& fm,
                                   const AccuracyFn& accuracy) {
    if (fm.n_cols() < 2) throw Error("iterative_k_search: need >= 2 features");
    auto ranking = rank_features(fm);

    SelectionResult res;
    int best_k = 0;
    double best_acc = -1.0;
    for (int k = fm.n_cols(); k >= 1; k /= 2) {
        std::vector<std::string> names;
        for (int i = 0; i < k; ++i)
            names.push_back(ranking[static_cast<std::size_t>(i)].name);
        double acc = accuracy(fm, names);
        res.trace.emplace_back(k, acc);
        if (acc > best_acc) {
            best_acc = acc;
            best_k = k;
        } else {
            break;  // first decrease stops the halving
        }
        if (k == 1) break;
    }
    res.k = best_k;
    for (int i = 0; i < best_k; ++i)
        res.chosen.push_back(ranking[static_cast<std::size_t>(i)].name);
    return res;
}

SelectionResult multicollinearity_filter(const dataio::FeatureMatrix& fm,
                                         const FeatureRanking& ranking,
                                         double threshold) {
    if (ranking.size() < 2)
        throw Error("multicollinearity_filter: need >= 2 chosen features");

    SelectionResult res;
    std::vector<std::span<const double>> retained_cols;
    for (const auto& rf : ranking) {
        int c = fm.column_index(rf.name);
        if (c < 0) throw Error("multicollinearity_filter: unknown feature '" +
                               rf.name + "'");
        std::span<const double> col(fm.values.col(c).data(),
                                    static_cast<std::size_t>(fm.n_rows()));
        bool keep = true;
        for (const auto& kept : retained_cols) {
            if (std::abs(stats::pearson(col, kept)) > threshold) {
                keep = false;
                break;
            }
        }
        if (keep) {
            res.chosen.push_back(rf.name);
            retained_cols.push_back(col);
        } else {
            res.dropped_correlated.push_back(rf.name);
        }
    }
    res.k = static_cast<int>(res.chosen.size());
    res.correlation.resize(res.k, res.k);
    for (int i = 0; i < res.k; ++i)
        for (int j = 0; j < res.k; ++j)
            res.correlation(i, j) =
                i == j ? 1.0
                       : stats::pearson(retained_cols[static_cast<std::size_t>(i)],
                                        retained_cols[static_cast<std::size_t>(j)]);
    return res;
}

}  // namespace mwl::select
