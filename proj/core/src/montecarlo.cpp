#include "mwl/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "mwl/stats.hpp"

namespace mwl::montecarlo {

void ExperimentConfig::validate() const {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw Error("experiment: train fraction must be in (0, 1)");
    if (iterations < 1) throw Error("experiment: iterations must be >= 1");
}

std::pair<std::vector<int>, std::vector<int>> stratified_subject_split(
    const dataio::FeatureMatrix& fm, double fraction, std::uint64_t seed) {
    // Stratum = the set of classes a subject's instances carry, so a subject
    // whose Rest and Simkap rows land in different classes stays whole.
    std::map<int, std::set<int>> profile;
    for (int r = 0; r < fm.n_rows(); ++r)
        profile[fm.rows[static_cast<std::size_t>(r)].subject_id].insert(
            static_cast<int>(fm.labels[static_cast<std::size_t>(r)]));

    std::map<std::set<int>, std::vector<int>> strata;
    for (const auto& [subj, classes] : profile) strata[classes].push_back(subj);

    bool has_sub = false, has_super = false;
    for (auto c : fm.labels)
        (c == WorkloadClass::SuperOptimal ? has_super : has_sub) = true;
    if (!has_sub || !has_super)
        throw Error("stratified_subject_split: both classes required");
    for (const auto& [classes, subjects] : strata)
        if (subjects.size() < 2)
            throw Error("stratified_subject_split: a stratum has < 2 subjects");

    std::mt19937_64 rng(seed);
    std::vector<int> train, test;
    for (auto& [classes, subjects] : strata) {
        std::vector<int> shuffled = subjects;  // already sorted by map order
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto n_train = static_cast<std::size_t>(
            std::floor(fraction * static_cast<double>(shuffled.size()) + 0.5));
        n_train = std::min(n_train, shuffled.size() - 1);
        n_train = std::max<std::size_t>(n_train, 1);
        train.insert(train.end(), shuffled.begin(),
                     shuffled.begin() + static_cast<long>(n_train));
        test.insert(test.end(), shuffled.begin() + static_cast<long>(n_train),
                    shuffled.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

double MetricDistribution::mean(const std::string& metric) const {
    auto it = values.find(metric);
    if (it == values.end()) throw Error("unknown metric: " + metric);
    return stats::mean(it->second);
}

double MetricDistribution::sd(const std::string& metric) const {
    auto it = values.find(metric);
    if (it == values.end()) throw Error("unknown metric: " + metric);
    return stats::stddev_sample(it->second);
}

namespace {

struct SplitRows {
    Matrix x_train, x_test;
    std::vector<WorkloadClass> y_train, y_test;
};

SplitRows rows_for_split(const dataio::FeatureMatrix& fm,
                         const std::vector<int>& train_subjects,
                         const std::vector<int>& test_subjects) {
    auto contains = [](const std::vector<int>& v, int s) {
        return std::binary_search(v.begin(), v.end(), s);
    };
    std::vector<int> tr, te;
    for (int r = 0; r < fm.n_rows(); ++r) {
        int subj = fm.rows[static_cast<std::size_t>(r)].subject_id;
        if (contains(train_subjects, subj)) tr.push_back(r);
        else if (contains(test_subjects, subj)) te.push_back(r);
    }
    SplitRows s;
    s.x_train.resize(static_cast<long>(tr.size()), fm.values.cols());
    s.x_test.resize(static_cast<long>(te.size()), fm.values.cols());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        s.x_train.row(static_cast<long>(i)) = fm.values.row(tr[i]);
        s.y_train.push_back(fm.labels[static_cast<std::size_t>(tr[i])]);
    }
    for (std::size_t i = 0; i < te.size(); ++i) {
        s.x_test.row(static_cast<long>(i)) = fm.values.row(te[i]);
        s.y_test.push_back(fm.labels[static_cast<std::size_t>(te[i])]);
    }
    return s;
}

bool single_class(const std::vector<WorkloadClass>& y) {
    if (y.empty()) return true;
    for (auto c : y)
        if (c != y.front()) return false;
    return true;
}

}  // namespace

MetricDistribution run_single(const dataio::FeatureMatrix& fm,
                              const learn::ModelSpec& learner,
                              const ExperimentConfig& cfg, ExperimentLog* log) {
    cfg.validate();
    MetricDistribution dist;
    dist.index_id = fm.n_rows() ? fm.rows.front().index_id : "";
    dist.learner = learn::to_string(learner.family);
    for (const char* m : {"accuracy", "precision", "recall", "f1"})
        dist.values[m] = {};

    for (int it = 0; it < cfg.iterations; ++it) {
        std::uint64_t iter_seed = stats::derive_seed(cfg.seed, static_cast<std::uint64_t>(it));
        SplitRows s;
        // Degenerate folds are resampled with the next derived sub-seed.
        for (int attempt = 0;; ++attempt) {
            if (attempt > 50)
                throw Error("run_single: could not draw a two-class test fold");
            auto [train_ids, test_ids] = stratified_subject_split(
                fm, cfg.train_fraction, stats::derive_seed(iter_seed, static_cast<std::uint64_t>(attempt)));
            s = rows_for_split(fm, train_ids, test_ids);
            if (!single_class(s.y_test) && !single_class(s.y_train)) break;
            if (log)
                log->notes.push_back("iteration " + std::to_string(it) +
                                     ": degenerate fold resampled");
        }
        auto norm = learn::Normalizer::fit(s.x_train);
        Matrix xt = norm.apply(s.x_train);
        auto model = learn::train(learner, xt, s.y_train, iter_seed, norm);
        auto preds = learn::predict(model, s.x_test);
        auto rep = learn::metrics(preds, s.y_test);
        dist.values["accuracy"].push_back(rep.accuracy);
        dist.values["precision"].push_back(rep.precision);
        dist.values["recall"].push_back(rep.recall);
        dist.values["f1"].push_back(rep.f1);
    }
    return dist;
}

std::vector<MetricDistribution> run_experiment(
    const ExperimentConfig& cfg,
    const std::map<std::string, dataio::FeatureMatrix>& fm_by_index,
    ExperimentLog* log) {
    cfg.validate();
    std::vector<learn::ModelSpec> learners = cfg.learners;
    if (learners.empty()) {
        learn::ModelSpec lr, svm, tree;
        lr.family = learn::Family::LogisticRegression;
        svm.family = learn::Family::LinearSVM;
        tree.family = learn::Family::DecisionTree;
        learners = {lr, svm, tree};
    }
    std::vector<std::string> indexes = cfg.indexes;
    if (indexes.empty())
        for (const auto& [id, fm] : fm_by_index) indexes.push_back(id);

    std::vector<MetricDistribution> out;
    for (const auto& id : indexes) {
        auto it = fm_by_index.find(id);
        if (it == fm_by_index.end())
            throw Error("run_experiment: no feature matrix for index " + id);
        for (const auto& learner : learners) {
            auto dist = run_single(it->second, learner, cfg, log);
            dist.index_id = id;
            out.push_back(std::move(dist));
        }
    }
    return out;
}

TTestResult two_tailed_ttest(std::span<const double> a, std::span<const double> b,
                             int m_comparisons) {
    if (a.size() < 2 || b.size() < 2)
        throw Error("two_tailed_ttest: need n >= 2 in each sample");
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double ma = stats::mean(a), mb = stats::mean(b);
    double va = stats::variance_sample(a), vb = stats::variance_sample(b);
    double df = na + nb - 2.0;
    double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / df;

    TTestResult r;
    if (pooled <= 0.0) {
        if (ma == mb) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = ma > mb ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
            r.p = 0.0;
        }
    } else {
        r.t = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
        r.p = stats::t_two_tailed_p(r.t, df);
    }
    r.p_bonferroni = std::min(1.0, static_cast<double>(std::max(m_comparisons, 1)) * r.p);
    r.significant_05 = r.p < 0.05;
    r.significant_005 = r.p_bonferroni < 0.05;
    return r;
}

namespace {

const MetricDistribution* find_dist(const std::vector<MetricDistribution>& dists,
                                    const std::string& index,
                                    const std::string& learner) {
    for (const auto& d : dists)
        if (d.index_id == index && d.learner == learner) return &d;
    return nullptr;
}

std::vector<Comparison> run_pairs(
    const std::vector<MetricDistribution>& dists,
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::set<std::string> learners;
    for (const auto& d : dists) learners.insert(d.learner);
    const std::vector<std::string> metrics = {"accuracy", "precision", "recall", "f1"};

    // Bonferroni m = number of comparisons emitted per metric.
    int m = static_cast<int>(pairs.size() * learners.size());
    std::vector<Comparison> out;
    for (const auto& learner : learners) {
        for (const auto& [ia, ib] : pairs) {
            const auto* da = find_dist(dists, ia, learner);
            const auto* db = find_dist(dists, ib, learner);
            if (!da || !db)
                throw Error("compare: missing distribution for " + ia + " or " + ib);
            for (const auto& metric : metrics) {
                Comparison c;
                c.learner = learner;
                c.metric = metric;
                c.index_a = ia;
                c.index_b = ib;
                c.result = two_tailed_ttest(da->values.at(metric),
                                            db->values.at(metric), m);
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

}  // namespace

std::vector<Comparison> compare_at_vs_ta(
    const std::vector<MetricDistribution>& dists) {
    static const std::vector<std::pair<std::string, std::string>> pairs = {
        {"at-1", "ta-1"}, {"at-2", "ta-2"}, {"at-3", "ta-3"},
    };
    return run_pairs(dists, pairs);
}

std::vector<Comparison> compare_ratio_vs_constituents(
    const std::vector<MetricDistribution>& dists) {
    static const std::vector<std::pair<std::string, std::string>> pairs = {
        {"at-1", "c1-t"}, {"at-1", "c-a"}, {"at-2", "c2-t"}, {"at-2", "c-a"},
        {"at-3", "c3-t"}, {"at-3", "c-a"}, {"ta-1", "c1-t"}, {"ta-1", "c-a"},
        {"ta-2", "c2-t"}, {"ta-2", "c-a"}, {"ta-3", "c3-t"}, {"ta-3", "c-a"},
    };
    return run_pairs(dists, pairs);
}

std::vector<Comparison> compare_ratio_pairs(
    const std::vector<MetricDistribution>& dists) {
    static const std::vector<std::pair<std::string, std::string>> pairs = {
        {"at-1", "at-2"}, {"at-3", "at-2"}, {"ta-1", "ta-2"}, {"ta-3", "ta-2"},
    };
    return run_pairs(dists, pairs);
}

}  // namespace mwl::montecarlo
