#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "mwl/types.hpp"

namespace mwl::learn {

/// Z-score normalizer fitted on training rows (population sd; sd < 1e-12
/// replaced by 1).
struct Normalizer {
    Vector mean;
    Vector sd;

    static Normalizer fit(const Matrix& train);
    Matrix apply(const Matrix& rows) const;
};

enum class Family { LogisticRegression, LinearSVM, DecisionTree };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct ModelSpec {
    Family family = Family::LogisticRegression;
    double regularization_c = 1.0;  // inverse regularization strength
    double tolerance = 1e-4;
    int max_iterations = 1000;
    int min_samples_split = 2;
    int max_depth = -1;  // -1: unlimited
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;  // child node indices
    WorkloadClass leaf_class = WorkloadClass::Suboptimal;
    double gini_gain = 0.0;
};

/// Fitted classifier with its training-time normalizer attached.
/// Linear families hold weights on normalized inputs; the tree holds
/// its node table. Immutable after fit.
struct TrainedModel {
    Family family = Family::LogisticRegression;
    Vector weights;
    double bias = 0.0;
    std::vector<TreeNode> tree;
    Normalizer normalizer;
    bool converged = true;
    double final_gradient_norm = 0.0;

    void save_json(const std::filesystem::path& path) const;
};

/// Trains on already-normalized X (the caller fits the normalizer so split
/// protocols control leakage). Labels: Suboptimal = -1, SuperOptimal = +1.
TrainedModel train(const ModelSpec& spec, const Matrix& x_normalized,
                   const std::vector<WorkloadClass>& y, std::uint64_t seed,
                   const Normalizer& norm);

/// Raw decision score on normalized rows (margin for linear families,
/// +-1 leaf vote for the tree).
Vector decision_scores(const TrainedModel& model, const Matrix& x_normalized);

/// Applies the attached normalizer and thresholds the score at 0.
std::vector<WorkloadClass> predict(const TrainedModel& model, const Matrix& rows);

struct MetricsReport {
    int tp = 0, tn = 0, fp = 0, fn = 0;
    double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
    bool degenerate_precision = false;  // undefined denominator mapped to 0
    bool degenerate_recall = false;
};

/// SuperOptimal is the positive class.
MetricsReport metrics(const std::vector<WorkloadClass>& predictions,
                      const std::vector<WorkloadClass>& truths);

/// L2-regularized logistic loss and its gradient (used by training and by
/// the finite-difference checks in tests).
double logistic_loss(const Matrix& x, const std::vector<double>& y,
                     const Vector& w, double bias, double c);

}  // namespace mwl::learn
