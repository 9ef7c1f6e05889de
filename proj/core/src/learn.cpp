#include "mwl/learn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace mwl::learn {

namespace {

std::vector<double> signed_labels(const std::vector<WorkloadClass>& y) {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = y[i] == WorkloadClass::SuperOptimal ? 1.0 : -1.0;
    return out;
}

void require_both_classes(const std::vector<WorkloadClass>& y) {
    bool has_pos = false, has_neg = false;
    for (auto c : y) (c == WorkloadClass::SuperOptimal ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw Error("train: both classes must be present");
}

TrainedModel train_logistic(const ModelSpec& spec, const Matrix& x,
                            const std::vector<double>& y) {
    const long n = x.rows(), d = x.cols();
    TrainedModel m;
    m.family = Family::LogisticRegression;
    m.weights = Vector::Zero(d);
    m.bias = 0.0;

    const double lambda = 1.0 / spec.regularization_c;
    for (int it = 0; it < spec.max_iterations; ++it) {
        Vector z = x * m.weights + Vector::Constant(n, m.bias);
        Vector p(n), dgrad(n), hdiag(n);
        for (long i = 0; i < n; ++i) {
            double s = 1.0 / (1.0 + std::exp(-z(i)));
            p(i) = s;
            dgrad(i) = s - (y[static_cast<std::size_t>(i)] > 0 ? 1.0 : 0.0);
            hdiag(i) = std::max(s * (1.0 - s), 1e-10);
        }
        Vector gw = x.transpose() * dgrad + lambda * m.weights;
        double gb = dgrad.sum();
        double gnorm = std::sqrt(gw.squaredNorm() + gb * gb);
        m.final_gradient_norm = gnorm;
        if (gnorm <= spec.tolerance) {
            m.converged = true;
            return m;
        }
        // Newton step over [w; b].
        Matrix h(d + 1, d + 1);
        Matrix xw = hdiag.asDiagonal() * x;
        h.topLeftCorner(d, d) = x.transpose() * xw;
        h.topLeftCorner(d, d) += lambda * Matrix::Identity(d, d);
        h.topRightCorner(d, 1) = x.transpose() * hdiag;
        h.bottomLeftCorner(1, d) = hdiag.transpose() * x;
        h(d, d) = hdiag.sum();
        Vector g(d + 1);
        g.head(d) = gw;
        g(d) = gb;
        Vector step = h.ldlt().solve(g);
        m.weights -= step.head(d);
        m.bias -= step(d);
    }
    m.converged = false;
    return m;
}

TrainedModel train_svm(const ModelSpec& spec, const Matrix& x,
                       const std::vector<double>& y) {
    // Dual coordinate descent for the L1-loss linear SVM; the bias is
    // handled through an augmented constant feature.
    const long n = x.rows(), d = x.cols();
    const double c = spec.regularization_c;

    Matrix xa(n, d + 1);
    xa.leftCols(d) = x;
    xa.col(d).setOnes();

    Vector alpha = Vector::Zero(n);
    Vector w = Vector::Zero(d + 1);
    Vector qdiag(n);
    for (long i = 0; i < n; ++i) qdiag(i) = xa.row(i).squaredNorm();

    TrainedModel m;
    m.family = Family::LinearSVM;
    m.converged = false;
    int sweeps = std::max(spec.max_iterations, 1);
    for (int it = 0; it < sweeps; ++it) {
        double max_violation = 0.0;
        for (long i = 0; i < n; ++i) {
            double yi = y[static_cast<std::size_t>(i)];
            double g = yi * xa.row(i).dot(w) - 1.0;
            double pg = g;
            if (alpha(i) <= 0.0) pg = std::min(g, 0.0);
            else if (alpha(i) >= c) pg = std::max(g, 0.0);
            max_violation = std::max(max_violation, std::abs(pg));
            if (std::abs(pg) > 1e-14) {
                double old = alpha(i);
                alpha(i) = std::clamp(old - g / qdiag(i), 0.0, c);
                w += (alpha(i) - old) * yi * xa.row(i).transpose();
            }
        }
        m.final_gradient_norm = max_violation;
        if (max_violation <= spec.tolerance) {
            m.converged = true;
            break;
        }
    }
    m.weights = w.head(d);
    m.bias = w(d);
    return m;
}

struct TreeBuilder {
    const Matrix& x;
    const std::vector<WorkloadClass>& y;
    const ModelSpec& spec;
    std::vector<TreeNode> nodes;

    static double gini(int pos, int total) {
        if (total == 0) return 0.0;
        double p = static_cast<double>(pos) / total;
        return 2.0 * p * (1.0 - p);
    }

    int build(const std::vector<int>& idx, int depth) {
        int pos = 0;
        for (int i : idx)
            if (y[static_cast<std::size_t>(i)] == WorkloadClass::SuperOptimal) ++pos;
        const int total = static_cast<int>(idx.size());

        TreeNode node;
        node.leaf_class = pos * 2 > total ? WorkloadClass::SuperOptimal
                                          : WorkloadClass::Suboptimal;

        bool stop = pos == 0 || pos == total ||
                    total < spec.min_samples_split ||
                    (spec.max_depth >= 0 && depth >= spec.max_depth);
        if (!stop) {
            double parent_gini = gini(pos, total);
            double best_gain = 0.0;
            int best_feature = -1;
            double best_threshold = 0.0;
            for (long f = 0; f < x.cols(); ++f) {
                std::vector<int> order = idx;
                std::sort(order.begin(), order.end(), [&](int a, int b) {
                    return x(a, f) < x(b, f);
                });
                int left_pos = 0;
                for (int i = 0; i + 1 < total; ++i) {
                    if (y[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] ==
                        WorkloadClass::SuperOptimal)
                        ++left_pos;
                    double v0 = x(order[static_cast<std::size_t>(i)], f);
                    double v1 = x(order[static_cast<std::size_t>(i + 1)], f);
                    if (v1 <= v0) continue;  // no split between equal values
                    int nl = i + 1, nr = total - nl;
                    double gain = parent_gini -
                                  (static_cast<double>(nl) / total) * gini(left_pos, nl) -
                                  (static_cast<double>(nr) / total) *
                                      gini(pos - left_pos, nr);
                    if (gain > best_gain + 1e-12) {
                        best_gain = gain;
                        best_feature = static_cast<int>(f);
                        best_threshold = 0.5 * (v0 + v1);
                    }
                }
            }
            if (best_feature >= 0 && best_gain > 0.0) {
                std::vector<int> left, right;
                for (int i : idx)
                    (x(i, best_feature) <= best_threshold ? left : right).push_back(i);
                node.feature = best_feature;
                node.threshold = best_threshold;
                node.gini_gain = best_gain;
                int self = static_cast<int>(nodes.size());
                nodes.push_back(node);
                int l = build(left, depth + 1);
                int r = build(right, depth + 1);
                nodes[static_cast<std::size_t>(self)].left = l;
                nodes[static_cast<std::size_t>(self)].right = r;
                return self;
            }
        }
        int self = static_cast<int>(nodes.size());
        nodes.push_back(node);
        return self;
    }
};

TrainedModel train_tree(const ModelSpec& spec, const Matrix& x,
                        const std::vector<WorkloadClass>& y) {
    TrainedModel m;
    m.family = Family::DecisionTree;
    TreeBuilder builder{x, y, spec, {}};
    std::vector<int> idx(static_cast<std::size_t>(x.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(idx, 0);
    m.tree = std::move(builder.nodes);
    return m;
}

WorkloadClass tree_predict_row(const std::vector<TreeNode>& tree,
                               const Eigen::RowVectorXd& row) {
    int node = 0;
    while (tree[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& t = tree[static_cast<std::size_t>(node)];
        node = row(t.feature) <= t.threshold ? t.left : t.right;
    }
    return tree[static_cast<std::size_t>(node)].leaf_class;
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::LogisticRegression: return "logistic";
        case Family::LinearSVM: return "svm";
        case Family::DecisionTree: return "tree";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    if (s == "logistic" || s == "lr") return Family::LogisticRegression;
    if (s == "svm") return Family::LinearSVM;
    if (s == "tree" || s == "dtr") return Family::DecisionTree;
    throw Error("unknown learner family: '" + s + "'");
}

Normalizer Normalizer::fit(const Matrix& train) {
    if (train.rows() == 0) throw Error("Normalizer: empty training set");
    Normalizer n;
    n.mean = train.colwise().mean();
    n.sd.resize(train.cols());
    for (long c = 0; c < train.cols(); ++c) {
        double var =
            (train.col(c).array() - n.mean(c)).square().mean();  // population
        double sd = std::sqrt(var);
        n.sd(c) = sd < 1e-12 ? 1.0 : sd;
    }
    return n;
}

Matrix Normalizer::apply(const Matrix& rows) const {
    if (rows.cols() != mean.size())
        throw Error("Normalizer: arity mismatch");
    Matrix out = rows;
    out.rowwise() -= mean.transpose();
    out.array().rowwise() /= sd.transpose().array();
    return out;
}

double logistic_loss(const Matrix& x, const std::vector<double>& y,
                     const Vector& w, double bias, double c) {
    double loss = w.squaredNorm() / (2.0 * c);
    for (long i = 0; i < x.rows(); ++i) {
        double margin = y[static_cast<std::size_t>(i)] * (x.row(i).dot(w) + bias);
        // log1p(exp(-m)) computed stably.
        loss += margin > 0 ? std::log1p(std::exp(-margin))
                           : -margin + std::log1p(std::exp(margin));
    }
    return loss;
}

TrainedModel train(const ModelSpec& spec, const Matrix& x_normalized,
                   const std::vector<WorkloadClass>& y, std::uint64_t /*seed*/,
                   const Normalizer& norm) {
    if (x_normalized.rows() != static_cast<long>(y.size()))
        throw Error("train: X/y length mismatch");
    require_both_classes(y);
    if (spec.regularization_c <= 0 || spec.tolerance <= 0)
        throw Error("train: hyperparameters must be positive");

    TrainedModel m;
    auto ys = signed_labels(y);
    switch (spec.family) {
        case Family::LogisticRegression:
            m = train_logistic(spec, x_normalized, ys);
            break;
        case Family::LinearSVM:
            m = train_svm(spec, x_normalized, ys);
            break;
        case Family::DecisionTree:
            m = train_tree(spec, x_normalized, y);
            break;
    }
    m.normalizer = norm;
    return m;
}

Vector decision_scores(const TrainedModel& model, const Matrix& x_normalized) {
    if (model.family == Family::DecisionTree) {
        Vector s(x_normalized.rows());
        for (long i = 0; i < x_normalized.rows(); ++i)
            s(i) = tree_predict_row(model.tree, x_normalized.row(i)) ==
                           WorkloadClass::SuperOptimal
                       ? 1.0
                       : -1.0;
        return s;
    }
    if (x_normalized.cols() != model.weights.size())
        throw Error("decision_scores: arity mismatch");
    return x_normalized * model.weights +
           Vector::Constant(x_normalized.rows(), model.bias);
}

std::vector<WorkloadClass> predict(const TrainedModel& model, const Matrix& rows) {
    if (rows.rows() == 0) return {};
    Matrix xn = model.normalizer.apply(rows);
    Vector s = decision_scores(model, xn);
    std::vector<WorkloadClass> out(static_cast<std::size_t>(s.size()));
    for (long i = 0; i < s.size(); ++i)
        out[static_cast<std::size_t>(i)] =
            s(i) > 0 ? WorkloadClass::SuperOptimal : WorkloadClass::Suboptimal;
    return out;
}

MetricsReport metrics(const std::vector<WorkloadClass>& predictions,
                      const std::vector<WorkloadClass>& truths) {
    if (predictions.size() != truths.size())
        throw Error("metrics: prediction/truth length mismatch");
    if (predictions.empty()) throw Error("metrics: empty input");
    MetricsReport r;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        bool pred_pos = predictions[i] == WorkloadClass::SuperOptimal;
        bool true_pos = truths[i] == WorkloadClass::SuperOptimal;
        if (pred_pos && true_pos) ++r.tp;
        else if (pred_pos && !true_pos) ++r.fp;
        else if (!pred_pos && true_pos) ++r.fn;
        else ++r.tn;
    }
    int n = r.tp + r.tn + r.fp + r.fn;
    r.accuracy = static_cast<double>(r.tp + r.tn) / n;
    if (r.tp + r.fp > 0)
        r.precision = static_cast<double>(r.tp) / (r.tp + r.fp);
    else
        r.degenerate_precision = true;
    if (r.tp + r.fn > 0)
        r.recall = static_cast<double>(r.tp) / (r.tp + r.fn);
    else
        r.degenerate_recall = true;
    if (r.precision + r.recall > 0)
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

void TrainedModel::save_json(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model: " + path.string());
    out.precision(17);
    out << "{\n  \"family\": \"" << to_string(family) << "\",\n";
    out << "  \"bias\": " << bias << ",\n  \"weights\": [";
    for (long i = 0; i < weights.size(); ++i)
        out << (i ? ", " : "") << weights(i);
    out << "],\n  \"normalizer_mean\": [";
    for (long i = 0; i < normalizer.mean.size(); ++i)
        out << (i ? ", " : "") << normalizer.mean(i);
    out << "],\n  \"normalizer_sd\": [";
    for (long i = 0; i < normalizer.sd.size(); ++i)
        out << (i ? ", " : "") << normalizer.sd(i);
    out << "],\n  \"tree\": [";
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const auto& t = tree[i];
        out << (i ? ", " : "") << "{\"feature\": " << t.feature
            << ", \"threshold\": " << t.threshold << ", \"left\": " << t.left
            << ", \"right\": " << t.right << ", \"class\": \""
            << mwl::to_string(t.leaf_class) << "\"}";
    }
    out << "]\n}\n";
}

}  // namespace mwl::learn
