#include "mwl/synth.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "json.hpp"
#include "mwl/stats.hpp"

namespace mwl::synth {

namespace {

constexpr double kEigFloor = 1e-10;

/// Average-tie ranks -> normal scores for one column.
std::vector<double> normal_scores(std::span<const double> col) {
    const std::size_t n = col.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && col[order[j + 1]] == col[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = stats::normal_quantile(rank[i] / (static_cast<double>(n) + 1.0));
    return z;
}

Matrix floor_correlation(Matrix c) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    Vector ev = es.eigenvalues();
    bool fixed = false;
    for (long i = 0; i < ev.size(); ++i)
        if (ev(i) < kEigFloor) {
            ev(i) = kEigFloor;
            fixed = true;
        }
    if (!fixed) return c;
    Matrix r = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    // Restore a unit diagonal after the floor.
    for (long i = 0; i < r.rows(); ++i) {
        double d = std::sqrt(r(i, i));
        for (long j = 0; j < r.cols(); ++j) {
            r(i, j) /= d;
            r(j, i) /= d;
        }
        r(i, i) = 1.0;
    }
    return r;
}

/// Inverse empirical CDF: linear-interpolation quantile of the sorted sample.
double inv_ecdf(const std::vector<double>& sorted, double p) {
    return stats::quantile(sorted, std::clamp(p, 0.0, 1.0));
}

/// Deterministic standard normal draws (Box-Muller over mt19937_64 uniforms);
/// std::normal_distribution is implementation-defined, this is not.
class NormalDraw {
  public:
    explicit NormalDraw(std::uint64_t seed) : rng_(seed) {}
    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform_();
        double u2 = uniform_();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

  private:
    double uniform_() {
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

double entropy_bits(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

std::vector<double> column_vec(const Matrix& m, long c) {
    std::vector<double> v(static_cast<std::size_t>(m.rows()));
    for (long r = 0; r < m.rows(); ++r) v[static_cast<std::size_t>(r)] = m(r, c);
    return v;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.cols() != b.cols())
        throw Error(std::string(what) + ": field sets differ (" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
    if (a.rows() == 0 || b.rows() == 0)
        throw Error(std::string(what) + ": empty dataset");
}

}  // namespace

CopulaModel fit_copula(const Matrix& rows, const std::vector<std::string>& fields) {
    if (rows.rows() < 10) throw Error("fit_copula: need >= 10 rows");
    if (rows.cols() < 2) throw Error("fit_copula: need >= 2 fields");
    if (!fields.empty() && static_cast<long>(fields.size()) != rows.cols())
        throw Error("fit_copula: field-name count mismatch");

    CopulaModel model;
    model.fields = fields;
    if (model.fields.empty())
        for (long c = 0; c < rows.cols(); ++c)
            model.fields.push_back("f" + std::to_string(c));

    const long p = rows.cols();
    Matrix z(rows.rows(), p);
    for (long c = 0; c < p; ++c) {
        auto col = column_vec(rows, c);
        auto sorted = col;
        std::sort(sorted.begin(), sorted.end());
        model.marginals.push_back(std::move(sorted));
        auto zc = normal_scores(col);
        for (long r = 0; r < rows.rows(); ++r)
            z(r, c) = zc[static_cast<std::size_t>(r)];
    }

    Matrix corr = Matrix::Identity(p, p);
    for (long i = 0; i < p; ++i)
        for (long j = i + 1; j < p; ++j) {
            double r = stats::pearson(column_vec(z, i), column_vec(z, j));
            corr(i, j) = corr(j, i) = r;
        }
    model.correlation = floor_correlation(corr);
    return model;
}

Matrix generate(const CopulaModel& model, int n, std::uint64_t seed) {
    if (n < 0) throw Error("generate: n must be >= 0");
    const long p = model.correlation.rows();
    Eigen::LLT<Matrix> llt(model.correlation +
                           kEigFloor * Matrix::Identity(p, p));
    if (llt.info() != Eigen::Success)
        throw Error("generate: correlation matrix is not positive definite");
    Matrix chol = llt.matrixL();

    NormalDraw draw(seed);
    Matrix out(n, p);
    Vector g(p);
    for (int r = 0; r < n; ++r) {
        for (long c = 0; c < p; ++c) g(c) = draw();
        Vector z = chol * g;
        for (long c = 0; c < p; ++c) {
            const auto& marg = model.marginals[static_cast<std::size_t>(c)];
            if (marg.front() == marg.back()) {
                out(r, c) = marg.front();  // constant field stays constant
            } else {
                out(r, c) = inv_ecdf(marg, stats::normal_cdf(z(c)));
            }
        }
    }
    return out;
}

std::vector<double> histogram(std::span<const double> x, double lo, double hi,
                              int bins) {
    if (bins < 1) throw Error("histogram: bins must be >= 1");
    std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
    if (x.empty()) return h;
    for (double v : x) {
        int b = 0;
        if (hi > lo) {
            b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
            b = std::clamp(b, 0, bins - 1);
        }
        h[static_cast<std::size_t>(b)] += 1.0;
    }
    for (double& v : h) v /= static_cast<double>(x.size());
    return h;
}

double js_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw Error("js_distance: bin counts differ");
    if (p.empty()) throw Error("js_distance: empty histograms");
    double sp = std::accumulate(p.begin(), p.end(), 0.0);
    double sq = std::accumulate(q.begin(), q.end(), 0.0);
    if (sp <= 0.0 || sq <= 0.0) throw Error("js_distance: all-zero histogram");

    std::vector<double> pn(p.begin(), p.end()), qn(q.begin(), q.end()), m(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        pn[i] /= sp;
        qn[i] /= sq;
        m[i] = 0.5 * (pn[i] + qn[i]);
    }
    double jsd = entropy_bits(m) - 0.5 * (entropy_bits(pn) + entropy_bits(qn));
    return std::clamp(jsd, 0.0, 1.0);
}

double field_correlation_stability(const Matrix& original, const Matrix& synthetic) {
    require_same_shape(original, synthetic, "field_correlation_stability");
    const long p = original.cols();
    if (p < 2) throw Error("field_correlation_stability: need >= 2 fields");
    double sum = 0.0;
    int pairs = 0;
    for (long i = 0; i < p; ++i)
        for (long j = i + 1; j < p; ++j) {
            double ro = stats::pearson(column_vec(original, i), column_vec(original, j));
            double rs = stats::pearson(column_vec(synthetic, i), column_vec(synthetic, j));
            sum += std::abs(ro - rs);
            ++pairs;
        }
    return 100.0 * (1.0 - sum / static_cast<double>(pairs) / 2.0);
}

double deep_structure_stability(const Matrix& original, const Matrix& synthetic) {
    require_same_shape(original, synthetic, "deep_structure_stability");
    const long p = original.cols();
    if (original.rows() < p)
        throw Error("deep_structure_stability: need n >= fields in original");

    // Standardize with the original's statistics (population sd, guard 1).
    Vector mu(p), sd(p);
    for (long c = 0; c < p; ++c) {
        auto col = column_vec(original, c);
        mu(c) = stats::mean(col);
        double s = stats::stddev_pop(col);
        sd(c) = s < 1e-12 ? 1.0 : s;
    }
    auto standardize = [&](const Matrix& m) {
        Matrix z = m;
        for (long c = 0; c < p; ++c)
            z.col(c) = (z.col(c).array() - mu(c)) / sd(c);
        return z;
    };
    Matrix zo = standardize(original);
    Matrix zs = standardize(synthetic);

    Matrix cov = zo.transpose() * zo / static_cast<double>(zo.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    // Eigen returns ascending order; walk from the largest eigenvalue down.
    std::vector<long> idx;
    for (long i = p - 1; i >= 0; --i) idx.push_back(i);
    double total = std::max(es.eigenvalues().sum(), 1e-300);

    std::vector<long> chosen;
    double cum = 0.0;
    for (long i : idx) {
        if (es.eigenvalues()(i) <= 1e-12) break;  // rank truncation
        chosen.push_back(i);
        cum += es.eigenvalues()(i) / total;
        if (cum >= 0.95 || chosen.size() == 5) break;
    }
    if (chosen.empty()) chosen.push_back(idx.front());

    double jsd_sum = 0.0;
    for (long i : chosen) {
        Vector comp = es.eigenvectors().col(i);
        Vector po = zo * comp;
        Vector ps = zs * comp;
        double lo = std::min(po.minCoeff(), ps.minCoeff());
        double hi = std::max(po.maxCoeff(), ps.maxCoeff());
        auto ho = histogram(std::span<const double>(po.data(),
                                                    static_cast<std::size_t>(po.size())),
                            lo, hi, 20);
        auto hs = histogram(std::span<const double>(ps.data(),
                                                    static_cast<std::size_t>(ps.size())),
                            lo, hi, 20);
        jsd_sum += js_distance(ho, hs);
    }
    return 100.0 * (1.0 - jsd_sum / static_cast<double>(chosen.size()));
}

double field_distribution_stability(const Matrix& original, const Matrix& synthetic) {
    require_same_shape(original, synthetic, "field_distribution_stability");
    const long p = original.cols();
    double jsd_sum = 0.0;
    for (long c = 0; c < p; ++c) {
        auto co = column_vec(original, c);
        auto cs = column_vec(synthetic, c);
        double lo = std::min(*std::min_element(co.begin(), co.end()),
                             *std::min_element(cs.begin(), cs.end()));
        double hi = std::max(*std::max_element(co.begin(), co.end()),
                             *std::max_element(cs.begin(), cs.end()));
        jsd_sum += js_distance(histogram(co, lo, hi, 20), histogram(cs, lo, hi, 20));
    }
    return 100.0 * (1.0 - jsd_sum / static_cast<double>(p));
}

std::string quality_band(double overall_percent) {
    if (overall_percent > 80.0) return "Excellent";
    if (overall_percent > 60.0) return "Good";
    if (overall_percent > 40.0) return "Moderate";
    if (overall_percent > 20.0) return "Poor";
    return "Very Poor";
}

SyntheticQualityReport quality_report(const Matrix& original, const Matrix& synthetic) {
    SyntheticQualityReport rep;
    rep.field_correlation_stability = field_correlation_stability(original, synthetic);
    rep.deep_structure_stability = deep_structure_stability(original, synthetic);
    rep.field_distribution_stability = field_distribution_stability(original, synthetic);
    rep.overall = (rep.field_correlation_stability + rep.deep_structure_stability +
                   rep.field_distribution_stability) / 3.0;
    rep.band = quality_band(rep.overall);
    return rep;
}

void SyntheticQualityReport::save_json(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["field_correlation_stability"] = field_correlation_stability;
    j["deep_structure_stability"] = deep_structure_stability;
    j["field_distribution_stability"] = field_distribution_stability;
    j["overall"] = overall;
    j["band"] = band;
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

dataio::FeatureMatrix augment(const dataio::FeatureMatrix& fm, int n_rows,
                              std::uint64_t seed) {
    if (n_rows < 0) throw Error("augment: n_rows must be >= 0");
    fm.validate();

    // Strata keyed by (condition, class); synthesis runs per stratum so the
    // label of every synthetic row is known.
    std::map<std::pair<int, int>, std::vector<int>> strata;
    for (int r = 0; r < fm.n_rows(); ++r) {
        if (fm.rows[static_cast<std::size_t>(r)].synthetic) continue;
        strata[{static_cast<int>(fm.rows[static_cast<std::size_t>(r)].condition),
                static_cast<int>(fm.labels[static_cast<std::size_t>(r)])}]
            .push_back(r);
    }
    int n_original = 0;
    for (const auto& [key, rows] : strata) n_original += static_cast<int>(rows.size());
    if (n_original == 0) throw Error("augment: no original rows");

    int next_subject = 0;
    for (const auto& rk : fm.rows) next_subject = std::max(next_subject, rk.subject_id);
    ++next_subject;

    dataio::FeatureMatrix out = fm;
    // Largest-remainder apportionment of n_rows across strata.
    std::vector<std::pair<std::pair<int, int>, int>> alloc;
    int assigned = 0;
    std::vector<std::pair<double, std::size_t>> remainders;
    for (const auto& [key, rows] : strata) {
        double exact = static_cast<double>(n_rows) * rows.size() / n_original;
        int base = static_cast<int>(std::floor(exact));
        alloc.push_back({key, base});
        remainders.push_back({exact - base, alloc.size() - 1});
        assigned += base;
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n_rows && i < remainders.size(); ++i, ++assigned)
        ++alloc[remainders[i].second].second;

    std::uint64_t stream = 0;
    for (const auto& [key, count] : alloc) {
        if (count == 0) {
            ++stream;
            continue;
        }
        const auto& row_ids = strata.at(key);
        if (row_ids.size() < 10)
            throw Error("augment: stratum with < 10 rows cannot be synthesized");
        Matrix block(static_cast<long>(row_ids.size()), fm.values.cols());
        for (std::size_t i = 0; i < row_ids.size(); ++i)
            block.row(static_cast<long>(i)) = fm.values.row(row_ids[i]);
        auto model = fit_copula(block, fm.columns);
        Matrix synth = generate(model, count, stats::derive_seed(seed, stream));
        ++stream;

        long base = out.values.rows();
        Matrix grown(base + count, out.values.cols());
        grown.topRows(base) = out.values;
        grown.bottomRows(count) = synth;
        out.values = std::move(grown);
        const std::string& index_id =
            fm.rows[static_cast<std::size_t>(row_ids.front())].index_id;
        for (int i = 0; i < count; ++i) {
            dataio::FeatureMatrix::RowKey rk;
            rk.subject_id = next_subject++;
            rk.condition = static_cast<Condition>(key.first);
            rk.index_id = index_id;
            rk.synthetic = true;
            out.rows.push_back(rk);
            out.labels.push_back(static_cast<WorkloadClass>(key.second));
        }
    }
    out.validate();
    return out;
}

}  // namespace mwl::synth
