#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "mwl/synth.hpp"
#include "oracles.hpp"

using namespace mwl;

namespace {

double pearson_cols(const Matrix& m, int i, int j) {
    double mi = m.col(i).mean(), mj = m.col(j).mean();
    double num = 0.0, di = 0.0, dj = 0.0;
    for (int r = 0; r < m.rows(); ++r) {
        num += (m(r, i) - mi) * (m(r, j) - mj);
        di += (m(r, i) - mi) * (m(r, i) - mi);
        dj += (m(r, j) - mj) * (m(r, j) - mj);
    }
    return num / std::sqrt(di * dj);
}

Matrix correlated_pair(int n, double r, std::uint64_t seed) {
    oracle::Rng rng(seed);
    Matrix m(n, 2);
    for (int i = 0; i < n; ++i) {
        double a = rng.gauss(), b = rng.gauss();
        m(i, 0) = a;
        m(i, 1) = r * a + std::sqrt(1.0 - r * r) * b;
    }
    return m;
}

}  // namespace

TEST_CASE("copula preserves a strong pairwise correlation") {
    Matrix orig = correlated_pair(2000, 0.9, 11);
    auto model = synth::fit_copula(orig, {"a", "b"});
    Matrix gen = synth::generate(model, 5000, 3);
    REQUIRE(gen.rows() == 5000);
    REQUIRE(gen.cols() == 2);
    double r = pearson_cols(gen, 0, 1);
    CHECK(r > 0.8);
    CHECK(r < 0.97);
    // Generated values come from the empirical marginals' range.
    CHECK(gen.col(0).minCoeff() >= orig.col(0).minCoeff() - 1e-12);
    CHECK(gen.col(0).maxCoeff() <= orig.col(0).maxCoeff() + 1e-12);
}

TEST_CASE("constant fields stay constant") {
    Matrix orig(20, 2);
    oracle::Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        orig(i, 0) = 7.5;
        orig(i, 1) = rng.gauss();
    }
    auto model = synth::fit_copula(orig, {"c", "x"});
    Matrix gen = synth::generate(model, 100, 9);
    for (int i = 0; i < 100; ++i) CHECK(gen(i, 0) == 7.5);
}

TEST_CASE("generation is deterministic per seed") {
    Matrix orig = correlated_pair(100, 0.5, 21);
    auto model = synth::fit_copula(orig, {"a", "b"});
    Matrix a = synth::generate(model, 50, 4);
    Matrix b = synth::generate(model, 50, 4);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    Matrix c = synth::generate(model, 50, 5);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("fit_copula validates its inputs") {
    Matrix tiny = Matrix::Random(9, 2);
    CHECK_THROWS_AS(synth::fit_copula(tiny, {"a", "b"}), Error);
    Matrix ok = Matrix::Random(12, 1);
    CHECK_THROWS_AS(synth::fit_copula(ok, {"a"}), Error);
    Matrix mis = Matrix::Random(12, 2);
    CHECK_THROWS_AS(synth::fit_copula(mis, {"a"}), Error);
}

TEST_CASE("js distance: hand value, bounds, symmetry and identity") {
    // JSD([1/2,1/2], [1,0]): m = [3/4, 1/4];
    // H(m) - (H(p) + H(q))/2 = 0.8112781 - 0.5 = 0.3112781 bits.
    std::vector<double> p = {0.5, 0.5}, q = {1.0, 0.0};
    double expected = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25)) - 0.5;
    CHECK(synth::js_distance(p, q) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(synth::js_distance(q, p) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(synth::js_distance(p, p) == doctest::Approx(0.0));

    // Disjoint distributions reach the upper bound of 1.
    std::vector<double> a = {1.0, 0.0}, b = {0.0, 1.0};
    CHECK(synth::js_distance(a, b) == doctest::Approx(1.0));

    // Unnormalized inputs are renormalized.
    std::vector<double> p2 = {5.0, 5.0}, q2 = {10.0, 0.0};
    CHECK(synth::js_distance(p2, q2) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("histogram clamps out-of-range values to the edge bins") {
    std::vector<double> x = {-5.0, 0.1, 0.5, 0.9, 25.0};
    auto h = synth::histogram(x, 0.0, 1.0, 4);
    REQUIRE(h.size() == 4);
    // Proportions: -5.0 clamps down next to 0.1; 25.0 clamps up next to 0.9.
    CHECK(h[0] == doctest::Approx(0.4));
    CHECK(h[3] == doctest::Approx(0.4));
    auto degenerate = synth::histogram(x, 2.0, 2.0, 4);
    CHECK(degenerate[0] == doctest::Approx(1.0));
}

TEST_CASE("identical datasets score 100 on all three stabilities") {
    Matrix m = correlated_pair(300, 0.6, 31);
    CHECK(synth::field_correlation_stability(m, m) ==
          doctest::Approx(100.0).epsilon(1e-9));
    CHECK(synth::deep_structure_stability(m, m) ==
          doctest::Approx(100.0).epsilon(1e-9));
    CHECK(synth::field_distribution_stability(m, m) ==
          doctest::Approx(100.0).epsilon(1e-9));
    auto rep = synth::quality_report(m, m);
    CHECK(rep.overall == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(rep.band == "Excellent");
}

TEST_CASE("disjoint distributions floor the field distribution stability") {
    Matrix a(50, 2), b(50, 2);
    for (int i = 0; i < 50; ++i) {
        a(i, 0) = double(i) * 0.01;        // [0, 0.5)
        a(i, 1) = double(i) * 0.01;
        b(i, 0) = 100.0 + double(i) * 0.01;  // far away
        b(i, 1) = 100.0 + double(i) * 0.01;
    }
    CHECK(synth::field_distribution_stability(a, b) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
}

TEST_CASE("opposite correlations give a low field correlation stability") {
    Matrix a = correlated_pair(500, 0.9, 41);
    Matrix b = correlated_pair(500, -0.9, 43);
    double s = synth::field_correlation_stability(a, b);
    CHECK(s < 15.0);  // |0.9 - (-0.9)| / 2 = 0.9 -> about 10
    CHECK(s >= 0.0);
}

TEST_CASE("copula samples of a 5-field gaussian score at least 85 overall") {
    oracle::Rng rng(53);
    const int n = 800, d = 5;
    Matrix base(n, d);
    for (int i = 0; i < n; ++i) {
        double shared = rng.gauss();
        for (int j = 0; j < d; ++j)
            base(i, j) = 0.6 * shared + 0.8 * rng.gauss() + 0.5 * j;
    }
    std::vector<std::string> names;
    for (int j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
    auto model = synth::fit_copula(base, names);
    Matrix gen = synth::generate(model, n, 7);
    auto rep = synth::quality_report(base, gen);
    CHECK(rep.field_correlation_stability > 85.0);
    CHECK(rep.deep_structure_stability > 80.0);
    CHECK(rep.field_distribution_stability > 85.0);
    CHECK(rep.overall > 85.0);
    CHECK((rep.band == "Excellent" || rep.band == "Good"));
}

TEST_CASE("quality bands cover the documented ranges") {
    CHECK(synth::quality_band(100.0) == "Excellent");
    CHECK(synth::quality_band(80.5) == "Excellent");
    CHECK(synth::quality_band(80.0) == "Good");
    CHECK(synth::quality_band(60.0) == "Moderate");
    CHECK(synth::quality_band(40.0) == "Poor");
    CHECK(synth::quality_band(20.0) == "Very Poor");
    CHECK(synth::quality_band(0.0) == "Very Poor");
}

TEST_CASE("augment apportions strata, mints fresh subjects and flags rows") {
    oracle::Rng rng(61);
    dataio::FeatureMatrix fm;
    fm.columns = {"f0", "f1"};
    std::vector<std::vector<double>> rows;
    // 20 rows rest/suboptimal, 10 rows simkap/superoptimal.
    for (int s = 1; s <= 20; ++s) {
        fm.rows.push_back({s, Condition::Rest, "at-1", false});
        fm.labels.push_back(WorkloadClass::Suboptimal);
        rows.push_back({rng.gauss(), rng.gauss()});
    }
    for (int s = 1; s <= 10; ++s) {
        fm.rows.push_back({s, Condition::Simkap, "at-1", false});
        fm.labels.push_back(WorkloadClass::SuperOptimal);
        rows.push_back({3.0 + rng.gauss(), 3.0 + rng.gauss()});
    }
    fm.values.resize(30, 2);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        fm.values(long(r), 0) = rows[r][0];
        fm.values(long(r), 1) = rows[r][1];
    }

    auto out = synth::augment(fm, 15, 9);
    REQUIRE(out.rows.size() == 45);
    REQUIRE(out.values.rows() == 45);
    CHECK(out.labels.size() == 45);

    int n_synth = 0, synth_rest = 0, synth_simkap = 0;
    std::set<int> synth_ids;
    for (std::size_t r = 0; r < out.rows.size(); ++r) {
        if (!out.rows[r].synthetic) continue;
        ++n_synth;
        CHECK(out.rows[r].subject_id > 20);
        CHECK(synth_ids.insert(out.rows[r].subject_id).second);
        if (out.rows[r].condition == Condition::Rest) {
            ++synth_rest;
            CHECK(out.labels[r] == WorkloadClass::Suboptimal);
        } else {
            ++synth_simkap;
            CHECK(out.labels[r] == WorkloadClass::SuperOptimal);
        }
    }
    CHECK(n_synth == 15);
    // Largest-remainder apportionment of 15 across 20:10 gives 10:5.
    CHECK(synth_rest == 10);
    CHECK(synth_simkap == 5);

    // Originals are untouched and come first.
    for (int r = 0; r < 30; ++r) {
        CHECK_FALSE(out.rows[std::size_t(r)].synthetic);
        CHECK(out.values(r, 0) == fm.values(r, 0));
    }

    // Deterministic per seed.
    auto again = synth::augment(fm, 15, 9);
    CHECK((again.values - out.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("augment requires at least 10 rows per stratum") {
    dataio::FeatureMatrix fm;
    fm.columns = {"f0", "f1"};
    oracle::Rng rng(71);
    for (int s = 1; s <= 5; ++s) {
        fm.rows.push_back({s, Condition::Rest, "at-1", false});
        fm.labels.push_back(WorkloadClass::Suboptimal);
        fm.rows.push_back({s, Condition::Simkap, "at-1", false});
        fm.labels.push_back(WorkloadClass::SuperOptimal);
    }
    fm.values = Matrix::Random(10, 2);
    CHECK_THROWS_AS(synth::augment(fm, 10, 1), Error);
}
