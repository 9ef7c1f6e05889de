#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "mwl/demo.hpp"
#include "mwl/pipeline.hpp"

using namespace mwl;
namespace fs = std::filesystem;

namespace {

fs::path tmpdir(const char* name) {
    auto p = fs::temp_directory_path() / "mwl_pipeline_test" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    int n = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

// A small, fast configuration over a generated demo cohort.
pipeline::PipelineConfig small_config(const fs::path& dir) {
    // Synthesis needs >= 10 original rows per (condition, class) stratum,
    // i.e. >= 10 subjects in the demo cohort.
    demo::DemoOptions opts;
    opts.n_subjects = 12;
    opts.duration_s = 20.0;
    opts.seed = 5;
    auto manifest = demo::write_demo_cohort(dir / "data", opts);
    (void)manifest;

    pipeline::PipelineConfig cfg;
    cfg.manifest = dir / "data" / "manifest.json";
    cfg.out_dir = dir / "out";
    cfg.seed = 13;
    cfg.select.k_search_iterations = 3;
    cfg.synth.rows_per_index = 24;
    cfg.train.iterations = 6;
    return cfg;
}

}  // namespace

TEST_CASE("config json round trip preserves every field") {
    auto dir = tmpdir("config");
    pipeline::PipelineConfig cfg;
    cfg.manifest = "/data/manifest.json";
    cfg.out_dir = "/data/out";
    cfg.seed = 77;
    cfg.window_s = 2.0;
    cfg.denoise.z_threshold = 2.5;
    cfg.denoise.filter_order = 6;
    cfg.denoise.ica_max_iterations = 123;
    cfg.denoise.ica_tolerance = 1e-5;
    cfg.select.k_search = false;
    cfg.select.k_search_iterations = 4;
    cfg.select.correlation_threshold = 0.6;
    cfg.synth.rows_per_index = 99;
    cfg.train.dataset = "original";
    cfg.train.train_fraction = 0.8;
    cfg.train.iterations = 17;
    learn::ModelSpec svm;
    svm.family = learn::Family::LinearSVM;
    svm.regularization_c = 2.0;
    cfg.train.learners = {svm};

    pipeline::save_config(cfg, dir / "c.json");
    auto back = pipeline::load_config(dir / "c.json");
    CHECK(back.manifest == cfg.manifest);
    CHECK(back.out_dir == cfg.out_dir);
    CHECK(back.seed == 77);
    CHECK(back.window_s == 2.0);
    CHECK(back.denoise.z_threshold == 2.5);
    CHECK(back.denoise.filter_order == 6);
    CHECK(back.denoise.ica_max_iterations == 123);
    CHECK(back.denoise.ica_tolerance == 1e-5);
    CHECK(back.select.k_search == false);
    CHECK(back.select.k_search_iterations == 4);
    CHECK(back.select.correlation_threshold == 0.6);
    CHECK(back.synth.rows_per_index == 99);
    CHECK(back.train.dataset == "original");
    CHECK(back.train.train_fraction == 0.8);
    CHECK(back.train.iterations == 17);
    REQUIRE(back.train.learners.size() == 1);
    CHECK(back.train.learners[0].family == learn::Family::LinearSVM);
    CHECK(back.train.learners[0].regularization_c == 2.0);
}

TEST_CASE("validation reports every invalid field at once") {
    pipeline::PipelineConfig cfg;  // manifest and out_dir missing
    cfg.window_s = -1.0;
    cfg.denoise.filter_order = 3;
    cfg.train.train_fraction = 1.5;
    cfg.train.iterations = 0;
    try {
        cfg.validate();
        FAIL("expected validation error");
    } catch (const Error& e) {
        std::string msg = e.what();
        CHECK(msg.find("manifest") != std::string::npos);
        CHECK(msg.find("out_dir") != std::string::npos);
        CHECK(msg.find("window_s") != std::string::npos);
        CHECK(msg.find("filter_order") != std::string::npos);
        CHECK(msg.find("train_fraction") != std::string::npos);
        CHECK(msg.find("iterations") != std::string::npos);
    }
}

TEST_CASE("missing stage inputs raise errors naming the file") {
    auto dir = tmpdir("missing");
    pipeline::PipelineConfig cfg;
    cfg.manifest = dir / "nonexistent.json";
    cfg.out_dir = dir / "out";
    fs::create_directories(cfg.out_dir);
    CHECK_THROWS_WITH_AS(pipeline::stage_features(cfg),
                         doctest::Contains("indexes.csv"), Error);
    CHECK_THROWS_WITH_AS(pipeline::stage_train(cfg),
                         doctest::Contains("features.csv"), Error);
    CHECK_THROWS_WITH_AS(pipeline::stage_report(cfg),
                         doctest::Contains("mc_results.csv"), Error);
}

TEST_CASE("run_all produces the complete file contract on a demo cohort") {
    auto dir = tmpdir("runall");
    auto cfg = small_config(dir);
    pipeline::run_all(cfg);

    CHECK(fs::exists(cfg.out_dir / "config.resolved.json"));
    CHECK(fs::exists(cfg.out_dir / "run_log.txt"));
    CHECK(fs::is_directory(cfg.out_dir / "denoised"));
    CHECK(fs::exists(cfg.out_dir / "indexes.csv"));
    CHECK(fs::exists(cfg.out_dir / "features.csv"));
    CHECK(fs::is_directory(cfg.out_dir / "selection"));
    CHECK(fs::is_directory(cfg.out_dir / "augmented"));
    CHECK(fs::exists(cfg.out_dir / "synth_quality.json"));
    CHECK(fs::exists(cfg.out_dir / "mc_results.csv"));
    CHECK(fs::exists(cfg.out_dir / "mc_summary.json"));
    CHECK(fs::is_directory(cfg.out_dir / "models"));
    fs::path rep = cfg.out_dir / "report";
    CHECK(fs::exists(rep / "table_metrics.csv"));
    CHECK(fs::exists(rep / "ttest_at_vs_ta.csv"));
    CHECK(fs::exists(rep / "ttest_ratio_vs_constituents.csv"));
    CHECK(fs::exists(rep / "ttest_electrode_pairs.csv"));
    CHECK(fs::exists(rep / "density.csv"));
    CHECK(fs::exists(rep / "synth_quality.json"));

    // Metric table: 10 indexes x 3 learners x 4 metrics + header.
    CHECK(count_lines(rep / "table_metrics.csv") == 1 + 10 * 3 * 4);
    // Per-index selection artifacts for all ten canonical indexes.
    std::set<std::string> ids = {"c1-t", "c2-t", "c3-t", "c-a", "at-1",
                                 "at-2", "at-3",  "ta-1", "ta-2", "ta-3"};
    for (const auto& id : ids) {
        CHECK(fs::exists(cfg.out_dir / "selection" / (id + ".json")));
        CHECK(fs::exists(cfg.out_dir / "selection" / (id + "_correlation.csv")));
        CHECK(fs::exists(cfg.out_dir / "augmented" / (id + ".csv")));
    }
    // Comparison tables have their documented shapes.
    CHECK(count_lines(rep / "ttest_at_vs_ta.csv") == 1 + 3 * 3 * 4);
    CHECK(count_lines(rep / "ttest_ratio_vs_constituents.csv") == 1 + 12 * 3 * 4);
    CHECK(count_lines(rep / "ttest_electrode_pairs.csv") == 1 + 4 * 3 * 4);

    // A second identical run into a fresh directory is byte-identical on
    // its numeric outputs.
    pipeline::PipelineConfig cfg2 = cfg;
    cfg2.out_dir = dir / "out2";
    pipeline::run_all(cfg2);
    CHECK(slurp(cfg.out_dir / "mc_results.csv") ==
          slurp(cfg2.out_dir / "mc_results.csv"));
    CHECK(slurp(cfg.out_dir / "indexes.csv") ==
          slurp(cfg2.out_dir / "indexes.csv"));
    CHECK(slurp(cfg.out_dir / "report" / "table_metrics.csv") ==
          slurp(cfg2.out_dir / "report" / "table_metrics.csv"));

    // A different seed changes the Monte Carlo results.
    pipeline::PipelineConfig cfg3 = cfg;
    cfg3.out_dir = dir / "out3";
    cfg3.seed = 14;
    pipeline::run_all(cfg3);
    CHECK(slurp(cfg.out_dir / "mc_results.csv") !=
          slurp(cfg3.out_dir / "mc_results.csv"));
}
