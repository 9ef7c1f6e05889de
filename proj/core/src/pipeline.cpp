#include "mwl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "mwl/bandindex.hpp"
#include "mwl/dataio.hpp"
#include "mwl/featex.hpp"
#include "mwl/montecarlo.hpp"
#include "mwl/select.hpp"
#include "mwl/stats.hpp"
#include "mwl/synth.hpp"

namespace mwl::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void log_line(const PipelineConfig& cfg, const std::string& line) {
    std::ofstream out(cfg.out_dir / "run_log.txt", std::ios::app);
    out << line << "\n";
}

void require_file(const fs::path& p, const std::string& stage) {
    if (!fs::exists(p))
        throw Error(stage + ": missing input " + p.string() +
                    " (run the preceding stage first)");
}

fs::path denoised_dir(const PipelineConfig& cfg) { return cfg.out_dir / "denoised"; }
fs::path selection_dir(const PipelineConfig& cfg) { return cfg.out_dir / "selection"; }
fs::path augmented_dir(const PipelineConfig& cfg) { return cfg.out_dir / "augmented"; }

json learner_to_json(const learn::ModelSpec& s) {
    return {{"family", learn::to_string(s.family)},
            {"c", s.regularization_c},
            {"tolerance", s.tolerance},
            {"max_iterations", s.max_iterations},
            {"min_samples_split", s.min_samples_split},
            {"max_depth", s.max_depth}};
}

learn::ModelSpec learner_from_json(const json& j) {
    learn::ModelSpec s;
    s.family = learn::family_from_string(j.at("family").get<std::string>());
    s.regularization_c = j.value("c", 1.0);
    s.tolerance = j.value("tolerance", 1e-4);
    s.max_iterations = j.value("max_iterations", 1000);
    s.min_samples_split = j.value("min_samples_split", 2);
    s.max_depth = j.value("max_depth", -1);
    return s;
}

std::vector<learn::ModelSpec> default_learners() {
    learn::ModelSpec lr, svm, tree;
    lr.family = learn::Family::LogisticRegression;
    svm.family = learn::Family::LinearSVM;
    tree.family = learn::Family::DecisionTree;
    return {lr, svm, tree};
}

/// Splits a combined feature matrix into one matrix per index id.
std::map<std::string, dataio::FeatureMatrix> split_by_index(
    const dataio::FeatureMatrix& fm) {
    std::map<std::string, std::vector<int>> rows_of;
    for (int r = 0; r < fm.n_rows(); ++r)
        rows_of[fm.rows[static_cast<std::size_t>(r)].index_id].push_back(r);
    std::map<std::string, dataio::FeatureMatrix> out;
    for (const auto& [id, rows] : rows_of) {
        dataio::FeatureMatrix sub;
        sub.columns = fm.columns;
        sub.values.resize(static_cast<long>(rows.size()), fm.values.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            sub.rows.push_back(fm.rows[static_cast<std::size_t>(rows[i])]);
            sub.labels.push_back(fm.labels[static_cast<std::size_t>(rows[i])]);
            sub.values.row(static_cast<long>(i)) = fm.values.row(rows[i]);
        }
        out[id] = std::move(sub);
    }
    return out;
}

std::vector<std::string> load_selection(const PipelineConfig& cfg,
                                        const std::string& index_id,
                                        const std::string& stage) {
    fs::path p = selection_dir(cfg) / (index_id + ".json");
    require_file(p, stage);
    std::ifstream in(p);
    json j;
    in >> j;
    return j.at("chosen").get<std::vector<std::string>>();
}

montecarlo::ExperimentConfig mc_config(const PipelineConfig& cfg) {
    montecarlo::ExperimentConfig mc;
    mc.train_fraction = cfg.train.train_fraction;
    mc.iterations = cfg.train.iterations;
    mc.seed = cfg.seed;
    mc.learners = cfg.train.learners.empty() ? default_learners() : cfg.train.learners;
    return mc;
}

void write_comparisons(const std::vector<montecarlo::Comparison>& cs,
                       const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "learner,metric,index_a,index_b,t,p,p_bonferroni,"
           "significant_05,significant_005\n";
    for (const auto& c : cs)
        out << c.learner << ',' << c.metric << ',' << c.index_a << ','
            << c.index_b << ',' << fmt17(c.result.t) << ',' << fmt17(c.result.p)
            << ',' << fmt17(c.result.p_bonferroni) << ','
            << (c.result.significant_05 ? 1 : 0) << ','
            << (c.result.significant_005 ? 1 : 0) << '\n';
}

std::vector<montecarlo::MetricDistribution> load_mc_results(
    const PipelineConfig& cfg, const std::string& stage) {
    fs::path p = cfg.out_dir / "mc_results.csv";
    require_file(p, stage);
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);  // header
    std::map<std::pair<std::string, std::string>, montecarlo::MetricDistribution> by_key;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t pos = 0;
        for (int i = 0; i < 4; ++i) {
            auto c = line.find(',', pos);
            f.push_back(line.substr(pos, c - pos));
            pos = c + 1;
        }
        f.push_back(line.substr(pos));
        auto& d = by_key[{f[0], f[1]}];
        d.index_id = f[0];
        d.learner = f[1];
        d.values[f[2]].push_back(std::stod(f[4]));
    }
    std::vector<montecarlo::MetricDistribution> out;
    for (auto& [key, d] : by_key) out.push_back(std::move(d));
    return out;
}

}  // namespace

void PipelineConfig::validate() const {
    std::vector<std::string> bad;
    if (manifest.empty()) bad.push_back("manifest: required");
    if (out_dir.empty()) bad.push_back("out_dir: required");
    if (window_s <= 0) bad.push_back("window_s: must be > 0");
    if (denoise.z_threshold <= 0) bad.push_back("denoise.z_threshold: must be > 0");
    if (denoise.filter_order < 2 || denoise.filter_order % 2 != 0)
        bad.push_back("denoise.filter_order: must be a positive even integer");
    if (denoise.ica_max_iterations < 1)
        bad.push_back("denoise.ica_max_iterations: must be >= 1");
    if (denoise.ica_tolerance <= 0)
        bad.push_back("denoise.ica_tolerance: must be > 0");
    if (select.k_search_iterations < 1)
        bad.push_back("select.k_search_iterations: must be >= 1");
    if (select.correlation_threshold <= 0 || select.correlation_threshold >= 1)
        bad.push_back("select.correlation_threshold: must be in (0, 1)");
    if (synth.rows_per_index < 0)
        bad.push_back("synth.rows_per_index: must be >= 0");
    if (train.dataset != "original" && train.dataset != "combined")
        bad.push_back("train.dataset: must be 'original' or 'combined'");
    if (train.train_fraction <= 0 || train.train_fraction >= 1)
        bad.push_back("train.train_fraction: must be in (0, 1)");
    if (train.iterations < 1) bad.push_back("train.iterations: must be >= 1");
    for (const auto& l : train.learners) {
        if (l.regularization_c <= 0) bad.push_back("train.learners: c must be > 0");
        if (l.tolerance <= 0) bad.push_back("train.learners: tolerance must be > 0");
    }
    if (!bad.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& b : bad) msg += "\n  " + b;
        throw Error(msg);
    }
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("config " + path.string() + ": " + e.what());
    }
    PipelineConfig c;
    c.manifest = j.value("manifest", std::string());
    c.out_dir = j.value("out_dir", std::string());
    c.seed = j.value("seed", std::uint64_t{0});
    c.window_s = j.value("window_s", 1.0);
    if (j.contains("denoise")) {
        const auto& d = j["denoise"];
        c.denoise.z_threshold = d.value("z_threshold", 3.0);
        c.denoise.filter_order = d.value("filter_order", 4);
        c.denoise.ica_max_iterations = d.value("ica_max_iterations", 200);
        c.denoise.ica_tolerance = d.value("ica_tolerance", 1e-4);
    }
    if (j.contains("select")) {
        const auto& s = j["select"];
        c.select.k_search = s.value("k_search", true);
        c.select.k_search_iterations = s.value("k_search_iterations", 10);
        c.select.correlation_threshold = s.value("correlation_threshold", 0.5);
    }
    if (j.contains("synth"))
        c.synth.rows_per_index = j["synth"].value("rows_per_index", 180);
    if (j.contains("train")) {
        const auto& t = j["train"];
        c.train.dataset = t.value("dataset", std::string("combined"));
        c.train.train_fraction = t.value("train_fraction", 0.7);
        c.train.iterations = t.value("iterations", 100);
        if (t.contains("learners"))
            for (const auto& l : t["learners"])
                c.train.learners.push_back(learner_from_json(l));
    }
    return c;
}

void save_config(const PipelineConfig& cfg, const fs::path& path) {
    json j;
    j["manifest"] = cfg.manifest.string();
    j["out_dir"] = cfg.out_dir.string();
    j["seed"] = cfg.seed;
    j["window_s"] = cfg.window_s;
    j["denoise"] = {{"z_threshold", cfg.denoise.z_threshold},
                    {"filter_order", cfg.denoise.filter_order},
                    {"ica_max_iterations", cfg.denoise.ica_max_iterations},
                    {"ica_tolerance", cfg.denoise.ica_tolerance}};
    j["select"] = {{"k_search", cfg.select.k_search},
                   {"k_search_iterations", cfg.select.k_search_iterations},
                   {"correlation_threshold", cfg.select.correlation_threshold}};
    j["synth"] = {{"rows_per_index", cfg.synth.rows_per_index}};
    json learners = json::array();
    for (const auto& l :
         cfg.train.learners.empty() ? default_learners() : cfg.train.learners)
        learners.push_back(learner_to_json(l));
    j["train"] = {{"dataset", cfg.train.dataset},
                  {"train_fraction", cfg.train.train_fraction},
                  {"iterations", cfg.train.iterations},
                  {"learners", learners}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write config: " + path.string());
    out << j.dump(2) << "\n";
}

void stage_denoise(const PipelineConfig& cfg) {
    cfg.validate();
    require_file(cfg.manifest, "denoise");
    fs::create_directories(denoised_dir(cfg));
    auto manifest = dataio::load_manifest(cfg.manifest);
    auto ds = dataio::load_dataset(manifest);

    preprocess::DenoiseOptions opts;
    opts.z_threshold = cfg.denoise.z_threshold;
    opts.filter_order = cfg.denoise.filter_order;
    opts.ica.max_iterations = cfg.denoise.ica_max_iterations;
    opts.ica.tolerance = cfg.denoise.ica_tolerance;

    dataio::DatasetManifest out_manifest;
    out_manifest.root = denoised_dir(cfg);
    out_manifest.sampling_rate_hz = manifest.sampling_rate_hz;
    out_manifest.channel_names = manifest.channel_names;

    json report;
    report["recordings"] = json::array();
    std::map<Condition, std::pair<double, int>> removed_acc;
    for (const auto& rec : ds.recordings) {
        opts.ica.seed = stats::derive_seed(
            cfg.seed, static_cast<std::uint64_t>(rec.subject_id) * 2 +
                          (rec.condition == Condition::Simkap ? 1 : 0));
        auto [clean, rep] = preprocess::denoise(rec, opts);
        char name[32];
        std::snprintf(name, sizeof(name), "sub%02d_%s.txt", rec.subject_id,
                      rec.condition == Condition::Rest ? "lo" : "hi");
        auto path = denoised_dir(cfg) / name;
        dataio::save_matrix_txt(clean.samples, path);
        out_manifest.entries.push_back({path, rec.subject_id, rec.condition});
        report["recordings"].push_back(
            {{"subject", rec.subject_id},
             {"condition", to_string(rec.condition)},
             {"removed_components", rep.removed_components},
             {"ica_converged", rep.ica_converged}});
        auto& acc = removed_acc[rec.condition];
        acc.first += static_cast<double>(rep.removed_components.size());
        acc.second += 1;
    }
    for (const auto& [cond, acc] : removed_acc)
        report["mean_removed"][to_string(cond)] =
            acc.second ? acc.first / acc.second : 0.0;
    for (const auto& w : ds.warnings) report["warnings"].push_back(w);

    if (!manifest.ratings_file.empty()) {
        fs::copy_file(manifest.ratings_file, denoised_dir(cfg) / "ratings.txt",
                      fs::copy_options::overwrite_existing);
        out_manifest.ratings_file = denoised_dir(cfg) / "ratings.txt";
    }
    dataio::save_manifest(out_manifest, denoised_dir(cfg) / "manifest.json");
    std::ofstream rep_out(cfg.out_dir / "denoise_report.json");
    rep_out << report.dump(2) << "\n";
    log_line(cfg, "denoise: " + std::to_string(ds.recordings.size()) +
                      " recordings cleaned");
}

void stage_indexes(const PipelineConfig& cfg) {
    cfg.validate();
    require_file(denoised_dir(cfg) / "manifest.json", "indexes");
    auto manifest = dataio::load_manifest(denoised_dir(cfg) / "manifest.json");
    auto ds = dataio::load_dataset(manifest);
    std::vector<IndexSeries> all;
    for (const auto& rec : ds.recordings) {
        auto series = bandindex::compute_indexes(rec, cfg.window_s);
        all.insert(all.end(), series.begin(), series.end());
    }
    dataio::save_index_series(all, cfg.out_dir / "indexes.csv");
    log_line(cfg, "indexes: " + std::to_string(all.size()) + " series written");
}

void stage_features(const PipelineConfig& cfg) {
    cfg.validate();
    require_file(cfg.out_dir / "indexes.csv", "features");
    require_file(denoised_dir(cfg) / "ratings.txt", "features");
    auto series = dataio::load_index_series(cfg.out_dir / "indexes.csv");
    auto ratings = dataio::load_ratings(denoised_dir(cfg) / "ratings.txt");
    std::vector<std::string> warnings;
    auto fm = featex::extract_all(series, featex::FeatureCatalog::standard(),
                                  ratings, &warnings);
    dataio::save_feature_matrix(fm, cfg.out_dir / "features.csv");
    for (const auto& w : warnings) log_line(cfg, "features: " + w);
    log_line(cfg, "features: " + std::to_string(fm.n_rows()) + " rows x " +
                      std::to_string(fm.n_cols()) + " columns");
}

void stage_select(const PipelineConfig& cfg) {
    cfg.validate();
    require_file(cfg.out_dir / "features.csv", "select");
    auto fm = dataio::load_feature_matrix(cfg.out_dir / "features.csv");
    fs::create_directories(selection_dir(cfg));

    // Mean Monte Carlo accuracy of a candidate subset, used by the K search.
    learn::ModelSpec probe;  // logistic regression, defaults
    auto accuracy = [&](const dataio::FeatureMatrix& m,
                        const std::vector<std::string>& names) {
        auto sub = select::restrict_columns(m, names);
        montecarlo::ExperimentConfig mc;
        mc.train_fraction = cfg.train.train_fraction;
        mc.iterations = cfg.select.k_search_iterations;
        mc.seed = stats::derive_seed(cfg.seed, 0x6b73u);  // fixed search stream
        auto dist = montecarlo::run_single(sub, probe, mc, nullptr);
        return dist.mean("accuracy");
    };

    for (auto& [id, sub] : split_by_index(fm)) {
        select::SelectionResult pre;
        if (cfg.select.k_search) {
            pre = select::iterative_k_search(sub, accuracy);
        } else {
            auto ranking = select::rank_features(sub);
            for (const auto& rf : ranking) pre.chosen.push_back(rf.name);
            pre.k = static_cast<int>(pre.chosen.size());
        }
        auto ranking = select::rank_features(sub);
        select::FeatureRanking kept;
        for (const auto& rf : ranking)
            if (std::find(pre.chosen.begin(), pre.chosen.end(), rf.name) !=
                pre.chosen.end())
                kept.push_back(rf);
        auto post = select::multicollinearity_filter(sub, kept,
                                                     cfg.select.correlation_threshold);

        json j;
        j["index"] = id;
        j["k_search"] = cfg.select.k_search;
        j["k"] = post.k;
        j["chosen"] = post.chosen;
        j["dropped_correlated"] = post.dropped_correlated;
        json trace = json::array();
        for (const auto& [k, acc] : pre.trace)
            trace.push_back({{"k", k}, {"accuracy", acc}});
        j["trace"] = trace;
        json fv = json::array();
        for (const auto& rf : kept)
            fv.push_back({{"name", rf.name}, {"f", rf.f_value}, {"p", rf.p_value}});
        j["ranking"] = fv;
        std::ofstream out(selection_dir(cfg) / (id + ".json"));
        out << j.dump(2) << "\n";

        std::ofstream corr(selection_dir(cfg) / (id + "_correlation.csv"));
        for (std::size_t i = 0; i < post.chosen.size(); ++i) {
            corr << (i ? "," : "") << post.chosen[i];
        }
        corr << "\n";
        for (long r = 0; r < post.correlation.rows(); ++r) {
            for (long c = 0; c < post.correlation.cols(); ++c)
                corr << (c ? "," : "") << fmt17(post.correlation(r, c));
            corr << "\n";
        }
        log_line(cfg, "select: " + id + " kept " + std::to_string(post.k) +
                          " features");
    }
}

void stage_synth(const PipelineConfig& cfg) {
    cfg.validate();
    require_file(cfg.out_dir / "features.csv", "synth");
    auto fm = dataio::load_feature_matrix(cfg.out_dir / "features.csv");
    fs::create_directories(augmented_dir(cfg));

    json quality;
    std::uint64_t stream = 1;
    for (auto& [id, sub] : split_by_index(fm)) {
        auto chosen = load_selection(cfg, id, "synth");
        auto narrow = select::restrict_columns(sub, chosen);
        auto combined = synth::augment(narrow, cfg.synth.rows_per_index,
                                       stats::derive_seed(cfg.seed, stream++));
        dataio::save_feature_matrix(combined, augmented_dir(cfg) / (id + ".csv"));

        // Quality compares original rows against the synthetic block; the
        // deep-structure PCA needs n >= fields, so cap the scored columns.
        long n_orig = narrow.values.rows();
        long q_cols = std::min<long>(narrow.values.cols(), n_orig);
        Matrix orig = narrow.values.leftCols(q_cols);
        long n_synth = combined.values.rows() - n_orig;
        if (n_synth > 0) {
            Matrix synth_rows =
                combined.values.bottomRows(n_synth).leftCols(q_cols);
            auto rep = synth::quality_report(orig, synth_rows);
            quality[id] = {{"field_correlation_stability",
                            rep.field_correlation_stability},
                           {"deep_structure_stability", rep.deep_structure_stability},
                           {"field_distribution_stability",
                            rep.field_distribution_stability},
                           {"overall", rep.overall},
                           {"band", rep.band}};
        }
        log_line(cfg, "synth: " + id + " +" + std::to_string(n_synth) + " rows");
    }
    std::ofstream out(cfg.out_dir / "synth_quality.json");
    out << quality.dump(2) << "\n";
}

void stage_train(const PipelineConfig& cfg) {
    cfg.validate();
    require_file(cfg.out_dir / "features.csv", "train");
    auto fm = dataio::load_feature_matrix(cfg.out_dir / "features.csv");
    fs::create_directories(cfg.out_dir / "models");

    auto mc = mc_config(cfg);
    std::ofstream results(cfg.out_dir / "mc_results.csv");
    results << "index,learner,metric,iteration,value\n";
    json summary;
    montecarlo::ExperimentLog log;

    for (auto& [id, sub] : split_by_index(fm)) {
        auto chosen = load_selection(cfg, id, "train");
        dataio::FeatureMatrix data;
        if (cfg.train.dataset == "combined") {
            auto p = augmented_dir(cfg) / (id + ".csv");
            require_file(p, "train (dataset = combined)");
            data = dataio::load_feature_matrix(p);
        } else {
            data = select::restrict_columns(sub, chosen);
        }
        for (const auto& learner : mc.learners) {
            auto dist = montecarlo::run_single(data, learner, mc, &log);
            dist.index_id = id;
            for (const auto& [metric, vals] : dist.values) {
                for (std::size_t i = 0; i < vals.size(); ++i)
                    results << id << ',' << dist.learner << ',' << metric << ','
                            << i << ',' << fmt17(vals[i]) << '\n';
                summary[id][dist.learner][metric] = {
                    {"mean", dist.mean(metric)}, {"sd", dist.sd(metric)}};
            }
            // A final model on all rows, for reproducibility audits.
            auto norm = learn::Normalizer::fit(data.values);
            auto model = learn::train(learner, norm.apply(data.values),
                                      data.labels,
                                      stats::derive_seed(cfg.seed, 0xf17a), norm);
            model.save_json(cfg.out_dir / "models" /
                            (id + "_" + dist.learner + ".json"));
        }
    }
    std::ofstream sum_out(cfg.out_dir / "mc_summary.json");
    sum_out << summary.dump(2) << "\n";
    for (const auto& n : log.notes) log_line(cfg, "train: " + n);
    log_line(cfg, "train: results written");
}

void stage_report(const PipelineConfig& cfg) {
    cfg.validate();
    auto dists = load_mc_results(cfg, "report");
    fs::path rep = cfg.out_dir / "report";
    fs::create_directories(rep);

    {  // mean/sd metric table across all (index, learner, metric)
        std::ofstream out(rep / "table_metrics.csv");
        out << "index,learner,metric,mean,sd\n";
        for (const auto& d : dists)
            for (const auto& [metric, vals] : d.values)
                out << d.index_id << ',' << d.learner << ',' << metric << ','
                    << fmt17(d.mean(metric)) << ',' << fmt17(d.sd(metric)) << '\n';
    }
    write_comparisons(montecarlo::compare_at_vs_ta(dists), rep / "ttest_at_vs_ta.csv");
    write_comparisons(montecarlo::compare_ratio_vs_constituents(dists),
                      rep / "ttest_ratio_vs_constituents.csv");
    write_comparisons(montecarlo::compare_ratio_pairs(dists),
                      rep / "ttest_electrode_pairs.csv");

    {  // 20-bin metric densities over [0, 1] for external plotting
        std::ofstream out(rep / "density.csv");
        out << "index,learner,metric,bin_center,density\n";
        const int bins = 20;
        for (const auto& d : dists)
            for (const auto& [metric, vals] : d.values) {
                auto h = synth::histogram(vals, 0.0, 1.0, bins);
                for (int b = 0; b < bins; ++b)
                    out << d.index_id << ',' << d.learner << ',' << metric << ','
                        << fmt17((b + 0.5) / bins) << ','
                        << fmt17(h[static_cast<std::size_t>(b)] * bins) << '\n';
            }
    }
    if (fs::exists(cfg.out_dir / "synth_quality.json"))
        fs::copy_file(cfg.out_dir / "synth_quality.json",
                      rep / "synth_quality.json",
                      fs::copy_options::overwrite_existing);
    log_line(cfg, "report: tables written");
}

void run_all(const PipelineConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    std::ofstream(cfg.out_dir / "run_log.txt");  // truncate for a fresh run
    save_config(cfg, cfg.out_dir / "config.resolved.json");
    stage_denoise(cfg);
    stage_indexes(cfg);
    stage_features(cfg);
    stage_select(cfg);
    stage_synth(cfg);
    stage_train(cfg);
    stage_report(cfg);
}

}  // namespace mwl::pipeline
