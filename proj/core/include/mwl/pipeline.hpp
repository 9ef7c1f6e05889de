#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mwl/learn.hpp"
#include "mwl/preprocess.hpp"

namespace mwl::pipeline {

/// Fully-resolved run configuration; every run writes this back (JSON) next
/// to its outputs so it can be replayed. Schema: docs/formats.md.
struct PipelineConfig {
    std::filesystem::path manifest;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;

    double window_s = 1.0;

    struct Denoise {
        double z_threshold = 3.0;
        int filter_order = 4;
        int ica_max_iterations = 200;
        double ica_tolerance = 1e-4;
    } denoise;

    struct Select {
        bool k_search = true;
        int k_search_iterations = 10;  // Monte Carlo depth inside the search
        double correlation_threshold = 0.5;
    } select;

    struct Synth {
        int rows_per_index = 180;
    } synth;

    struct Train {
        std::string dataset = "combined";  // "original" | "combined"
        double train_fraction = 0.7;
        int iterations = 100;
        std::vector<learn::ModelSpec> learners;  // empty: the three defaults
    } train;

    void validate() const;  // lists every invalid field in one error
};

PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& cfg, const std::filesystem::path& path);

/// Each stage reads the previous stage's documented outputs from
/// cfg.out_dir and writes its own there; see docs/formats.md for the file
/// contract. Every stage appends to <out>/run_log.txt.
void stage_denoise(const PipelineConfig& cfg);
void stage_indexes(const PipelineConfig& cfg);
void stage_features(const PipelineConfig& cfg);
void stage_select(const PipelineConfig& cfg);
void stage_synth(const PipelineConfig& cfg);
void stage_train(const PipelineConfig& cfg);
void stage_report(const PipelineConfig& cfg);

/// All seven stages in order; writes the resolved config first.
void run_all(const PipelineConfig& cfg);

}  // namespace mwl::pipeline
