// Command-line front end for the mental-workload toolkit. Subcommands mirror
// the pipeline stages; every command writes a fully-resolved config next to
// its outputs so runs can be replayed exactly.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mwl/demo.hpp"
#include "mwl/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonArgs {
    std::string config;
    std::string manifest;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "Pipeline config JSON");
    cmd->add_option("--manifest", args.manifest, "Dataset manifest JSON");
    cmd->add_option("--out", args.out, "Output directory");
    cmd->add_option("--seed", args.seed, "Master seed (overrides config)");
}

mwl::pipeline::PipelineConfig resolve(const CommonArgs& args) {
    mwl::pipeline::PipelineConfig cfg;
    if (!args.config.empty()) cfg = mwl::pipeline::load_config(args.config);
    if (!args.manifest.empty()) cfg.manifest = args.manifest;
    if (!args.out.empty()) cfg.out_dir = args.out;
    if (args.seed) cfg.seed = *args.seed;
    cfg.validate();
    return cfg;
}

int run_stage(const CommonArgs& args,
              void (*stage)(const mwl::pipeline::PipelineConfig&),
              const char* name) {
    mwl::pipeline::PipelineConfig cfg;
    try {
        cfg = resolve(args);
    } catch (const mwl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    try {
        fs::create_directories(cfg.out_dir);
        mwl::pipeline::save_config(cfg, cfg.out_dir / "config.resolved.json");
        stage(cfg);
        std::cout << name << ": done (" << cfg.out_dir.string() << ")\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EEG mental-workload index toolkit"};
    app.require_subcommand(1);

    struct StageCmd {
        const char* name;
        const char* help;
        void (*fn)(const mwl::pipeline::PipelineConfig&);
    };
    const StageCmd stages[] = {
        {"denoise", "Re-reference, high-pass and ICA-clean all recordings",
         &mwl::pipeline::stage_denoise},
        {"indexes", "Compute the ten per-window workload index series",
         &mwl::pipeline::stage_indexes},
        {"features", "Extract the 210-feature catalog per index series",
         &mwl::pipeline::stage_features},
        {"select", "ANOVA-F ranking, K search and multicollinearity filter",
         &mwl::pipeline::stage_select},
        {"synth", "Gaussian-copula synthesis plus quality scoring",
         &mwl::pipeline::stage_synth},
        {"train", "Monte Carlo 70/30 evaluation of the three learners",
         &mwl::pipeline::stage_train},
        {"report", "Metric tables, t-tests and density-plot data",
         &mwl::pipeline::stage_report},
    };

    std::vector<std::pair<CommonArgs, const StageCmd*>> bound;
    bound.reserve(8);
    std::vector<CLI::App*> subs;
    for (const auto& s : stages) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        bound.push_back({CommonArgs{}, &s});
        add_common(cmd, bound.back().first);
        subs.push_back(cmd);
    }

    CommonArgs all_args;
    auto* all_cmd = app.add_subcommand("run-all", "All pipeline stages in order");
    add_common(all_cmd, all_args);

    std::string demo_dir = "demo_data";
    int demo_subjects = 24;
    double demo_duration = 40.0;
    std::uint64_t demo_seed = 42;
    auto* demo_cmd =
        app.add_subcommand("demo", "Write the bundled deterministic demo cohort");
    demo_cmd->add_option("--out", demo_dir, "Target directory");
    demo_cmd->add_option("--subjects", demo_subjects, "Number of subjects");
    demo_cmd->add_option("--duration", demo_duration, "Seconds per recording");
    demo_cmd->add_option("--seed", demo_seed, "Generator seed");

    std::string scan_dir, scan_out = "manifest.json";
    auto* manifest_cmd = app.add_subcommand(
        "manifest", "Build a manifest from a directory of sub{NN}_{lo|hi}.txt files");
    manifest_cmd->add_option("--dir", scan_dir, "Directory to scan")->required();
    manifest_cmd->add_option("--out", scan_out, "Manifest path to write");

    CLI11_PARSE(app, argc, argv);

    try {
        if (demo_cmd->parsed()) {
            mwl::demo::DemoOptions opts;
            opts.n_subjects = demo_subjects;
            opts.duration_s = demo_duration;
            opts.seed = demo_seed;
            auto m = mwl::demo::write_demo_cohort(demo_dir, opts);
            std::cout << "demo cohort: " << m.entries.size() << " recordings in "
                      << demo_dir << "\n";
            return 0;
        }
        if (manifest_cmd->parsed()) {
            auto m = mwl::dataio::manifest_from_stew_layout(scan_dir);
            m.validate();
            mwl::dataio::save_manifest(m, scan_out);
            std::cout << "manifest: " << m.entries.size() << " recordings -> "
                      << scan_out << "\n";
            return 0;
        }
    } catch (const mwl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }

    if (all_cmd->parsed()) {
        mwl::pipeline::PipelineConfig cfg;
        try {
            cfg = resolve(all_args);
        } catch (const mwl::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitValidation;
        }
        try {
            mwl::pipeline::run_all(cfg);
            std::cout << "run-all: done (" << cfg.out_dir.string() << ")\n";
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitRuntime;
        }
    }

    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed())
            return run_stage(bound[i].first, bound[i].second->fn,
                             bound[i].second->name);

    return kExitValidation;  // unreachable with require_subcommand(1)
}
