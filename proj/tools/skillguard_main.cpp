#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skillguard/errors.hpp"
#include "skillguard/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitStageFailure = 3;

struct CliOverrides {
    std::string config_path;
    std::string corpus, patterns, traces, output, reviews, classifier_endpoint;
    double alpha = -1.0;
    std::int64_t min_support = -1;
    std::int64_t seed = -1;
    int parallelism = -1;
};

void add_common_options(CLI::App* cmd, CliOverrides& opts) {
    cmd->add_option("--config", opts.config_path, "pipeline config file (JSON)")->required();
    cmd->add_option("--corpus", opts.corpus, "override corpus path");
    cmd->add_option("--patterns", opts.patterns, "override pattern definition file");
    cmd->add_option("--traces", opts.traces, "override trace directory");
    cmd->add_option("--output", opts.output, "override output directory");
    cmd->add_option("--reviews", opts.reviews, "override reviews file");
    cmd->add_option("--classifier-endpoint", opts.classifier_endpoint,
                    "override classifier endpoint");
    cmd->add_option("--alpha", opts.alpha, "override significance level");
    cmd->add_option("--min-support", opts.min_support, "override chain support threshold");
    cmd->add_option("--seed", opts.seed, "override RNG seed");
    cmd->add_option("--parallelism", opts.parallelism, "override worker count");
}

skillguard::pipeline::PipelineConfig resolve_config(const CliOverrides& opts) {
    auto config = skillguard::pipeline::PipelineConfig::from_file(opts.config_path);
    if (!opts.corpus.empty()) config.corpus_path = opts.corpus;
    if (!opts.patterns.empty()) config.pattern_file = opts.patterns;
    if (!opts.traces.empty()) config.trace_dir = opts.traces;
    if (!opts.output.empty()) config.output_dir = opts.output;
    if (!opts.reviews.empty()) config.reviews_file = opts.reviews;
    if (!opts.classifier_endpoint.empty()) {
        config.classifier_endpoint = opts.classifier_endpoint;
    }
    if (opts.alpha >= 0.0) config.alpha = opts.alpha;
    if (opts.min_support >= 0) config.min_support = static_cast<std::size_t>(opts.min_support);
    if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.parallelism >= 1) config.parallelism = opts.parallelism;
    return config;
}

int execute(const CliOverrides& opts, const std::vector<skillguard::pipeline::Stage>& stages) {
    try {
        auto config = resolve_config(opts);
        auto manifest = skillguard::pipeline::run_stages(config, stages);
        std::cout << "run " << manifest.run_id << " -> "
                  << skillguard::pipeline::run_directory(config).string() << "\n";
        for (const auto& [stage, outputs] : manifest.stage_outputs) {
            for (const auto& [file, hash] : outputs) {
                std::cout << "  " << stage << ": " << file << " " << hash << "\n";
            }
        }
        return kExitOk;
    } catch (const skillguard::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const skillguard::StageFailure& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return kExitStageFailure;
    } catch (const skillguard::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStageFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skillguard: agent-skill security analysis pipeline"};
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
        std::vector<skillguard::pipeline::Stage> stages;
    };
    using skillguard::pipeline::Stage;
    const std::vector<Command> commands = {
        {"ingest", "parse the corpus snapshot and export tier 1", {Stage::ingest}},
        {"scan", "run static pattern triage and export tier 2", {Stage::scan}},
        {"verify", "evaluate evidence traces against runtime criteria", {Stage::verify}},
        {"label", "label confirmed skills and export tier 3", {Stage::label}},
        {"analyze", "compute co-occurrence, chains and ecosystem statistics", {Stage::analyze}},
        {"report", "render the human-readable analysis report", {Stage::report}},
        {"disclose", "emit redacted disclosure packets", {Stage::disclose}},
        {"run", "execute the full pipeline end to end", skillguard::pipeline::all_stages()},
    };

    std::vector<CliOverrides> opts(commands.size());
    std::vector<CLI::App*> apps(commands.size());
    for (std::size_t i = 0; i < commands.size(); ++i) {
        apps[i] = app.add_subcommand(commands[i].name, commands[i].help);
        add_common_options(apps[i], opts[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (apps[i]->parsed()) return execute(opts[i], commands[i].stages);
    }
    return kExitValidation;
}
