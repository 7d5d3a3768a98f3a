#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillguard/tiers.hpp"
#include "skillguard/verifier.hpp"

namespace skillguard::pipeline {

struct PipelineConfig {
    std::filesystem::path corpus_path;
    std::filesystem::path pattern_file;  // empty: bundled canonical set
    std::filesystem::path trace_dir;     // empty: no runtime evidence
    std::filesystem::path output_dir;
    std::filesystem::path reviews_file;  // empty: trace-confirmed mode
    std::string classifier_endpoint;     // empty: heuristic-only
    double alpha = 0.05;
    std::size_t min_support = 5;
    std::uint64_t seed = 42;
    int parallelism = 1;

    /// Reads a JSON config; relative paths resolve against the config file's
    /// directory. SKILLGUARD_CLASSIFIER_ENDPOINT and SKILLGUARD_PARALLELISM
    /// override their fields.
    static PipelineConfig from_file(const std::filesystem::path& path);

    /// Throws ConfigError on invalid parameters or unreadable paths.
    void validate() const;
};

enum class Stage : std::uint8_t { ingest, scan, verify, label, analyze, report, disclose };

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view text);
std::vector<Stage> all_stages();

/// Content-addressed record of one pipeline run: input hashes decide the run
/// id; every persisted stage output is hashed. Reruns over identical inputs
/// produce byte-identical manifests.
struct RunManifest {
    std::string run_id;
    std::map<std::string, std::string> input_hashes;
    std::map<std::string, std::map<std::string, std::string>> stage_outputs;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

std::filesystem::path run_directory(const PipelineConfig& config);

/// Executes the requested stages in pipeline order, reading upstream
/// artifacts from the run directory. Throws StageFailure; later stages do
/// not run after a failure.
RunManifest run_stages(const PipelineConfig& config, const std::vector<Stage>& stages);

/// ingest -> scan -> verify -> label -> analyze -> report -> disclose.
RunManifest run_pipeline(const PipelineConfig& config);

/// Human-readable report over tier-3 labels and analysis outputs. Throws
/// EmptyTier3.
std::string generate_report(const std::vector<tiers::T3Entry>& t3_entries,
                            const nlohmann::json& analysis);

struct DisclosurePacket {
    std::string skill_id;
    RegistrySource registry_source = RegistrySource::local;
    std::vector<std::string> evidence_summary;  // redacted, excerpts <= 200 chars
    std::map<std::string, std::size_t> severity_rollup;
    std::vector<std::string> mitre_ids;
    DisclosureStatus status = DisclosureStatus::pending;
};

nlohmann::json packet_to_json(const DisclosurePacket& packet);

/// One packet per confirmed skill. Honeypot secrets and markers never appear;
/// occurrences are replaced with [HONEYPOT] and the result is re-checked
/// (RedactionFailure). Throws EmptyTier3.
std::vector<DisclosurePacket> disclosure_export(
    const std::vector<tiers::T3Entry>& t3_entries,
    const std::map<std::string, RegistrySource>& registry_sources,
    const verifier::HoneypotSet& honeypots);

}  // namespace skillguard::pipeline
