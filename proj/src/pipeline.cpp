#include "skillguard/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "skillguard/errors.hpp"
#include "skillguard/instructions.hpp"
#include "skillguard/patterns.hpp"
#include "skillguard/stats.hpp"
#include "skillguard/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace skillguard::pipeline {

namespace {

std::string hash_tree(const fs::path& root) {
    if (root.empty() || !fs::exists(root)) return util::fnv1a64_hex("");
    if (fs::is_regular_file(root)) return util::fnv1a64_hex(util::read_file(root));
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::string blob;
    for (const auto& f : files) {
        blob += fs::relative(f, root).generic_string();
        blob += '\0';
        blob += util::read_file(f);
        blob += '\0';
    }
    return util::fnv1a64_hex(blob);
}

json triage_to_json(const patterns::TriageResult& r) {
    json matches = json::array();
    for (const auto& m : r.matches) {
        matches.push_back({{"skill_id", m.skill_id},
                           {"pattern_id", std::string(to_string(m.pattern_id))},
                           {"file_path", m.file_path},
                           {"line_number", m.line_number},
                           {"matched_text", m.matched_text},
                           {"detector_id", m.detector_id},
                           {"annotations", m.annotations}});
    }
    std::vector<std::string> distinct;
    for (PatternId id : r.distinct_patterns) distinct.emplace_back(to_string(id));
    return json{{"skill_id", r.skill_id},
                {"flagged", r.flagged},
                {"matches", matches},
                {"distinct_patterns", distinct},
                {"warnings", r.warnings}};
}

patterns::TriageResult triage_from_json(const json& j) {
    patterns::TriageResult r;
    r.skill_id = j.at("skill_id").get<std::string>();
    r.flagged = j.at("flagged").get<bool>();
    for (const auto& m : j.at("matches")) {
        patterns::PatternMatch match;
        match.skill_id = m.at("skill_id").get<std::string>();
        match.pattern_id = pattern_id_from_string(m.at("pattern_id").get<std::string>());
        match.file_path = m.at("file_path").get<std::string>();
        match.line_number = m.at("line_number").get<int>();
        match.matched_text = m.at("matched_text").get<std::string>();
        match.detector_id = m.at("detector_id").get<std::string>();
        match.annotations = m.at("annotations").get<std::vector<std::string>>();
        r.matches.push_back(std::move(match));
    }
    for (const auto& d : j.at("distinct_patterns")) {
        r.distinct_patterns.insert(pattern_id_from_string(d.get<std::string>()));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

json verdict_to_json(const verifier::VerificationVerdict& v) {
    json indicators = json::array();
    json refs = json::object();
    for (auto ind : v.indicators) indicators.push_back(std::string(verifier::to_string(ind)));
    for (const auto& [ind, events] : v.evidence_refs) {
        refs[std::string(verifier::to_string(ind))] = events;
    }
    return json{{"skill_id", v.skill_id},
                {"indicators", indicators},
                {"evidence_refs", refs},
                {"forwarded_to_review", v.forwarded_to_review}};
}

verifier::VerificationVerdict verdict_from_json(const json& j) {
    verifier::VerificationVerdict v;
    v.skill_id = j.at("skill_id").get<std::string>();
    for (const auto& i : j.at("indicators")) {
        v.indicators.insert(verifier::indicator_from_string(i.get<std::string>()));
    }
    for (const auto& [key, events] : j.at("evidence_refs").items()) {
        v.evidence_refs[verifier::indicator_from_string(key)] =
            events.get<std::vector<std::size_t>>();
    }
    v.forwarded_to_review = j.at("forwarded_to_review").get<bool>();
    return v;
}

struct StageIo {
    const PipelineConfig& config;
    fs::path run_dir;
    RunManifest& manifest;

    void persist(Stage stage, const std::string& filename, const std::string& content) const {
        util::write_file(run_dir / filename, content);
        manifest.stage_outputs[std::string(to_string(stage))][filename] =
            util::fnv1a64_hex(content);
    }

    std::string load(std::string_view needed_by, const std::string& filename) const {
        fs::path path = run_dir / filename;
        if (!fs::exists(path)) {
            throw StageFailure(std::string(needed_by),
                               "missing upstream artifact " + filename +
                                   "; run the producing stage first");
        }
        return util::read_file(path);
    }
};

const patterns::PatternSet& pattern_set_for(const PipelineConfig& config,
                                            std::optional<patterns::PatternSet>& storage) {
    if (config.pattern_file.empty()) return patterns::canonical_pattern_set();
    if (!storage.has_value()) storage = patterns::load_pattern_file(config.pattern_file);
    return *storage;
}

std::vector<corpus::SkillPackage> load_packages(const StageIo& io, std::string_view stage) {
    return corpus::packages_from_jsonl(io.load(stage, "packages.jsonl"));
}

tiers::TierAnnotations base_annotations(const std::vector<corpus::SkillPackage>& packages,
                                        const std::vector<patterns::TriageResult>* triage) {
    tiers::TierAnnotations annotations;
    for (const auto& pkg : packages) {
        annotations.t1.push_back({pkg.skill_id, pkg.registry_source, pkg.doc_size_bytes});
    }
    if (triage != nullptr) {
        for (const auto& r : *triage) {
            if (!r.flagged) continue;
            tiers::T2Entry entry;
            entry.skill_id = r.skill_id;
            for (PatternId id : r.distinct_patterns) {
                entry.matched.emplace_back(id, pattern_default_severity(id));
            }
            annotations.t2.push_back(std::move(entry));
        }
    }
    return annotations;
}

void stage_ingest(const StageIo& io) {
    auto loaded = corpus::load_corpus_snapshot(io.config.corpus_path);
    io.persist(Stage::ingest, "packages.jsonl", corpus::packages_to_jsonl(loaded.packages));

    tiers::TierAnnotations annotations = base_annotations(loaded.packages, nullptr);
    io.persist(Stage::ingest, "tier1.jsonl", tiers::export_tier(annotations, tiers::Tier::T1));

    std::string warnings;
    for (const auto& w : loaded.warnings) {
        warnings += w;
        warnings += '\n';
    }
    io.persist(Stage::ingest, "warnings.txt", warnings);
}

void stage_scan(const StageIo& io) {
    auto packages = load_packages(io, "scan");
    std::optional<patterns::PatternSet> storage;
    const auto& pattern_set = pattern_set_for(io.config, storage);

    auto [results, summary] = patterns::triage_corpus(packages, pattern_set, io.config.parallelism);

    std::string triage_lines;
    for (const auto& r : results) {
        triage_lines += triage_to_json(r).dump();
        triage_lines += '\n';
    }
    io.persist(Stage::scan, "triage.jsonl", triage_lines);

    json per_pattern = json::object();
    for (const auto& [id, count] : summary.skills_per_pattern) {
        per_pattern[std::string(to_string(id))] = count;
    }
    json summary_json{{"total_skills", summary.total_skills},
                      {"flagged", summary.flagged},
                      {"flag_rate", summary.flag_rate},
                      {"skills_per_pattern", per_pattern}};
    io.persist(Stage::scan, "triage_summary.json", summary_json.dump(2) + "\n");

    tiers::TierAnnotations annotations = base_annotations(packages, &results);
    io.persist(Stage::scan, "tier2.jsonl", tiers::export_tier(annotations, tiers::Tier::T2));
}

void stage_verify(const StageIo& io) {
    auto packages = load_packages(io, "verify");
    std::map<std::string, const corpus::SkillPackage*> by_id;
    for (const auto& pkg : packages) by_id[pkg.skill_id] = &pkg;

    std::vector<patterns::TriageResult> triage;
    for (std::string_view line : util::split_lines(io.load("verify", "triage.jsonl"))) {
        if (util::trim(line).empty()) continue;
        triage.push_back(triage_from_json(json::parse(line)));
    }

    auto honeypots = verifier::generate_honeypots(io.config.seed, 8);
    io.persist(Stage::verify, "honeypots.json", verifier::honeypots_to_json(honeypots).dump() + "\n");

    std::map<std::string, std::vector<verifier::EvidenceTrace>> traces;
    if (!io.config.trace_dir.empty()) traces = verifier::load_trace_dir(io.config.trace_dir);

    std::optional<patterns::PatternSet> storage;
    const auto& pattern_set = pattern_set_for(io.config, storage);

    std::string verdict_lines;
    for (const auto& r : triage) {
        if (!r.flagged) continue;
        std::vector<verifier::VerificationVerdict> rounds;
        auto it = traces.find(r.skill_id);
        if (it != traces.end()) {
            const corpus::SkillPackage* pkg = by_id.count(r.skill_id) ? by_id[r.skill_id] : nullptr;
            std::set<std::string> documented =
                pkg != nullptr ? pkg->documented_endpoints : std::set<std::string>{};
            for (const auto& trace : it->second) {
                rounds.push_back(
                    verifier::evaluate_trace(trace, honeypots, documented, pattern_set));
            }
        }
        verifier::VerificationVerdict combined = verifier::combine_rounds(rounds);
        combined.skill_id = r.skill_id;
        verdict_lines += verdict_to_json(combined).dump();
        verdict_lines += '\n';
    }
    io.persist(Stage::verify, "verdicts.jsonl", verdict_lines);
}

void stage_label(const StageIo& io) {
    auto packages = load_packages(io, "label");
    std::map<std::string, const corpus::SkillPackage*> by_id;
    for (const auto& pkg : packages) by_id[pkg.skill_id] = &pkg;

    std::vector<patterns::TriageResult> triage;
    for (std::string_view line : util::split_lines(io.load("label", "triage.jsonl"))) {
        if (util::trim(line).empty()) continue;
        triage.push_back(triage_from_json(json::parse(line)));
    }
    std::map<std::string, verifier::VerificationVerdict> verdicts;
    for (std::string_view line : util::split_lines(io.load("label", "verdicts.jsonl"))) {
        if (util::trim(line).empty()) continue;
        auto v = verdict_from_json(json::parse(line));
        verdicts[v.skill_id] = std::move(v);
    }

    // Reviewer adjudication gate when a reviews file is present; without one,
    // runtime indicators alone confirm (trace-confirmed mode).
    std::map<std::string, std::vector<verifier::ReviewRecord>> reviews;
    if (!io.config.reviews_file.empty()) {
        for (std::string_view line : util::split_lines(util::read_file(io.config.reviews_file))) {
            if (util::trim(line).empty()) continue;
            json j = json::parse(line);
            verifier::ReviewRecord rec;
            rec.skill_id = j.at("skill_id").get<std::string>();
            rec.reviewer_id = j.at("reviewer_id").get<std::string>();
            rec.classification =
                verifier::classification_from_string(j.at("classification").get<std::string>());
            rec.confidence = j.at("confidence").get<int>();
            rec.notes = j.value("notes", "");
            reviews[rec.skill_id].push_back(std::move(rec));
        }
    }

    std::map<std::string, std::vector<verifier::EvidenceTrace>> traces;
    if (!io.config.trace_dir.empty()) traces = verifier::load_trace_dir(io.config.trace_dir);

    std::optional<instructions::ClassifierConfig> classifier;
    if (!io.config.classifier_endpoint.empty()) {
        classifier = instructions::ClassifierConfig{};
        classifier->base_url = io.config.classifier_endpoint;
    }

    std::vector<tiers::T3Entry> t3;
    for (const auto& r : triage) {
        auto vit = verdicts.find(r.skill_id);
        if (vit == verdicts.end() || !vit->second.forwarded_to_review) continue;
        if (!reviews.empty()) {
            auto rit = reviews.find(r.skill_id);
            if (rit == reviews.end() ||
                verifier::confirm_skill(rit->second) !=
                    verifier::ConfirmationOutcome::confirmed_malicious) {
                continue;
            }
        }
        const corpus::SkillPackage* pkg = by_id.count(r.skill_id) ? by_id[r.skill_id] : nullptr;
        std::string doc = pkg != nullptr ? pkg->instruction_doc : "";
        auto verdict = instructions::analyze_instructions(doc, classifier, r.skill_id);

        tiers::T3Entry entry;
        entry.skill_id = r.skill_id;
        entry.instances = taxonomy::label_vulnerabilities(r, vit->second, verdict);
        if (entry.instances.empty()) continue;
        std::vector<verifier::EvidenceTrace> skill_traces;
        if (auto tit = traces.find(r.skill_id); tit != traces.end()) skill_traces = tit->second;
        if (pkg != nullptr) {
            entry.shadow_features =
                taxonomy::detect_shadow_features(*pkg, skill_traces, r.matches);
        }
        auto distinct = entry.distinct_patterns();
        entry.level = taxonomy::stratify_sophistication(distinct, !entry.shadow_features.empty());
        entry.archetype = taxonomy::classify_archetype(distinct);
        std::set<std::string> mitre;
        for (PatternId id : distinct) mitre.insert(taxonomy::map_mitre(id).technique_id);
        entry.mitre_ids.assign(mitre.begin(), mitre.end());
        t3.push_back(std::move(entry));
    }

    // Chain memberships from the confirmed-set co-occurrence matrix.
    if (!t3.empty()) {
        std::vector<std::set<PatternId>> sets;
        sets.reserve(t3.size());
        for (const auto& e : t3) sets.push_back(e.distinct_patterns());
        auto matrix = stats::build_cooccurrence(sets);
        auto chains = stats::identify_chains(matrix, io.config.alpha, io.config.min_support);
        for (auto& entry : t3) {
            auto distinct = entry.distinct_patterns();
            for (const auto& chain : chains) {
                if (distinct.count(chain.from) > 0 && distinct.count(chain.to) > 0) {
                    entry.chain_memberships.push_back(std::string(to_string(chain.from)) + "->" +
                                                      std::string(to_string(chain.to)));
                }
            }
        }
    }

    tiers::TierAnnotations annotations = base_annotations(packages, &triage);
    annotations.t3 = std::move(t3);
    io.persist(Stage::label, "tier3.jsonl", tiers::export_tier(annotations, tiers::Tier::T3));
}

std::vector<tiers::T3Entry> load_tier3(const StageIo& io, std::string_view stage) {
    auto dataset = tiers::parse_tier_export(io.load(stage, "tier3.jsonl"));
    return dataset.t3_entries;
}

void stage_analyze(const StageIo& io) {
    auto t3 = load_tier3(io, "analyze");
    json analysis;
    analysis["n_skills"] = t3.size();

    if (!t3.empty()) {
        std::vector<std::set<PatternId>> sets;
        std::vector<std::size_t> vuln_counts;
        std::map<std::string, std::size_t> severity_rollup;
        std::map<std::string, std::size_t> archetype_counts;
        std::map<std::string, std::size_t> level_counts;
        for (const auto& e : t3) {
            sets.push_back(e.distinct_patterns());
            vuln_counts.push_back(e.instances.size());
            for (const auto& inst : e.instances) {
                ++severity_rollup[std::string(to_string(inst.severity))];
            }
            ++archetype_counts[std::string(taxonomy::to_string(e.archetype))];
            ++level_counts[std::string(taxonomy::to_string(e.level))];
        }

        auto matrix = stats::build_cooccurrence(sets);
        json ids = json::array();
        for (PatternId id : matrix.ids) ids.push_back(std::string(to_string(id)));
        analysis["cooccurrence"] = {{"ids", ids}, {"counts", matrix.counts},
                                    {"n_skills", matrix.n_skills}};

        auto chains = stats::identify_chains(matrix, io.config.alpha, io.config.min_support);
        json chain_list = json::array();
        for (const auto& c : chains) {
            chain_list.push_back({{"from", std::string(to_string(c.from))},
                                  {"to", std::string(to_string(c.to))},
                                  {"co_count", c.co_count},
                                  {"odds_ratio", c.odds_ratio},
                                  {"p_value", c.p_value},
                                  {"adjusted_alpha", c.adjusted_alpha},
                                  {"significant", c.significant},
                                  {"method", "fisher_exact"}});
        }
        analysis["chains"] = chain_list;

        auto communities = stats::louvain_communities(matrix, io.config.seed);
        json assignment = json::object();
        for (std::size_t i = 0; i < matrix.ids.size(); ++i) {
            assignment[std::string(to_string(matrix.ids[i]))] = communities.assignment[i];
        }
        analysis["communities"] = {{"assignment", assignment},
                                   {"modularity", communities.modularity}};

        auto centrality = stats::graph_centrality(matrix);
        json degree = json::object(), betweenness = json::object();
        for (std::size_t i = 0; i < matrix.ids.size(); ++i) {
            degree[std::string(to_string(matrix.ids[i]))] = centrality.weighted_degree[i];
            betweenness[std::string(to_string(matrix.ids[i]))] = centrality.betweenness[i];
        }
        analysis["centrality"] = {{"weighted_degree", degree}, {"betweenness", betweenness}};

        std::vector<double> density(vuln_counts.begin(), vuln_counts.end());
        auto metrics = stats::distribution_metrics(density);
        analysis["vulnerability_density"] = {{"mean", metrics.mean},
                                             {"median", metrics.median},
                                             {"gini", metrics.gini},
                                             {"excess_kurtosis", metrics.excess_kurtosis}};

        auto density_stats = stats::count_histogram_stats(vuln_counts);
        json density_hist = json::object();
        for (const auto& [count, skills] : density_stats.histogram) {
            density_hist[std::to_string(count)] = skills;
        }
        analysis["density_histogram"] = density_hist;
        analysis["density_share_ge3"] = density_stats.share_ge3;

        auto coverage = stats::phase_coverage_stats(sets);
        json phase_hist = json::object();
        for (const auto& [count, skills] : coverage.stats.histogram) {
            phase_hist[std::to_string(count)] = skills;
        }
        analysis["phase_coverage"] = {{"median", coverage.stats.median},
                                      {"mean", coverage.stats.mean},
                                      {"share_ge3", coverage.stats.share_ge3},
                                      {"histogram", phase_hist}};

        analysis["severity_rollup"] = severity_rollup;
        analysis["archetypes"] = archetype_counts;
        analysis["sophistication"] = level_counts;

        std::string density_csv = "vulnerabilities,skills\n";
        for (const auto& [count, skills] : density_stats.histogram) {
            density_csv += std::to_string(count) + "," + std::to_string(skills) + "\n";
        }
        io.persist(Stage::analyze, "density_hist.csv", density_csv);
        std::string phase_csv = "phases,skills\n";
        for (const auto& [count, skills] : coverage.stats.histogram) {
            phase_csv += std::to_string(count) + "," + std::to_string(skills) + "\n";
        }
        io.persist(Stage::analyze, "phase_hist.csv", phase_csv);
    }

    io.persist(Stage::analyze, "analysis.json", analysis.dump(2) + "\n");
}

void stage_report(const StageIo& io) {
    auto t3 = load_tier3(io, "report");
    json analysis = json::parse(io.load("report", "analysis.json"));
    io.persist(Stage::report, "report.txt", generate_report(t3, analysis));
}

void stage_disclose(const StageIo& io) {
    auto t3 = load_tier3(io, "disclose");
    auto honeypots = verifier::honeypots_from_json(json::parse(io.load("disclose", "honeypots.json")));

    std::map<std::string, RegistrySource> sources;
    for (const auto& pkg : load_packages(io, "disclose")) {
        sources[pkg.skill_id] = pkg.registry_source;
    }
    auto packets = disclosure_export(t3, sources, honeypots);
    std::string lines;
    for (const auto& p : packets) {
        lines += packet_to_json(p).dump();
        lines += '\n';
    }
    io.persist(Stage::disclose, "disclosure.jsonl", lines);
}

}  // namespace

PipelineConfig PipelineConfig::from_file(const fs::path& path) {
    json j;
    try {
        j = json::parse(util::read_file(path));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot read config: ") + e.what());
    }
    PipelineConfig config;
    fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    auto resolve = [&](const std::string& key) -> fs::path {
        if (!j.contains(key) || j[key].get<std::string>().empty()) return {};
        fs::path p = j[key].get<std::string>();
        return p.is_absolute() ? p : base / p;
    };
    config.corpus_path = resolve("corpus");
    config.pattern_file = resolve("patterns");
    config.trace_dir = resolve("traces");
    config.output_dir = resolve("output");
    config.reviews_file = resolve("reviews");
    config.classifier_endpoint = j.value("classifier_endpoint", "");
    config.alpha = j.value("alpha", 0.05);
    config.min_support = j.value("min_support", static_cast<std::size_t>(5));
    config.seed = j.value("seed", static_cast<std::uint64_t>(42));
    config.parallelism = j.value("parallelism", 1);

    if (const char* endpoint = std::getenv("SKILLGUARD_CLASSIFIER_ENDPOINT")) {
        config.classifier_endpoint = endpoint;
    }
    if (const char* par = std::getenv("SKILLGUARD_PARALLELISM")) {
        config.parallelism = std::atoi(par);
    }
    return config;
}

void PipelineConfig::validate() const {
    if (corpus_path.empty() || !fs::exists(corpus_path)) {
        throw ConfigError("corpus path missing or unreadable: " + corpus_path.string());
    }
    if (output_dir.empty()) throw ConfigError("output directory is required");
    if (!pattern_file.empty() && !fs::exists(pattern_file)) {
        throw ConfigError("pattern file not found: " + pattern_file.string());
    }
    if (!trace_dir.empty() && !fs::exists(trace_dir)) {
        throw ConfigError("trace directory not found: " + trace_dir.string());
    }
    if (!reviews_file.empty() && !fs::exists(reviews_file)) {
        throw ConfigError("reviews file not found: " + reviews_file.string());
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (min_support < 1) throw ConfigError("min_support must be >= 1");
}

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::ingest: return "ingest";
        case Stage::scan: return "scan";
        case Stage::verify: return "verify";
        case Stage::label: return "label";
        case Stage::analyze: return "analyze";
        case Stage::report: return "report";
        case Stage::disclose: return "disclose";
    }
    return "?";
}

Stage stage_from_string(std::string_view text) {
    for (Stage s : all_stages()) {
        if (to_string(s) == text) return s;
    }
    throw ConfigError("unknown stage: " + std::string(text));
}

std::vector<Stage> all_stages() {
    return {Stage::ingest, Stage::scan,   Stage::verify,  Stage::label,
            Stage::analyze, Stage::report, Stage::disclose};
}

json RunManifest::to_json() const {
    return json{{"schema", 1},
                {"run_id", run_id},
                {"input_hashes", input_hashes},
                {"stage_outputs", stage_outputs}};
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.input_hashes = j.at("input_hashes").get<std::map<std::string, std::string>>();
    m.stage_outputs =
        j.at("stage_outputs")
            .get<std::map<std::string, std::map<std::string, std::string>>>();
    return m;
}

namespace {

RunManifest seed_manifest(const PipelineConfig& config) {
    RunManifest manifest;
    manifest.input_hashes["corpus"] = hash_tree(config.corpus_path);
    manifest.input_hashes["patterns"] =
        config.pattern_file.empty()
            ? util::fnv1a64_hex(patterns::canonical_pattern_json())
            : hash_tree(config.pattern_file);
    manifest.input_hashes["traces"] = hash_tree(config.trace_dir);
    manifest.input_hashes["reviews"] = hash_tree(config.reviews_file);
    json params{{"alpha", config.alpha},
                {"min_support", config.min_support},
                {"seed", config.seed},
                {"classifier_endpoint", config.classifier_endpoint}};
    manifest.input_hashes["params"] = util::fnv1a64_hex(params.dump());

    std::string blob;
    for (const auto& [name, hash] : manifest.input_hashes) blob += name + "=" + hash + ";";
    manifest.run_id = util::fnv1a64_hex(blob);
    return manifest;
}

}  // namespace

fs::path run_directory(const PipelineConfig& config) {
    return config.output_dir / "runs" / seed_manifest(config).run_id;
}

RunManifest run_stages(const PipelineConfig& config, const std::vector<Stage>& stages) {
    config.validate();

    RunManifest manifest = seed_manifest(config);
    fs::path run_dir = config.output_dir / "runs" / manifest.run_id;
    fs::create_directories(run_dir);

    // Keep hashes from earlier partial runs of the same inputs.
    fs::path manifest_path = run_dir / "manifest.json";
    if (fs::exists(manifest_path)) {
        try {
            RunManifest prior = RunManifest::from_json(json::parse(util::read_file(manifest_path)));
            if (prior.run_id == manifest.run_id) manifest.stage_outputs = prior.stage_outputs;
        } catch (const std::exception&) {
            // unreadable manifest: rebuild from scratch
        }
    }

    StageIo io{config, run_dir, manifest};
    std::vector<Stage> ordered;
    for (Stage s : all_stages()) {
        if (std::find(stages.begin(), stages.end(), s) != stages.end()) ordered.push_back(s);
    }

    for (Stage stage : ordered) {
        try {
            switch (stage) {
                case Stage::ingest: stage_ingest(io); break;
                case Stage::scan: stage_scan(io); break;
                case Stage::verify: stage_verify(io); break;
                case Stage::label: stage_label(io); break;
                case Stage::analyze: stage_analyze(io); break;
                case Stage::report: stage_report(io); break;
                case Stage::disclose: stage_disclose(io); break;
            }
        } catch (const StageFailure&) {
            throw;
        } catch (const Error& e) {
            throw StageFailure(std::string(to_string(stage)), e.what());
        } catch (const std::exception& e) {
            throw StageFailure(std::string(to_string(stage)), e.what());
        }
    }

    util::write_file(manifest_path, manifest.to_json().dump(2) + "\n");
    return manifest;
}

RunManifest run_pipeline(const PipelineConfig& config) {
    return run_stages(config, all_stages());
}

}  // namespace skillguard::pipeline
