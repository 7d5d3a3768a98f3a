#include "skillguard/patterns.hpp"

#include <algorithm>
#include <thread>

#include <nlohmann/json.hpp>

#include "skillguard/errors.hpp"
#include "skillguard/instructions.hpp"
#include "skillguard/util.hpp"

using nlohmann::json;

namespace skillguard::patterns {

namespace {

constexpr std::string_view kMetadataRule = "excessive_permissions";
const std::array<std::string, 3> kPermissionKeys = {"permissions", "allowed-tools", "tools"};

std::size_t index_of(PatternId id) { return static_cast<std::size_t>(id); }

bool rule_id_known(std::string_view rule) {
    return instructions::is_semantic_rule(rule) || rule == kMetadataRule;
}

PatternMatch make_match(const corpus::SkillPackage& pkg, PatternId id, std::string file_path,
                        int line, std::string_view text, std::string detector_id) {
    PatternMatch m;
    m.skill_id = pkg.skill_id;
    m.pattern_id = id;
    m.file_path = std::move(file_path);
    m.line_number = line;
    m.matched_text = util::truncate_excerpt(text);
    m.detector_id = std::move(detector_id);
    if (id == PatternId::E1) {
        for (const auto& host : util::extract_hostnames(text)) {
            if (util::is_private_ipv4(host)) {
                m.annotations.push_back("private_ip");
                break;
            }
        }
    }
    return m;
}

void scan_code_blob(const corpus::SkillPackage& pkg, const PatternSet& patterns,
                    const std::string& file_path, std::string_view content,
                    TriageResult& result) {
    if (content.find('\0') != std::string_view::npos) {
        result.warnings.push_back("unreadable content skipped: " + file_path);
        return;
    }
    auto lines = util::split_lines(content);
    for (const auto& def : patterns.definitions()) {
        if (def.target != PatternTarget::code) continue;
        for (const auto& det : patterns.compiled(def.id)) {
            for (std::size_t i = 0; i < lines.size(); ++i) {
                std::string line(lines[i]);
                std::smatch m;
                if (std::regex_search(line, m, det.re)) {
                    result.matches.push_back(make_match(pkg, def.id, file_path,
                                                        static_cast<int>(i + 1), m[0].str(),
                                                        det.id));
                }
            }
        }
    }
}

// Permission-like frontmatter entries never referenced by the instruction doc
// or any script. The tool token is the entry up to its first '('.
void scan_metadata(const corpus::SkillPackage& pkg, TriageResult& result) {
    for (const auto& key : kPermissionKeys) {
        for (const auto& entry : pkg.frontmatter.values(key)) {
            std::string token(util::trim(entry.substr(0, entry.find('('))));
            if (token.empty()) continue;
            bool referenced = util::contains_icase(pkg.instruction_doc, token);
            for (const auto& script : pkg.scripts) {
                if (referenced) break;
                referenced = util::contains_icase(script.content, token);
            }
            if (!referenced) {
                PatternMatch m = make_match(pkg, PatternId::PE1, "SKILL.md", 1, entry,
                                            "PE1.excessive_permissions");
                m.annotations.push_back("key:" + key);
                result.matches.push_back(std::move(m));
            }
        }
    }
}

void scan_instruction_doc(const corpus::SkillPackage& pkg, const PatternSet& patterns,
                          TriageResult& result) {
    for (const auto& def : patterns.definitions()) {
        if (def.target != PatternTarget::instruction) continue;
        for (const auto& det : patterns.compiled(def.id)) {
            auto hits = instructions::apply_semantic_rule(det.rule_id, pkg.instruction_doc);
            for (const auto& hit : hits) {
                result.matches.push_back(
                    make_match(pkg, def.id, "SKILL.md", hit.line, hit.excerpt, hit.rule_id));
            }
        }
    }
}

}  // namespace

const PatternDefinition& PatternSet::definition(PatternId id) const {
    return definitions_.at(index_of(id));
}

const std::vector<CompiledDetector>& PatternSet::compiled(PatternId id) const {
    return per_pattern_.at(index_of(id));
}

PatternSet compile_pattern_set(std::vector<PatternDefinition> definitions) {
    std::set<PatternId> seen;
    for (const auto& def : definitions) {
        if (!seen.insert(def.id).second) {
            throw DuplicatePatternId("duplicate pattern id: " + std::string(to_string(def.id)));
        }
    }
    if (seen.size() != kPatternCount) {
        std::string missing;
        for (PatternId id : all_pattern_ids()) {
            if (seen.count(id) == 0) {
                if (!missing.empty()) missing += ", ";
                missing += to_string(id);
            }
        }
        throw UnknownPatternId("definition set mismatch; missing: " + missing);
    }

    PatternSet set;
    set.definitions_.resize(kPatternCount);
    set.per_pattern_.resize(kPatternCount);
    for (auto& def : definitions) {
        if (def.phase != pattern_phase(def.id)) {
            throw PatternSpecMismatch("wrong phase for " + std::string(to_string(def.id)));
        }
        if (def.default_severity != pattern_default_severity(def.id)) {
            throw PatternSpecMismatch("wrong severity for " + std::string(to_string(def.id)));
        }
        if (def.target != pattern_target(def.id)) {
            throw PatternSpecMismatch("wrong target for " + std::string(to_string(def.id)));
        }
        if (def.detectors.empty()) {
            throw PatternSpecMismatch("no detectors for " + std::string(to_string(def.id)));
        }

        std::vector<CompiledDetector> compiled;
        for (std::size_t i = 0; i < def.detectors.size(); ++i) {
            const DetectorSpec& spec = def.detectors[i];
            CompiledDetector det;
            det.id = std::string(to_string(def.id)) + "." + spec.name;
            if (spec.is_rule()) {
                if (def.target == PatternTarget::code) {
                    throw PatternSpecMismatch("code-target pattern " +
                                              std::string(to_string(def.id)) +
                                              " cannot use a semantic rule");
                }
                if (!rule_id_known(spec.rule)) {
                    throw UnknownSemanticRule("unknown rule '" + spec.rule + "' in " +
                                              std::string(to_string(def.id)));
                }
                det.is_rule = true;
                det.rule_id = spec.rule;
            } else {
                if (def.target != PatternTarget::code) {
                    throw PatternSpecMismatch("non-code pattern " +
                                              std::string(to_string(def.id)) +
                                              " must use semantic rules");
                }
                auto flags = std::regex::ECMAScript;
                if (spec.icase) flags |= std::regex::icase;
                try {
                    det.re = std::regex(spec.regex, flags);
                } catch (const std::regex_error& e) {
                    throw RegexCompileError(std::string(to_string(def.id)), i, e.what());
                }
                det.regex_text = spec.regex;
                det.icase = spec.icase;
            }
            compiled.push_back(std::move(det));
        }
        std::size_t idx = index_of(def.id);
        set.per_pattern_[idx] = std::move(compiled);
        set.definitions_[idx] = std::move(def);
    }
    return set;
}

std::vector<PatternDefinition> parse_pattern_definitions(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(std::string("pattern file is not valid structured text: ") + e.what());
    }
    if (!root.is_object() || root.value("schema", 0) != 1) {
        throw Error("pattern file must declare schema 1");
    }
    if (!root.contains("patterns") || !root["patterns"].is_array()) {
        throw Error("pattern file missing patterns array");
    }

    std::vector<PatternDefinition> defs;
    for (const auto& p : root["patterns"]) {
        PatternDefinition def;
        try {
            def.id = pattern_id_from_string(p.at("id").get<std::string>());
        } catch (const UnknownPattern& e) {
            throw UnknownPatternId(e.what());
        }
        def.name = p.at("name").get<std::string>();
        def.phase = phase_from_string(p.at("phase").get<std::string>());
        def.default_severity = severity_from_string(p.at("severity").get<std::string>());
        def.target = target_from_string(p.at("target").get<std::string>());
        for (const auto& d : p.at("detectors")) {
            DetectorSpec spec;
            spec.name = d.at("name").get<std::string>();
            spec.regex = d.value("regex", "");
            spec.icase = d.value("icase", false);
            spec.rule = d.value("rule", "");
            def.detectors.push_back(std::move(spec));
        }
        defs.push_back(std::move(def));
    }
    return defs;
}

PatternSet load_pattern_file(const std::filesystem::path& path) {
    return compile_pattern_set(parse_pattern_definitions(util::read_file(path)));
}

const PatternSet& canonical_pattern_set() {
    static const PatternSet set =
        compile_pattern_set(parse_pattern_definitions(canonical_pattern_json()));
    return set;
}

TriageResult scan_skill(const corpus::SkillPackage& pkg, const PatternSet& patterns) {
    TriageResult result;
    result.skill_id = pkg.skill_id;

    for (const auto& script : pkg.scripts) {
        if (script.kind == ScriptKind::other) continue;  // recorded but never scanned
        scan_code_blob(pkg, patterns, script.path, script.content, result);
    }
    for (const auto& [path, bytes] : pkg.config_files) {
        scan_code_blob(pkg, patterns, path, bytes, result);
    }
    scan_metadata(pkg, result);
    scan_instruction_doc(pkg, patterns, result);

    std::sort(result.matches.begin(), result.matches.end(),
              [](const PatternMatch& a, const PatternMatch& b) {
                  return std::tie(a.file_path, a.line_number, a.pattern_id, a.detector_id) <
                         std::tie(b.file_path, b.line_number, b.pattern_id, b.detector_id);
              });
    result.flagged = !result.matches.empty();
    for (const auto& m : result.matches) result.distinct_patterns.insert(m.pattern_id);
    return result;
}

std::pair<std::vector<TriageResult>, TriageSummary> triage_corpus(
    const std::vector<corpus::SkillPackage>& packages, const PatternSet& patterns,
    int parallelism) {
    std::vector<TriageResult> results(packages.size());
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) results[i] = scan_skill(packages[i], patterns);
    };

    std::size_t n_threads = std::max(1, parallelism);
    if (n_threads <= 1 || packages.size() < 2) {
        worker(0, packages.size());
    } else {
        n_threads = std::min<std::size_t>(n_threads, packages.size());
        std::vector<std::thread> threads;
        std::size_t chunk = (packages.size() + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            std::size_t begin = t * chunk;
            std::size_t end = std::min(packages.size(), begin + chunk);
            if (begin >= end) break;
            threads.emplace_back(worker, begin, end);
        }
        for (auto& th : threads) th.join();
    }

    TriageSummary summary;
    summary.total_skills = packages.size();
    for (const auto& r : results) {
        if (r.flagged) ++summary.flagged;
        for (PatternId id : r.distinct_patterns) ++summary.skills_per_pattern[id];
    }
    summary.flag_rate = packages.empty()
                            ? 0.0
                            : static_cast<double>(summary.flagged) /
                                  static_cast<double>(summary.total_skills);
    return {std::move(results), summary};
}

std::optional<std::pair<PatternId, std::string>> match_code_text(const PatternSet& patterns,
                                                                 std::string_view text) {
    auto lines = util::split_lines(text);
    for (const auto& def : patterns.definitions()) {
        if (def.target != PatternTarget::code) continue;
        for (const auto& det : patterns.compiled(def.id)) {
            for (const auto& line_view : lines) {
                std::string line(line_view);
                if (std::regex_search(line, det.re)) {
                    return std::make_pair(def.id, det.id);
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace skillguard::patterns
