#pragma once

#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "skillguard/corpus.hpp"
#include "skillguard/types.hpp"

namespace skillguard::patterns {

/// One detector within a pattern: a regular expression for code/metadata
/// targets, or a semantic-rule id for instruction targets.
struct DetectorSpec {
    std::string name;
    std::string regex;  // empty for rule detectors
    bool icase = false;
    std::string rule;  // empty for regex detectors

    bool is_rule() const { return !rule.empty(); }
};

struct PatternDefinition {
    PatternId id = PatternId::E1;
    std::string name;
    KillChainPhase phase = KillChainPhase::Reconnaissance;
    Severity default_severity = Severity::LOW;
    PatternTarget target = PatternTarget::code;
    std::vector<DetectorSpec> detectors;
};

struct CompiledDetector {
    std::string id;  // "<pattern>.<detector-name>"
    bool is_rule = false;
    std::string rule_id;
    std::regex re;
    std::string regex_text;
    bool icase = false;
};

/// Immutable compiled pattern set; safe to share across threads.
class PatternSet {
public:
    const std::vector<PatternDefinition>& definitions() const { return definitions_; }
    const PatternDefinition& definition(PatternId id) const;
    const std::vector<CompiledDetector>& compiled(PatternId id) const;

    friend PatternSet compile_pattern_set(std::vector<PatternDefinition> definitions);

private:
    std::vector<PatternDefinition> definitions_;                // indexed by PatternId value
    std::vector<std::vector<CompiledDetector>> per_pattern_;    // same indexing
};

/// Validates and compiles a full 14-pattern definition set. Throws
/// UnknownPatternId, DuplicatePatternId, RegexCompileError or
/// PatternSpecMismatch. Compilation is order-independent.
PatternSet compile_pattern_set(std::vector<PatternDefinition> definitions);

/// Parses the structured-text pattern definition format (schema 1).
std::vector<PatternDefinition> parse_pattern_definitions(std::string_view json_text);

PatternSet load_pattern_file(const std::filesystem::path& path);

/// The bundled canonical definition set (also shipped as data/patterns.json).
const PatternSet& canonical_pattern_set();
std::string_view canonical_pattern_json();

struct PatternMatch {
    std::string skill_id;
    PatternId pattern_id = PatternId::E1;
    std::string file_path;
    int line_number = 1;  // 1-based
    std::string matched_text;  // <= 200 chars, substring of the named file
    std::string detector_id;
    std::vector<std::string> annotations;  // e.g. "private_ip" on RFC1918 E1 hits
};

struct TriageResult {
    std::string skill_id;
    std::vector<PatternMatch> matches;  // sorted by (file_path, line_number, pattern_id)
    bool flagged = false;               // <=> !matches.empty()
    std::set<PatternId> distinct_patterns;
    std::vector<std::string> warnings;
};

/// Scans one package: code detectors over python/shell/javascript scripts and
/// config files, the metadata rule over frontmatter, instruction rules over
/// the instruction document. Total: unreadable content yields warnings, never
/// errors.
TriageResult scan_skill(const corpus::SkillPackage& pkg, const PatternSet& patterns);

struct TriageSummary {
    std::size_t total_skills = 0;
    std::size_t flagged = 0;
    double flag_rate = 0.0;
    std::map<PatternId, std::size_t> skills_per_pattern;
};

std::pair<std::vector<TriageResult>, TriageSummary> triage_corpus(
    const std::vector<corpus::SkillPackage>& packages, const PatternSet& patterns,
    int parallelism = 1);

/// First code-target detector matching the given text, if any. Used by the
/// runtime oracle to test decoded payloads.
std::optional<std::pair<PatternId, std::string>> match_code_text(const PatternSet& patterns,
                                                                 std::string_view text);

}  // namespace skillguard::patterns
