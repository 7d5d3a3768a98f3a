#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skillguard/corpus.hpp"

namespace skillguard::instructions {

enum class VerdictSource { heuristic, external_service, merged };

struct Evidence {
    int line = 0;  // 1-based line in the analyzed document
    std::string excerpt;
    std::string rule_id;

    bool operator==(const Evidence&) const = default;
};

/// Outcome of instruction-document analysis for the three instruction-level
/// flags. A true flag always carries at least one evidence excerpt, and every
/// excerpt is a substring of the analyzed document.
struct InstructionVerdict {
    std::string skill_id;
    bool p1 = false;
    bool p2 = false;
    bool p4 = false;
    std::vector<Evidence> evidence;
    VerdictSource source = VerdictSource::heuristic;
};

// Deterministic semantic rules over instruction documents. The pattern engine
// resolves instruction-target detectors through these ids.
inline constexpr std::string_view kRuleInstructionOverride = "instruction_override";
inline constexpr std::string_view kRuleHiddenMarkup = "hidden_markup";
inline constexpr std::string_view kRuleExecExfiltration = "exec_exfiltration";
inline constexpr std::string_view kRuleCoerciveSteering = "coercive_steering";

/// Runs one semantic rule over a document. Throws UnknownSemanticRule.
std::vector<Evidence> apply_semantic_rule(std::string_view rule_id, std::string_view doc);

bool is_semantic_rule(std::string_view rule_id);

/// Pure, deterministic P1/P2/P4 analysis from the built-in semantic rules.
InstructionVerdict analyze_instructions_heuristic(std::string_view doc,
                                                  std::string skill_id = {});

struct ClassifierConfig {
    std::string base_url;             // e.g. "http://127.0.0.1:8799"
    std::string path = "/classify";
    int timeout_ms = 10000;
    std::string rubric_id = "skill_instruction_rubric_v1";
};

struct ClassifierTranscript {
    std::string request_body;
    std::string response_body;
    int http_status = 0;
};

/// Calls the external classifier endpoint. The response must satisfy the wire
/// schema ({"P1","P2","P4","evidence"}), raise true flags only with evidence,
/// and quote only substrings of the document; anything else is rejected.
/// Throws ServiceUnavailable, ClassifierTimeout or SchemaViolation.
InstructionVerdict analyze_instructions_remote(std::string_view doc, const ClassifierConfig& config,
                                               std::string skill_id = {},
                                               ClassifierTranscript* transcript = nullptr);

/// OR of flags, union of evidence. The heuristic side is never suppressed.
InstructionVerdict merge_verdicts(const InstructionVerdict& heuristic,
                                  const InstructionVerdict& remote);

/// Heuristic analysis, merged with the remote verdict when an endpoint is
/// configured and answers with a schema-valid body; falls back to the
/// heuristic-only verdict otherwise.
InstructionVerdict analyze_instructions(std::string_view doc,
                                        const std::optional<ClassifierConfig>& config,
                                        std::string skill_id = {},
                                        std::vector<std::string>* notes = nullptr);

/// Rubric text sent to the external classifier, versioned as
/// skill_instruction_rubric_v1 (also shipped under data/rubrics/).
std::string_view instruction_rubric_text();

enum class Scenario { typical, edge, adversarial };

std::string_view to_string(Scenario scenario);

struct InvocationSpec {
    std::string skill_id;
    Scenario scenario = Scenario::typical;
    std::string entry_point;  // script path, empty when none declared
    std::string activation;   // documented activation phrase
    std::string input_text;
};

/// Deterministic template-based invocation specs spanning the three scenario
/// classes, derived from frontmatter and entry points. Throws Error for n < 1.
std::vector<InvocationSpec> generate_invocations(const corpus::SkillPackage& pkg, int n);

}  // namespace skillguard::instructions
