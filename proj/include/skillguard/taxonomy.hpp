#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "skillguard/instructions.hpp"
#include "skillguard/patterns.hpp"
#include "skillguard/types.hpp"
#include "skillguard/verifier.hpp"

namespace skillguard::taxonomy {

enum class SourceClass : std::uint8_t { instruction_doc, script, config, other };

std::string_view to_string(SourceClass source);
SourceClass source_class_from_string(std::string_view text);

struct VulnerabilityInstance {
    std::string skill_id;
    PatternId pattern_id = PatternId::E1;
    Severity severity = Severity::LOW;  // guideline default unless overridden
    KillChainPhase phase = KillChainPhase::Reconnaissance;
    SourceClass source_class = SourceClass::other;
    std::string evidence_ref;  // "<file>:<line>" plus excerpt
    std::string override_note;  // nonempty iff severity was overridden
};

/// Extracts one instance per distinct (pattern, file, evidence) triple from a
/// confirmed skill's triage matches and instruction verdict. Throws
/// UnconfirmedSkill when the runtime verdict raised no indicator.
std::vector<VulnerabilityInstance> label_vulnerabilities(
    const patterns::TriageResult& triage, const verifier::VerificationVerdict& verdict,
    const instructions::InstructionVerdict& instruction_verdict);

/// Severity override with a mandatory justification note (surfaced in
/// exports). Throws Error on an empty note.
VulnerabilityInstance with_severity_override(VulnerabilityInstance instance, Severity severity,
                                             std::string note);

struct MitreTechnique {
    std::string technique_id;
    std::string name;
};

MitreTechnique map_mitre(PatternId id);
/// String-id variant; throws UnknownPattern for ids outside the 14-id set.
MitreTechnique map_mitre(std::string_view pattern_id);

enum class ShadowCategory : std::uint8_t {
    undocumented_endpoint,
    conditional_trigger,
    obfuscated_segment,
    markup_embedded_instruction,
    other,
};

std::string_view to_string(ShadowCategory category);
ShadowCategory shadow_category_from_string(std::string_view text);

struct ShadowFeature {
    std::string skill_id;
    ShadowCategory category = ShadowCategory::other;
    std::string documented_claim;
    std::string observed_behavior;
};

/// Documentation-versus-behavior diff: undocumented contacted hosts,
/// obfuscated segments (SC3 matches), markup-embedded instructions (P2
/// matches) and behaviors present in some invocation rounds but absent in
/// others. Deterministic ordering.
std::vector<ShadowFeature> detect_shadow_features(
    const corpus::SkillPackage& pkg, const std::vector<verifier::EvidenceTrace>& traces,
    const std::vector<patterns::PatternMatch>& matches);

enum class SophisticationLevel : std::uint8_t { L1 = 1, L2 = 2, L3 = 3 };

std::string_view to_string(SophisticationLevel level);

/// L1: at most 2 patterns, no evasion (SC3/P2), no shadow features.
/// L3: 5+ patterns AND evasion AND shadow features. L2 otherwise.
/// Throws EmptyPatternSet.
SophisticationLevel stratify_sophistication(const std::set<PatternId>& distinct_patterns,
                                            bool has_shadow);

enum class Archetype : std::uint8_t { DataThief, AgentHijacker, Hybrid, Uncategorized };

std::string_view to_string(Archetype archetype);
Archetype archetype_from_string(std::string_view text);

/// Membership of SC2 and P1 alone decides the archetype.
Archetype classify_archetype(const std::set<PatternId>& distinct_patterns);

struct CloneComparison {
    double similarity = 0.0;  // line-level LCS / max(line counts)
    std::size_t added_lines = 0;
    std::size_t removed_lines = 0;
};

CloneComparison clone_similarity(std::string_view doc_a, std::string_view doc_b);

}  // namespace skillguard::taxonomy
