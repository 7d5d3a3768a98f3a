#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

namespace skillguard {

/// The 14 detection patterns. Enum order is the canonical axis ordering used
/// by matrices and exports.
enum class PatternId : std::uint8_t {
    E1, E2, E3, E4,
    P1, P2, P3, P4,
    PE1, PE2, PE3,
    SC1, SC2, SC3,
};

inline constexpr std::size_t kPatternCount = 14;

constexpr std::array<PatternId, kPatternCount> all_pattern_ids() {
    return {PatternId::E1, PatternId::E2, PatternId::E3, PatternId::E4,
            PatternId::P1, PatternId::P2, PatternId::P3, PatternId::P4,
            PatternId::PE1, PatternId::PE2, PatternId::PE3,
            PatternId::SC1, PatternId::SC2, PatternId::SC3};
}

enum class Severity : std::uint8_t { LOW, MEDIUM, HIGH, CRITICAL };

/// Six attack phases with a fixed total order from Reconnaissance to Impact.
enum class KillChainPhase : std::uint8_t {
    Reconnaissance,
    CredentialAccess,
    Execution,
    DefenseEvasion,
    Exfiltration,
    Impact,
};

enum class PatternTarget : std::uint8_t { code, instruction, metadata };

enum class RegistrySource : std::uint8_t { skills_rest, skillsmp, local };

enum class ScriptKind : std::uint8_t { python, shell, javascript, other };

enum class DisclosureStatus : std::uint8_t { reported, removed, pending };

std::string_view to_string(PatternId id);
std::string_view to_string(Severity sev);
std::string_view to_string(KillChainPhase phase);
std::string_view to_string(PatternTarget target);
std::string_view to_string(RegistrySource source);
std::string_view to_string(ScriptKind kind);
std::string_view to_string(DisclosureStatus status);

/// Throws UnknownPattern for ids outside the 14-id set.
PatternId pattern_id_from_string(std::string_view text);
Severity severity_from_string(std::string_view text);
KillChainPhase phase_from_string(std::string_view text);
PatternTarget target_from_string(std::string_view text);
RegistrySource registry_source_from_string(std::string_view text);
ScriptKind script_kind_from_string(std::string_view text);
DisclosureStatus disclosure_status_from_string(std::string_view text);

/// Static phase assignment per pattern id.
KillChainPhase pattern_phase(PatternId id);

/// Guideline default severity per pattern id.
Severity pattern_default_severity(PatternId id);

/// Which part of a skill package a pattern's detectors examine.
PatternTarget pattern_target(PatternId id);

/// Phases spanned by a set of patterns.
std::set<KillChainPhase> phases_of(const std::set<PatternId>& patterns);

}  // namespace skillguard
