#include "skillguard/types.hpp"

#include "skillguard/errors.hpp"

namespace skillguard {

std::string_view to_string(PatternId id) {
    switch (id) {
        case PatternId::E1: return "E1";
        case PatternId::E2: return "E2";
        case PatternId::E3: return "E3";
        case PatternId::E4: return "E4";
        case PatternId::P1: return "P1";
        case PatternId::P2: return "P2";
        case PatternId::P3: return "P3";
        case PatternId::P4: return "P4";
        case PatternId::PE1: return "PE1";
        case PatternId::PE2: return "PE2";
        case PatternId::PE3: return "PE3";
        case PatternId::SC1: return "SC1";
        case PatternId::SC2: return "SC2";
        case PatternId::SC3: return "SC3";
    }
    return "?";
}

std::string_view to_string(Severity sev) {
    switch (sev) {
        case Severity::LOW: return "LOW";
        case Severity::MEDIUM: return "MEDIUM";
        case Severity::HIGH: return "HIGH";
        case Severity::CRITICAL: return "CRITICAL";
    }
    return "?";
}

std::string_view to_string(KillChainPhase phase) {
    switch (phase) {
        case KillChainPhase::Reconnaissance: return "Reconnaissance";
        case KillChainPhase::CredentialAccess: return "CredentialAccess";
        case KillChainPhase::Execution: return "Execution";
        case KillChainPhase::DefenseEvasion: return "DefenseEvasion";
        case KillChainPhase::Exfiltration: return "Exfiltration";
        case KillChainPhase::Impact: return "Impact";
    }
    return "?";
}

std::string_view to_string(PatternTarget target) {
    switch (target) {
        case PatternTarget::code: return "code";
        case PatternTarget::instruction: return "instruction";
        case PatternTarget::metadata: return "metadata";
    }
    return "?";
}

std::string_view to_string(RegistrySource source) {
    switch (source) {
        case RegistrySource::skills_rest: return "skills_rest";
        case RegistrySource::skillsmp: return "skillsmp";
        case RegistrySource::local: return "local";
    }
    return "?";
}

std::string_view to_string(ScriptKind kind) {
    switch (kind) {
        case ScriptKind::python: return "python";
        case ScriptKind::shell: return "shell";
        case ScriptKind::javascript: return "javascript";
        case ScriptKind::other: return "other";
    }
    return "?";
}

std::string_view to_string(DisclosureStatus status) {
    switch (status) {
        case DisclosureStatus::reported: return "reported";
        case DisclosureStatus::removed: return "removed";
        case DisclosureStatus::pending: return "pending";
    }
    return "?";
}

PatternId pattern_id_from_string(std::string_view text) {
    for (PatternId id : all_pattern_ids()) {
        if (to_string(id) == text) return id;
    }
    throw UnknownPattern("unknown pattern id: " + std::string(text));
}

Severity severity_from_string(std::string_view text) {
    if (text == "LOW") return Severity::LOW;
    if (text == "MEDIUM") return Severity::MEDIUM;
    if (text == "HIGH") return Severity::HIGH;
    if (text == "CRITICAL") return Severity::CRITICAL;
    throw Error("unknown severity: " + std::string(text));
}

KillChainPhase phase_from_string(std::string_view text) {
    if (text == "Reconnaissance") return KillChainPhase::Reconnaissance;
    if (text == "CredentialAccess") return KillChainPhase::CredentialAccess;
    if (text == "Execution") return KillChainPhase::Execution;
    if (text == "DefenseEvasion") return KillChainPhase::DefenseEvasion;
    if (text == "Exfiltration") return KillChainPhase::Exfiltration;
    if (text == "Impact") return KillChainPhase::Impact;
    throw Error("unknown kill chain phase: " + std::string(text));
}

PatternTarget target_from_string(std::string_view text) {
    if (text == "code") return PatternTarget::code;
    if (text == "instruction") return PatternTarget::instruction;
    if (text == "metadata") return PatternTarget::metadata;
    throw Error("unknown pattern target: " + std::string(text));
}

RegistrySource registry_source_from_string(std::string_view text) {
    if (text == "skills_rest") return RegistrySource::skills_rest;
    if (text == "skillsmp") return RegistrySource::skillsmp;
    if (text == "local") return RegistrySource::local;
    throw Error("unknown registry source: " + std::string(text));
}

ScriptKind script_kind_from_string(std::string_view text) {
    if (text == "python") return ScriptKind::python;
    if (text == "shell") return ScriptKind::shell;
    if (text == "javascript") return ScriptKind::javascript;
    if (text == "other") return ScriptKind::other;
    throw Error("unknown script kind: " + std::string(text));
}

DisclosureStatus disclosure_status_from_string(std::string_view text) {
    if (text == "reported") return DisclosureStatus::reported;
    if (text == "removed") return DisclosureStatus::removed;
    if (text == "pending") return DisclosureStatus::pending;
    throw Error("unknown disclosure status: " + std::string(text));
}

KillChainPhase pattern_phase(PatternId id) {
    switch (id) {
        case PatternId::E3:
        case PatternId::E4: return KillChainPhase::Reconnaissance;
        case PatternId::E2:
        case PatternId::PE3: return KillChainPhase::CredentialAccess;
        case PatternId::SC1:
        case PatternId::SC2: return KillChainPhase::Execution;
        case PatternId::SC3:
        case PatternId::P2: return KillChainPhase::DefenseEvasion;
        case PatternId::E1:
        case PatternId::P3: return KillChainPhase::Exfiltration;
        case PatternId::P1:
        case PatternId::P4:
        case PatternId::PE1:
        case PatternId::PE2: return KillChainPhase::Impact;
    }
    throw UnknownPattern("invalid pattern id");
}

Severity pattern_default_severity(PatternId id) {
    switch (id) {
        case PatternId::E2:
        case PatternId::PE3:
        case PatternId::SC2:
        case PatternId::SC3: return Severity::CRITICAL;
        case PatternId::E1:
        case PatternId::P1:
        case PatternId::P2:
        case PatternId::P3:
        case PatternId::SC1: return Severity::HIGH;
        case PatternId::E3:
        case PatternId::E4:
        case PatternId::P4:
        case PatternId::PE2: return Severity::MEDIUM;
        case PatternId::PE1: return Severity::LOW;
    }
    throw UnknownPattern("invalid pattern id");
}

PatternTarget pattern_target(PatternId id) {
    switch (id) {
        case PatternId::P1:
        case PatternId::P2:
        case PatternId::P3:
        case PatternId::P4: return PatternTarget::instruction;
        case PatternId::PE1: return PatternTarget::metadata;
        default: return PatternTarget::code;
    }
}

std::set<KillChainPhase> phases_of(const std::set<PatternId>& patterns) {
    std::set<KillChainPhase> phases;
    for (PatternId id : patterns) phases.insert(pattern_phase(id));
    return phases;
}

}  // namespace skillguard
