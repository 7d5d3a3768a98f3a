#include "skillguard/taxonomy.hpp"

#include <algorithm>
#include <map>

#include "skillguard/errors.hpp"
#include "skillguard/util.hpp"

namespace skillguard::taxonomy {

namespace {

SourceClass source_class_of_path(const std::string& file_path) {
    std::filesystem::path p(file_path);
    std::string name = p.filename().string();
    if (name == "SKILL.md" || util::to_lower(name) == "skill.md") {
        return SourceClass::instruction_doc;
    }
    if (name == "plugin.json" || name == "settings.json" || name == ".mcp.json") {
        return SourceClass::config;
    }
    std::string ext = util::to_lower(p.extension().string());
    if (ext == ".py" || ext == ".sh" || ext == ".bash" || ext == ".js" || ext == ".mjs" ||
        ext == ".cjs") {
        return SourceClass::script;
    }
    return SourceClass::other;
}

PatternId pattern_of_rule(std::string_view rule_id) {
    if (rule_id.rfind(instructions::kRuleInstructionOverride, 0) == 0) return PatternId::P1;
    if (rule_id.rfind(instructions::kRuleHiddenMarkup, 0) == 0) return PatternId::P2;
    if (rule_id.rfind(instructions::kRuleCoerciveSteering, 0) == 0) return PatternId::P4;
    return PatternId::P1;  // unreached for known rules
}

// Lines of a document; a single trailing newline does not create an extra
// empty line.
std::vector<std::string_view> doc_lines(std::string_view text) {
    if (text.empty()) return {};
    auto lines = util::split_lines(text);
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::size_t lcs_length(const std::vector<std::string_view>& a,
                       const std::vector<std::string_view>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

std::string_view to_string(SourceClass source) {
    switch (source) {
        case SourceClass::instruction_doc: return "instruction_doc";
        case SourceClass::script: return "script";
        case SourceClass::config: return "config";
        case SourceClass::other: return "other";
    }
    return "?";
}

SourceClass source_class_from_string(std::string_view text) {
    if (text == "instruction_doc") return SourceClass::instruction_doc;
    if (text == "script") return SourceClass::script;
    if (text == "config") return SourceClass::config;
    if (text == "other") return SourceClass::other;
    throw Error("unknown source class: " + std::string(text));
}

std::vector<VulnerabilityInstance> label_vulnerabilities(
    const patterns::TriageResult& triage, const verifier::VerificationVerdict& verdict,
    const instructions::InstructionVerdict& instruction_verdict) {
    if (!verdict.forwarded_to_review) {
        throw UnconfirmedSkill("skill '" + triage.skill_id +
                               "' has no runtime indicator; labeling requires confirmation");
    }

    // (pattern, file, evidence) triples; first occurrence wins.
    std::set<std::tuple<PatternId, std::string, std::string>> seen;
    std::vector<VulnerabilityInstance> instances;

    auto add = [&](PatternId id, const std::string& file, int line, const std::string& excerpt) {
        if (!seen.insert({id, file, excerpt}).second) return;
        VulnerabilityInstance inst;
        inst.skill_id = triage.skill_id;
        inst.pattern_id = id;
        inst.severity = pattern_default_severity(id);
        inst.phase = pattern_phase(id);
        inst.source_class = source_class_of_path(file);
        inst.evidence_ref = file + ":" + std::to_string(line) + " " + excerpt;
        instances.push_back(std::move(inst));
    };

    for (const auto& m : triage.matches) {
        add(m.pattern_id, m.file_path, m.line_number, m.matched_text);
    }

    // External-service evidence can add instruction-level instances the
    // heuristic rules did not surface.
    struct FlagRule {
        bool flagged;
        PatternId id;
    };
    const FlagRule flags[] = {{instruction_verdict.p1, PatternId::P1},
                              {instruction_verdict.p2, PatternId::P2},
                              {instruction_verdict.p4, PatternId::P4}};
    for (const auto& ev : instruction_verdict.evidence) {
        if (ev.rule_id != "external_service") {
            add(pattern_of_rule(ev.rule_id), "SKILL.md", ev.line, ev.excerpt);
            continue;
        }
        for (const auto& flag : flags) {
            if (flag.flagged) add(flag.id, "SKILL.md", ev.line, ev.excerpt);
        }
    }

    std::sort(instances.begin(), instances.end(),
              [](const VulnerabilityInstance& a, const VulnerabilityInstance& b) {
                  return std::tie(a.pattern_id, a.evidence_ref) <
                         std::tie(b.pattern_id, b.evidence_ref);
              });
    return instances;
}

VulnerabilityInstance with_severity_override(VulnerabilityInstance instance, Severity severity,
                                             std::string note) {
    if (util::trim(note).empty()) {
        throw Error("severity override requires a justification note");
    }
    instance.severity = severity;
    instance.override_note = std::move(note);
    return instance;
}

MitreTechnique map_mitre(PatternId id) {
    switch (id) {
        case PatternId::E1: return {"T1041", "Exfiltration Over C2 Channel"};
        case PatternId::E2: return {"T1552", "Unsecured Credentials"};
        case PatternId::E3: return {"T1083", "File and Directory Discovery"};
        case PatternId::E4: return {"T1046", "Network Service Discovery"};
        case PatternId::P1: return {"T1059", "Command and Scripting Interpreter"};
        case PatternId::P2: return {"T1027", "Obfuscated Files or Information"};
        case PatternId::P3: return {"T1020", "Automated Exfiltration"};
        case PatternId::P4: return {"T1059", "Command and Scripting Interpreter"};
        case PatternId::PE1: return {"T1068", "Exploitation for Privilege Escalation"};
        case PatternId::PE2: return {"T1548", "Abuse Elevation Control Mechanism"};
        case PatternId::PE3: return {"T1555", "Credentials from Password Stores"};
        case PatternId::SC1: return {"T1059", "Command and Scripting Interpreter"};
        case PatternId::SC2: return {"T1105", "Ingress Tool Transfer"};
        case PatternId::SC3: return {"T1027", "Obfuscated Files or Information"};
    }
    throw UnknownPattern("invalid pattern id");
}

MitreTechnique map_mitre(std::string_view pattern_id) {
    return map_mitre(pattern_id_from_string(pattern_id));
}

std::string_view to_string(ShadowCategory category) {
    switch (category) {
        case ShadowCategory::undocumented_endpoint: return "undocumented_endpoint";
        case ShadowCategory::conditional_trigger: return "conditional_trigger";
        case ShadowCategory::obfuscated_segment: return "obfuscated_segment";
        case ShadowCategory::markup_embedded_instruction: return "markup_embedded_instruction";
        case ShadowCategory::other: return "other";
    }
    return "?";
}

ShadowCategory shadow_category_from_string(std::string_view text) {
    if (text == "undocumented_endpoint") return ShadowCategory::undocumented_endpoint;
    if (text == "conditional_trigger") return ShadowCategory::conditional_trigger;
    if (text == "obfuscated_segment") return ShadowCategory::obfuscated_segment;
    if (text == "markup_embedded_instruction") return ShadowCategory::markup_embedded_instruction;
    if (text == "other") return ShadowCategory::other;
    throw Error("unknown shadow category: " + std::string(text));
}

std::vector<ShadowFeature> detect_shadow_features(
    const corpus::SkillPackage& pkg, const std::vector<verifier::EvidenceTrace>& traces,
    const std::vector<patterns::PatternMatch>& matches) {
    std::vector<ShadowFeature> features;
    std::string documented_claim =
        pkg.documented_endpoints.empty()
            ? "documentation declares no network endpoints"
            : "documented endpoints: " + [&] {
                  std::string s;
                  for (const auto& h : pkg.documented_endpoints) {
                      if (!s.empty()) s += ", ";
                      s += h;
                  }
                  return s;
              }();

    // Undocumented contacted hosts across all rounds.
    std::set<std::string> contacted;
    for (const auto& trace : traces) {
        for (const auto& ev : trace.events) {
            if (ev.kind != verifier::EventKind::net_connect &&
                ev.kind != verifier::EventKind::net_send) {
                continue;
            }
            std::string host = util::to_lower(ev.attributes.value("dst_host", ""));
            if (!host.empty() && !util::is_loopback_host(host)) contacted.insert(host);
        }
    }
    for (const auto& host : contacted) {
        if (pkg.documented_endpoints.count(host) == 0) {
            features.push_back({pkg.skill_id, ShadowCategory::undocumented_endpoint,
                                documented_claim, "runtime contacted " + host});
        }
    }

    // Behavior classes (contacted hosts and event kinds) present in some
    // rounds but absent in others, under differing invocation inputs.
    if (traces.size() >= 2) {
        std::map<std::string, std::size_t> behavior_rounds;
        for (const auto& trace : traces) {
            std::set<std::string> behaviors;
            for (const auto& ev : trace.events) {
                behaviors.insert("event:" + std::string(verifier::to_string(ev.kind)));
                std::string host = util::to_lower(ev.attributes.value("dst_host", ""));
                if (!host.empty() && !util::is_loopback_host(host)) {
                    behaviors.insert("host:" + host);
                }
            }
            for (const auto& b : behaviors) ++behavior_rounds[b];
        }
        for (const auto& [behavior, rounds] : behavior_rounds) {
            if (rounds > 0 && rounds < traces.size()) {
                features.push_back({pkg.skill_id, ShadowCategory::conditional_trigger,
                                    "behavior not documented as input-dependent",
                                    behavior + " observed in " + std::to_string(rounds) + "/" +
                                        std::to_string(traces.size()) + " rounds"});
            }
        }
    }

    for (const auto& m : matches) {
        if (m.pattern_id == PatternId::SC3) {
            features.push_back({pkg.skill_id, ShadowCategory::obfuscated_segment,
                                "documentation describes no encoded logic",
                                m.file_path + ":" + std::to_string(m.line_number) + " " +
                                    m.matched_text});
        } else if (m.pattern_id == PatternId::P2) {
            features.push_back({pkg.skill_id, ShadowCategory::markup_embedded_instruction,
                                "visible documentation omits embedded directives",
                                m.file_path + ":" + std::to_string(m.line_number) + " " +
                                    m.matched_text});
        }
    }

    std::sort(features.begin(), features.end(), [](const ShadowFeature& a, const ShadowFeature& b) {
        return std::tie(a.category, a.observed_behavior) <
               std::tie(b.category, b.observed_behavior);
    });
    return features;
}

std::string_view to_string(SophisticationLevel level) {
    switch (level) {
        case SophisticationLevel::L1: return "L1";
        case SophisticationLevel::L2: return "L2";
        case SophisticationLevel::L3: return "L3";
    }
    return "?";
}

SophisticationLevel stratify_sophistication(const std::set<PatternId>& distinct_patterns,
                                            bool has_shadow) {
    if (distinct_patterns.empty()) {
        throw EmptyPatternSet("sophistication requires at least one pattern");
    }
    bool evasion = distinct_patterns.count(PatternId::SC3) > 0 ||
                   distinct_patterns.count(PatternId::P2) > 0;
    if (distinct_patterns.size() >= 5 && evasion && has_shadow) return SophisticationLevel::L3;
    if (distinct_patterns.size() <= 2 && !evasion && !has_shadow) return SophisticationLevel::L1;
    return SophisticationLevel::L2;
}

std::string_view to_string(Archetype archetype) {
    switch (archetype) {
        case Archetype::DataThief: return "DataThief";
        case Archetype::AgentHijacker: return "AgentHijacker";
        case Archetype::Hybrid: return "Hybrid";
        case Archetype::Uncategorized: return "Uncategorized";
    }
    return "?";
}

Archetype archetype_from_string(std::string_view text) {
    if (text == "DataThief") return Archetype::DataThief;
    if (text == "AgentHijacker") return Archetype::AgentHijacker;
    if (text == "Hybrid") return Archetype::Hybrid;
    if (text == "Uncategorized") return Archetype::Uncategorized;
    throw Error("unknown archetype: " + std::string(text));
}

Archetype classify_archetype(const std::set<PatternId>& distinct_patterns) {
    bool sc2 = distinct_patterns.count(PatternId::SC2) > 0;
    bool p1 = distinct_patterns.count(PatternId::P1) > 0;
    if (sc2 && p1) return Archetype::Hybrid;
    if (sc2) return Archetype::DataThief;
    if (p1) return Archetype::AgentHijacker;
    return Archetype::Uncategorized;
}

CloneComparison clone_similarity(std::string_view doc_a, std::string_view doc_b) {
    auto a = doc_lines(doc_a);
    auto b = doc_lines(doc_b);
    CloneComparison cmp;
    std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) {
        cmp.similarity = 1.0;  // two empty documents are identical
        return cmp;
    }
    std::size_t common = lcs_length(a, b);
    cmp.similarity = static_cast<double>(common) / static_cast<double>(longest);
    cmp.removed_lines = a.size() - common;
    cmp.added_lines = b.size() - common;
    return cmp;
}

}  // namespace skillguard::taxonomy
