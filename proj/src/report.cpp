#include <algorithm>
#include <iomanip>
#include <sstream>

#include "skillguard/errors.hpp"
#include "skillguard/pipeline.hpp"
#include "skillguard/util.hpp"

using nlohmann::json;

namespace skillguard::pipeline {

namespace {

std::string percent(std::size_t part, std::size_t whole) {
    if (whole == 0) return "0.0%";
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(1)
       << 100.0 * static_cast<double>(part) / static_cast<double>(whole) << "%";
    return ss.str();
}

void histogram_section(std::ostringstream& out, const json& hist, const char* unit) {
    std::vector<std::pair<int, std::size_t>> rows;
    for (const auto& [key, value] : hist.items()) {
        rows.emplace_back(std::stoi(key), value.get<std::size_t>());
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [bucket, count] : rows) {
        out << "  " << std::setw(3) << bucket << " " << unit << ": " << count << " skill(s)\n";
    }
}

std::string replace_all(std::string text, const std::string& needle, const std::string& with) {
    if (needle.empty()) return text;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), with);
        pos += with.size();
    }
    return text;
}

}  // namespace

std::string generate_report(const std::vector<tiers::T3Entry>& t3_entries,
                            const json& analysis) {
    if (t3_entries.empty()) throw EmptyTier3("report requires at least one confirmed skill");

    std::size_t total_instances = 0;
    std::map<Severity, std::size_t> severity;
    for (const auto& e : t3_entries) {
        total_instances += e.instances.size();
        for (const auto& inst : e.instances) ++severity[inst.severity];
    }

    std::ostringstream out;
    out << "CONFIRMED MALICIOUS SKILLS: ANALYSIS REPORT\n";
    out << "===========================================\n\n";
    out << "Confirmed skills:        " << t3_entries.size() << "\n";
    out << "Vulnerability instances: " << total_instances << "\n";
    if (t3_entries.size() > 0) {
        out << "Average per skill:       " << std::fixed << std::setprecision(2)
            << static_cast<double>(total_instances) / static_cast<double>(t3_entries.size())
            << "\n";
    }
    out << "\nSeverity distribution\n---------------------\n";
    for (Severity sev :
         {Severity::CRITICAL, Severity::HIGH, Severity::MEDIUM, Severity::LOW}) {
        std::size_t count = severity.count(sev) ? severity[sev] : 0;
        out << "  " << std::setw(8) << to_string(sev) << ": " << std::setw(5) << count << " ("
            << percent(count, total_instances) << ")\n";
    }

    if (analysis.contains("density_histogram")) {
        out << "\nVulnerability density histogram\n-------------------------------\n";
        histogram_section(out, analysis["density_histogram"], "vuln(s)");
    }
    if (analysis.contains("phase_coverage")) {
        const auto& pc = analysis["phase_coverage"];
        out << "\nKill chain phase coverage\n-------------------------\n";
        out << "  median " << pc["median"].get<double>() << ", mean " << std::fixed
            << std::setprecision(3) << pc["mean"].get<double>() << ", share >=3 phases "
            << std::setprecision(3) << pc["share_ge3"].get<double>() << "\n";
        histogram_section(out, pc["histogram"], "phase(s)");
    }

    out << "\nArchetypes\n----------\n";
    std::map<taxonomy::Archetype, std::size_t> archetypes;
    std::map<taxonomy::SophisticationLevel, std::size_t> levels;
    for (const auto& e : t3_entries) {
        ++archetypes[e.archetype];
        ++levels[e.level];
    }
    for (auto a : {taxonomy::Archetype::DataThief, taxonomy::Archetype::AgentHijacker,
                   taxonomy::Archetype::Hybrid, taxonomy::Archetype::Uncategorized}) {
        out << "  " << std::setw(13) << taxonomy::to_string(a) << ": "
            << (archetypes.count(a) ? archetypes[a] : 0) << "\n";
    }
    out << "\nSophistication levels\n---------------------\n";
    for (auto l : {taxonomy::SophisticationLevel::L1, taxonomy::SophisticationLevel::L2,
                   taxonomy::SophisticationLevel::L3}) {
        out << "  " << taxonomy::to_string(l) << ": " << (levels.count(l) ? levels[l] : 0)
            << "\n";
    }

    if (analysis.contains("chains")) {
        out << "\nAttack chains (Fisher exact, Bonferroni-adjusted alpha";
        if (!analysis["chains"].empty()) {
            out << " = " << analysis["chains"][0]["adjusted_alpha"].get<double>();
        }
        out << ")\n-------------\n";
        if (analysis["chains"].empty()) out << "  none at the configured support threshold\n";
        for (const auto& c : analysis["chains"]) {
            out << "  " << c["from"].get<std::string>() << " -> " << c["to"].get<std::string>()
                << "  co=" << c["co_count"].get<std::size_t>() << "  OR=" << std::fixed
                << std::setprecision(3) << c["odds_ratio"].get<double>() << "  p=" << std::scientific
                << std::setprecision(3) << c["p_value"].get<double>()
                << (c["significant"].get<bool>() ? "  [significant]" : "") << "\n";
            out << std::defaultfloat;
        }
    }
    if (analysis.contains("vulnerability_density")) {
        const auto& vd = analysis["vulnerability_density"];
        out << "\nDensity metrics: gini=" << std::fixed << std::setprecision(3)
            << vd["gini"].get<double>() << ", excess kurtosis=" << std::setprecision(3)
            << vd["excess_kurtosis"].get<double>() << "\n";
    }
    return out.str();
}

json packet_to_json(const DisclosurePacket& packet) {
    return json{{"skill_id", packet.skill_id},
                {"registry_source", std::string(to_string(packet.registry_source))},
                {"evidence_summary", packet.evidence_summary},
                {"severity_rollup", packet.severity_rollup},
                {"mitre_ids", packet.mitre_ids},
                {"status", std::string(to_string(packet.status))}};
}

std::vector<DisclosurePacket> disclosure_export(
    const std::vector<tiers::T3Entry>& t3_entries,
    const std::map<std::string, RegistrySource>& registry_sources,
    const verifier::HoneypotSet& honeypots) {
    if (t3_entries.empty()) throw EmptyTier3("disclosure requires at least one confirmed skill");

    auto redact = [&](std::string text) {
        for (const auto& h : honeypots.entries) {
            text = replace_all(std::move(text), h.secret_value, "[HONEYPOT]");
            text = replace_all(std::move(text), h.marker, "[HONEYPOT]");
        }
        return text;
    };

    std::vector<DisclosurePacket> packets;
    for (const auto& entry : t3_entries) {
        DisclosurePacket packet;
        packet.skill_id = entry.skill_id;
        if (auto it = registry_sources.find(entry.skill_id); it != registry_sources.end()) {
            packet.registry_source = it->second;
        }
        packet.status = entry.disclosure_status;
        packet.mitre_ids = entry.mitre_ids;

        for (const auto& inst : entry.instances) {
            std::string line = std::string(to_string(inst.pattern_id)) + " [" +
                               std::string(to_string(inst.severity)) + ", " +
                               std::string(to_string(inst.phase)) + "] " + inst.evidence_ref;
            packet.evidence_summary.push_back(util::truncate_excerpt(redact(line)));
            ++packet.severity_rollup[std::string(to_string(inst.severity))];
        }
        for (const auto& sf : entry.shadow_features) {
            std::string line =
                "shadow " + std::string(taxonomy::to_string(sf.category)) + ": " +
                sf.observed_behavior;
            packet.evidence_summary.push_back(util::truncate_excerpt(redact(line)));
        }
        for (const auto& chain : entry.chain_memberships) {
            packet.evidence_summary.push_back("chain " + chain);
        }

        std::string serialized = packet_to_json(packet).dump();
        for (const auto& h : honeypots.entries) {
            if (serialized.find(h.secret_value) != std::string::npos ||
                serialized.find(h.marker) != std::string::npos) {
                throw RedactionFailure("honeypot value survived redaction for " + entry.skill_id);
            }
        }
        packets.push_back(std::move(packet));
    }
    return packets;
}

}  // namespace skillguard::pipeline
