#include "skillguard/tiers.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "skillguard/errors.hpp"
#include "skillguard/util.hpp"

using nlohmann::json;

namespace skillguard::tiers {

namespace {

json instance_to_json(const taxonomy::VulnerabilityInstance& inst) {
    return json{{"skill_id", inst.skill_id},
                {"pattern_id", std::string(to_string(inst.pattern_id))},
                {"severity", std::string(to_string(inst.severity))},
                {"phase", std::string(to_string(inst.phase))},
                {"source_class", std::string(taxonomy::to_string(inst.source_class))},
                {"evidence_ref", inst.evidence_ref},
                {"override_note", inst.override_note}};
}

taxonomy::VulnerabilityInstance instance_from_json(const json& j) {
    taxonomy::VulnerabilityInstance inst;
    inst.skill_id = j.at("skill_id").get<std::string>();
    inst.pattern_id = pattern_id_from_string(j.at("pattern_id").get<std::string>());
    inst.severity = severity_from_string(j.at("severity").get<std::string>());
    inst.phase = phase_from_string(j.at("phase").get<std::string>());
    inst.source_class = taxonomy::source_class_from_string(j.at("source_class").get<std::string>());
    inst.evidence_ref = j.at("evidence_ref").get<std::string>();
    inst.override_note = j.value("override_note", "");
    return inst;
}

json shadow_to_json(const taxonomy::ShadowFeature& sf) {
    return json{{"skill_id", sf.skill_id},
                {"category", std::string(taxonomy::to_string(sf.category))},
                {"documented_claim", sf.documented_claim},
                {"observed_behavior", sf.observed_behavior}};
}

taxonomy::ShadowFeature shadow_from_json(const json& j) {
    taxonomy::ShadowFeature sf;
    sf.skill_id = j.at("skill_id").get<std::string>();
    sf.category = taxonomy::shadow_category_from_string(j.at("category").get<std::string>());
    sf.documented_claim = j.at("documented_claim").get<std::string>();
    sf.observed_behavior = j.at("observed_behavior").get<std::string>();
    return sf;
}

template <typename Entry>
std::vector<const Entry*> sorted_by_id(const std::vector<Entry>& entries) {
    std::vector<const Entry*> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(&e);
    std::sort(out.begin(), out.end(),
              [](const Entry* a, const Entry* b) { return a->skill_id < b->skill_id; });
    return out;
}

void check_containment(const TierAnnotations& annotations) {
    std::set<std::string> t1_ids, t2_ids;
    for (const auto& e : annotations.t1) t1_ids.insert(e.skill_id);
    for (const auto& e : annotations.t2) {
        t2_ids.insert(e.skill_id);
        if (t1_ids.count(e.skill_id) == 0) {
            throw TierContainmentViolation("T2 skill '" + e.skill_id + "' missing from T1");
        }
    }
    for (const auto& e : annotations.t3) {
        if (t2_ids.count(e.skill_id) == 0) {
            throw TierContainmentViolation("T3 skill '" + e.skill_id + "' missing from T2");
        }
        if (e.instances.empty()) {
            throw EmptyPatternSet("T3 skill '" + e.skill_id + "' carries no instances");
        }
    }
}

}  // namespace

std::string_view to_string(Tier tier) {
    switch (tier) {
        case Tier::T1: return "T1";
        case Tier::T2: return "T2";
        case Tier::T3: return "T3";
    }
    return "?";
}

std::set<PatternId> T3Entry::distinct_patterns() const {
    std::set<PatternId> out;
    for (const auto& inst : instances) out.insert(inst.pattern_id);
    return out;
}

std::string export_tier(const TierAnnotations& annotations, Tier tier) {
    check_containment(annotations);

    std::string out;
    json header{{"schema", 1},
                {"record", "tier_header"},
                {"tier", std::string(to_string(tier))}};
    out += header.dump();
    out += '\n';

    if (tier == Tier::T1) {
        for (const T1Entry* e : sorted_by_id(annotations.t1)) {
            json rec{{"record", "skill"},
                     {"skill_id", e->skill_id},
                     {"registry_source", std::string(to_string(e->registry_source))},
                     {"doc_size_bytes", e->doc_size_bytes}};
            out += rec.dump();
            out += '\n';
        }
    } else if (tier == Tier::T2) {
        for (const T2Entry* e : sorted_by_id(annotations.t2)) {
            json matched = json::array();
            auto sorted = e->matched;
            std::sort(sorted.begin(), sorted.end());
            for (const auto& [id, sev] : sorted) {
                matched.push_back({{"pattern_id", std::string(to_string(id))},
                                   {"severity", std::string(to_string(sev))}});
            }
            json rec{{"record", "skill"}, {"skill_id", e->skill_id}, {"matched", matched}};
            out += rec.dump();
            out += '\n';
        }
    } else {
        for (const T3Entry* e : sorted_by_id(annotations.t3)) {
            json instances = json::array();
            for (const auto& inst : e->instances) instances.push_back(instance_to_json(inst));
            json shadows = json::array();
            for (const auto& sf : e->shadow_features) shadows.push_back(shadow_to_json(sf));
            json rec{{"record", "skill"},
                     {"skill_id", e->skill_id},
                     {"instances", instances},
                     {"shadow_features", shadows},
                     {"chain_memberships", e->chain_memberships},
                     {"level", std::string(taxonomy::to_string(e->level))},
                     {"archetype", std::string(taxonomy::to_string(e->archetype))},
                     {"disclosure_status", std::string(to_string(e->disclosure_status))},
                     {"mitre_ids", e->mitre_ids}};
            out += rec.dump();
            out += '\n';
        }
    }
    return out;
}

TierDataset parse_tier_export(std::string_view text) {
    TierDataset dataset;
    bool have_header = false;
    for (std::string_view line : util::split_lines(text)) {
        if (util::trim(line).empty()) continue;
        json j = json::parse(line);
        if (!have_header) {
            if (j.value("record", "") != "tier_header" || j.value("schema", 0) != 1) {
                throw Error("tier export must start with a schema-1 header record");
            }
            std::string t = j.at("tier").get<std::string>();
            dataset.tier = t == "T1" ? Tier::T1 : (t == "T2" ? Tier::T2 : Tier::T3);
            have_header = true;
            continue;
        }
        if (dataset.tier == Tier::T1) {
            T1Entry e;
            e.skill_id = j.at("skill_id").get<std::string>();
            e.registry_source =
                registry_source_from_string(j.at("registry_source").get<std::string>());
            e.doc_size_bytes = j.at("doc_size_bytes").get<std::size_t>();
            dataset.t1_entries.push_back(std::move(e));
        } else if (dataset.tier == Tier::T2) {
            T2Entry e;
            e.skill_id = j.at("skill_id").get<std::string>();
            for (const auto& m : j.at("matched")) {
                e.matched.emplace_back(pattern_id_from_string(m.at("pattern_id").get<std::string>()),
                                       severity_from_string(m.at("severity").get<std::string>()));
            }
            dataset.t2_entries.push_back(std::move(e));
        } else {
            T3Entry e;
            e.skill_id = j.at("skill_id").get<std::string>();
            for (const auto& i : j.at("instances")) e.instances.push_back(instance_from_json(i));
            for (const auto& s : j.at("shadow_features")) {
                e.shadow_features.push_back(shadow_from_json(s));
            }
            e.chain_memberships = j.at("chain_memberships").get<std::vector<std::string>>();
            e.level = j.at("level").get<std::string>() == "L1"
                          ? taxonomy::SophisticationLevel::L1
                          : (j.at("level").get<std::string>() == "L2"
                                 ? taxonomy::SophisticationLevel::L2
                                 : taxonomy::SophisticationLevel::L3);
            e.archetype = taxonomy::archetype_from_string(j.at("archetype").get<std::string>());
            e.disclosure_status =
                disclosure_status_from_string(j.at("disclosure_status").get<std::string>());
            e.mitre_ids = j.at("mitre_ids").get<std::vector<std::string>>();
            dataset.t3_entries.push_back(std::move(e));
        }
    }
    if (!have_header) throw Error("empty tier export");
    return dataset;
}

}  // namespace skillguard::tiers
