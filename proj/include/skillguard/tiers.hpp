#pragma once

#include <string>
#include <vector>

#include "skillguard/taxonomy.hpp"
#include "skillguard/types.hpp"

namespace skillguard::tiers {

enum class Tier : std::uint8_t { T1, T2, T3 };

std::string_view to_string(Tier tier);

struct T1Entry {
    std::string skill_id;
    RegistrySource registry_source = RegistrySource::local;
    std::size_t doc_size_bytes = 0;
};

struct T2Entry {
    std::string skill_id;
    std::vector<std::pair<PatternId, Severity>> matched;  // pattern + triage severity
};

struct T3Entry {
    std::string skill_id;
    std::vector<taxonomy::VulnerabilityInstance> instances;  // always nonempty
    std::vector<taxonomy::ShadowFeature> shadow_features;
    std::vector<std::string> chain_memberships;  // e.g. "E2->E1"
    taxonomy::SophisticationLevel level = taxonomy::SophisticationLevel::L1;
    taxonomy::Archetype archetype = taxonomy::Archetype::Uncategorized;
    DisclosureStatus disclosure_status = DisclosureStatus::pending;
    std::vector<std::string> mitre_ids;

    std::set<PatternId> distinct_patterns() const;
};

/// Full annotation state across the three tiers; containment T3 c= T2 c= T1
/// by skill_id is required at export time.
struct TierAnnotations {
    std::vector<T1Entry> t1;
    std::vector<T2Entry> t2;
    std::vector<T3Entry> t3;
};

/// Byte-stable line-delimited export of one tier (schema-1 header record,
/// one record per skill, ids sorted). Throws TierContainmentViolation when
/// containment fails and EmptyPatternSet for a T3 entry without instances.
std::string export_tier(const TierAnnotations& annotations, Tier tier);

struct TierDataset {
    Tier tier = Tier::T1;
    std::vector<T1Entry> t1_entries;
    std::vector<T2Entry> t2_entries;
    std::vector<T3Entry> t3_entries;
};

TierDataset parse_tier_export(std::string_view text);

}  // namespace skillguard::tiers
