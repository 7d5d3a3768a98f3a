#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "skillguard/types.hpp"

namespace skillguard::corpus {

struct ScriptFile {
    std::string path;  // relative to the package root
    ScriptKind kind = ScriptKind::other;
    std::string content;

    bool operator==(const ScriptFile&) const = default;
};

/// Key/value map parsed from the leading `---` block of SKILL.md. Scalar and
/// list values are kept separately; `values()` sees both.
struct Frontmatter {
    std::map<std::string, std::string> scalars;
    std::map<std::string, std::vector<std::string>> lists;

    bool empty() const { return scalars.empty() && lists.empty(); }
    bool has(const std::string& key) const;
    std::string scalar_or(const std::string& key, std::string fallback) const;
    std::vector<std::string> values(const std::string& key) const;

    bool operator==(const Frontmatter&) const = default;
};

struct SkillPackage {
    std::string skill_id;
    RegistrySource registry_source = RegistrySource::local;
    Frontmatter frontmatter;
    std::string instruction_doc;  // SKILL.md body, frontmatter block excluded
    std::vector<ScriptFile> scripts;
    std::vector<std::pair<std::string, std::string>> config_files;  // (path, raw bytes)
    std::set<std::string> documented_endpoints;
    std::size_t doc_size_bytes = 0;
    std::string repo_url;

    bool operator==(const SkillPackage&) const = default;
};

struct ParseReport {
    std::vector<std::string> warnings;
    bool malformed_frontmatter = false;
};

struct FrontmatterSplit {
    Frontmatter frontmatter;
    std::string body;
    bool present = false;
    bool malformed = false;
};

/// Splits the leading `---`-delimited block from a SKILL.md document. A `---`
/// anywhere else is body text. An unclosed or unparseable block yields an
/// empty map with malformed=true and the full text as body.
FrontmatterSplit split_frontmatter(std::string_view doc_text);

/// Throws PathTraversalError when a relative path escapes the package root.
void validate_script_path(std::string_view relative_path);

/// Parses one skill directory: SKILL.md (+frontmatter), scripts, config files
/// and optional metadata.json. Throws MissingInstructionDoc or
/// PathTraversalError; recoverable issues land in `report`.
SkillPackage parse_skill_package(const std::filesystem::path& root, ParseReport* report = nullptr);

struct CorpusLoadResult {
    std::vector<SkillPackage> packages;  // ordered by skill_id
    std::vector<std::string> warnings;
};

/// Loads a snapshot from a directory of skill packages or from a .jsonl
/// snapshot file of serialized packages. Duplicate skill ids resolve
/// last-wins with a warning. Throws UnreadableSnapshot.
CorpusLoadResult load_corpus_snapshot(const std::filesystem::path& path);

nlohmann::json package_to_json(const SkillPackage& pkg);
SkillPackage package_from_json(const nlohmann::json& j);

/// One serialized package per line, ordered as given.
std::string packages_to_jsonl(const std::vector<SkillPackage>& packages);
std::vector<SkillPackage> packages_from_jsonl(std::string_view text);

}  // namespace skillguard::corpus
