#include "skillguard/corpus.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "skillguard/errors.hpp"
#include "skillguard/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace skillguard::corpus {

namespace {

ScriptKind kind_from_path(const fs::path& p) {
    std::string ext = util::to_lower(p.extension().string());
    if (ext == ".py") return ScriptKind::python;
    if (ext == ".sh" || ext == ".bash") return ScriptKind::shell;
    if (ext == ".js" || ext == ".mjs" || ext == ".cjs") return ScriptKind::javascript;
    return ScriptKind::other;
}

bool is_config_filename(const std::string& name) {
    return name == "plugin.json" || name == "settings.json" || name == ".mcp.json";
}

void flatten_yaml(const YAML::Node& node, Frontmatter& fm) {
    for (auto it = node.begin(); it != node.end(); ++it) {
        std::string key;
        try {
            key = it->first.as<std::string>();
        } catch (const YAML::Exception&) {
            continue;
        }
        const YAML::Node& value = it->second;
        if (value.IsSequence()) {
            std::vector<std::string> items;
            for (const auto& item : value) {
                try {
                    items.push_back(item.as<std::string>());
                } catch (const YAML::Exception&) {
                    items.push_back(YAML::Dump(item));
                }
            }
            fm.lists[key] = std::move(items);
        } else if (value.IsScalar()) {
            fm.scalars[key] = value.as<std::string>();
        } else if (value.IsMap()) {
            // One level of nesting is kept as dotted keys.
            for (auto jt = value.begin(); jt != value.end(); ++jt) {
                try {
                    fm.scalars[key + "." + jt->first.as<std::string>()] =
                        jt->second.IsScalar() ? jt->second.as<std::string>()
                                              : YAML::Dump(jt->second);
                } catch (const YAML::Exception&) {
                }
            }
        } else if (value.IsNull()) {
            fm.scalars[key] = "";
        }
    }
}

std::set<std::string> endpoints_of(const Frontmatter& fm, std::string_view body) {
    std::set<std::string> hosts = util::extract_hostnames(body);
    for (const auto& [key, value] : fm.scalars) {
        (void)key;
        for (const auto& h : util::extract_hostnames(value)) hosts.insert(h);
    }
    for (const auto& [key, items] : fm.lists) {
        (void)key;
        for (const auto& item : items) {
            for (const auto& h : util::extract_hostnames(item)) hosts.insert(h);
        }
    }
    return hosts;
}

void add_warning(ParseReport* report, std::string message) {
    if (report != nullptr) report->warnings.push_back(std::move(message));
}

}  // namespace

bool Frontmatter::has(const std::string& key) const {
    return scalars.count(key) > 0 || lists.count(key) > 0;
}

std::string Frontmatter::scalar_or(const std::string& key, std::string fallback) const {
    auto it = scalars.find(key);
    return it != scalars.end() ? it->second : std::move(fallback);
}

std::vector<std::string> Frontmatter::values(const std::string& key) const {
    auto lit = lists.find(key);
    if (lit != lists.end()) return lit->second;
    auto sit = scalars.find(key);
    if (sit != scalars.end()) return {sit->second};
    return {};
}

FrontmatterSplit split_frontmatter(std::string_view doc_text) {
    FrontmatterSplit out;
    auto lines = util::split_lines(doc_text);
    if (lines.empty() || util::trim(lines[0]) != "---") {
        out.body = std::string(doc_text);
        return out;
    }
    std::size_t close = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string_view t = util::trim(lines[i]);
        if (t == "---" || t == "...") {
            close = i;
            break;
        }
    }
    if (close == 0) {
        out.malformed = true;  // unclosed delimiter
        out.body = std::string(doc_text);
        return out;
    }
    out.present = true;
    std::string yaml_block;
    for (std::size_t i = 1; i < close; ++i) {
        yaml_block.append(lines[i]);
        yaml_block.push_back('\n');
    }
    std::string body;
    for (std::size_t i = close + 1; i < lines.size(); ++i) {
        body.append(lines[i]);
        if (i + 1 < lines.size()) body.push_back('\n');
    }
    out.body = std::move(body);
    try {
        YAML::Node node = YAML::Load(yaml_block);
        if (node.IsMap()) {
            flatten_yaml(node, out.frontmatter);
        } else if (!node.IsNull()) {
            out.malformed = true;
        }
    } catch (const YAML::Exception&) {
        out.malformed = true;
        out.frontmatter = {};
    }
    return out;
}

void validate_script_path(std::string_view relative_path) {
    fs::path p{std::string(relative_path)};
    if (p.is_absolute()) {
        throw PathTraversalError("absolute script path: " + std::string(relative_path));
    }
    for (const auto& part : p) {
        if (part == "..") {
            throw PathTraversalError("script path escapes package root: " +
                                     std::string(relative_path));
        }
    }
}

SkillPackage parse_skill_package(const fs::path& root, ParseReport* report) {
    if (!fs::is_directory(root)) {
        throw MissingInstructionDoc("not a directory: " + root.string());
    }

    fs::path doc_path;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name == "SKILL.md") {
            doc_path = entry.path();
            break;
        }
        if (util::to_lower(name) == "skill.md" && doc_path.empty()) {
            doc_path = entry.path();
        }
    }
    if (doc_path.empty()) {
        throw MissingInstructionDoc("no SKILL.md in " + root.string());
    }
    if (doc_path.filename().string() != "SKILL.md") {
        add_warning(report, "lint: instruction doc named '" + doc_path.filename().string() +
                                "' (expected SKILL.md)");
    }

    SkillPackage pkg;
    pkg.skill_id = root.filename().string();

    std::string raw_doc = util::read_file(doc_path);
    pkg.doc_size_bytes = raw_doc.size();
    FrontmatterSplit split = split_frontmatter(raw_doc);
    if (split.malformed) {
        add_warning(report, "malformed frontmatter in " + pkg.skill_id);
        if (report != nullptr) report->malformed_frontmatter = true;
    }
    pkg.frontmatter = std::move(split.frontmatter);
    pkg.instruction_doc = std::move(split.body);

    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file() && !entry.is_symlink()) continue;
        fs::path rel = fs::relative(entry.path(), root);
        std::string rel_str = rel.generic_string();
        std::string name = entry.path().filename().string();
        if (entry.path() == doc_path || name == "metadata.json") continue;

        validate_script_path(rel_str);
        if (entry.is_symlink()) {
            std::error_code ec;
            fs::path target = fs::weakly_canonical(entry.path(), ec);
            fs::path base = fs::weakly_canonical(root, ec);
            if (ec || target.generic_string().rfind(base.generic_string(), 0) != 0) {
                throw PathTraversalError("script link escapes package root: " + rel_str);
            }
        }
        if (!entry.is_regular_file()) continue;

        if (is_config_filename(name)) {
            pkg.config_files.emplace_back(rel_str, util::read_file(entry.path()));
        } else {
            ScriptFile script;
            script.path = rel_str;
            script.kind = kind_from_path(entry.path());
            script.content = util::read_file(entry.path());
            pkg.scripts.push_back(std::move(script));
        }
    }
    std::sort(pkg.scripts.begin(), pkg.scripts.end(),
              [](const ScriptFile& a, const ScriptFile& b) { return a.path < b.path; });
    std::sort(pkg.config_files.begin(), pkg.config_files.end());

    fs::path meta_path = root / "metadata.json";
    if (fs::exists(meta_path)) {
        try {
            json meta = json::parse(util::read_file(meta_path));
            if (meta.contains("skill_id")) pkg.skill_id = meta["skill_id"].get<std::string>();
            if (meta.contains("registry_source")) {
                pkg.registry_source =
                    registry_source_from_string(meta["registry_source"].get<std::string>());
            }
            if (meta.contains("repo_url")) pkg.repo_url = meta["repo_url"].get<std::string>();
        } catch (const json::exception& e) {
            add_warning(report, "unparseable metadata.json in " + pkg.skill_id + ": " + e.what());
        }
    }

    pkg.documented_endpoints = endpoints_of(pkg.frontmatter, pkg.instruction_doc);
    return pkg;
}

CorpusLoadResult load_corpus_snapshot(const fs::path& path) {
    CorpusLoadResult result;
    std::vector<SkillPackage> loaded;

    if (fs::is_regular_file(path)) {
        if (path.extension() != ".jsonl") {
            throw UnreadableSnapshot("unsupported snapshot file: " + path.string());
        }
        try {
            loaded = packages_from_jsonl(util::read_file(path));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw UnreadableSnapshot("cannot parse snapshot " + path.string() + ": " + e.what());
        }
    } else if (fs::is_directory(path)) {
        std::vector<fs::path> dirs;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_directory()) dirs.push_back(entry.path());
        }
        std::sort(dirs.begin(), dirs.end());
        for (const auto& dir : dirs) {
            ParseReport report;
            try {
                loaded.push_back(parse_skill_package(dir, &report));
            } catch (const MissingInstructionDoc&) {
                result.warnings.push_back("skipped " + dir.filename().string() +
                                          ": no instruction doc");
                continue;
            } catch (const PathTraversalError& e) {
                result.warnings.push_back("rejected " + dir.filename().string() + ": " + e.what());
                continue;
            }
            for (auto& w : report.warnings) result.warnings.push_back(std::move(w));
        }
    } else {
        throw UnreadableSnapshot("snapshot path not readable: " + path.string());
    }

    // Last-wins dedup by skill_id, then deterministic ordering.
    std::map<std::string, SkillPackage> by_id;
    for (auto& pkg : loaded) {
        auto [it, inserted] = by_id.insert_or_assign(pkg.skill_id, std::move(pkg));
        (void)it;
        if (!inserted) {
            result.warnings.push_back("duplicate skill_id '" + it->first + "': last occurrence kept");
        }
    }
    result.packages.reserve(by_id.size());
    for (auto& [id, pkg] : by_id) {
        (void)id;
        result.packages.push_back(std::move(pkg));
    }
    return result;
}

json package_to_json(const SkillPackage& pkg) {
    json scripts = json::array();
    for (const auto& s : pkg.scripts) {
        scripts.push_back({{"path", s.path},
                           {"kind", std::string(to_string(s.kind))},
                           {"content", s.content}});
    }
    json configs = json::array();
    for (const auto& [p, bytes] : pkg.config_files) {
        configs.push_back({{"path", p}, {"bytes_b64", util::base64_encode(bytes)}});
    }
    json fm{{"scalars", pkg.frontmatter.scalars}, {"lists", pkg.frontmatter.lists}};
    return json{{"skill_id", pkg.skill_id},
                {"registry_source", std::string(to_string(pkg.registry_source))},
                {"frontmatter", fm},
                {"instruction_doc", pkg.instruction_doc},
                {"scripts", scripts},
                {"config_files", configs},
                {"documented_endpoints", pkg.documented_endpoints},
                {"doc_size_bytes", pkg.doc_size_bytes},
                {"repo_url", pkg.repo_url}};
}

SkillPackage package_from_json(const json& j) {
    SkillPackage pkg;
    pkg.skill_id = j.at("skill_id").get<std::string>();
    pkg.registry_source = registry_source_from_string(j.at("registry_source").get<std::string>());
    pkg.frontmatter.scalars =
        j.at("frontmatter").at("scalars").get<std::map<std::string, std::string>>();
    pkg.frontmatter.lists = j.at("frontmatter")
                                .at("lists")
                                .get<std::map<std::string, std::vector<std::string>>>();
    pkg.instruction_doc = j.at("instruction_doc").get<std::string>();
    for (const auto& s : j.at("scripts")) {
        ScriptFile script;
        script.path = s.at("path").get<std::string>();
        script.kind = script_kind_from_string(s.at("kind").get<std::string>());
        script.content = s.at("content").get<std::string>();
        validate_script_path(script.path);
        pkg.scripts.push_back(std::move(script));
    }
    for (const auto& c : j.at("config_files")) {
        auto bytes = util::base64_decode(c.at("bytes_b64").get<std::string>());
        if (!bytes) throw Error("invalid base64 in config_files for " + pkg.skill_id);
        pkg.config_files.emplace_back(c.at("path").get<std::string>(), *bytes);
    }
    pkg.documented_endpoints = j.at("documented_endpoints").get<std::set<std::string>>();
    pkg.doc_size_bytes = j.at("doc_size_bytes").get<std::size_t>();
    pkg.repo_url = j.value("repo_url", "");
    return pkg;
}

std::string packages_to_jsonl(const std::vector<SkillPackage>& packages) {
    std::string out;
    for (const auto& pkg : packages) {
        out += package_to_json(pkg).dump();
        out += '\n';
    }
    return out;
}

std::vector<SkillPackage> packages_from_jsonl(std::string_view text) {
    std::vector<SkillPackage> packages;
    for (std::string_view line : util::split_lines(text)) {
        if (util::trim(line).empty()) continue;
        packages.push_back(package_from_json(json::parse(line)));
    }
    return packages;
}

}  // namespace skillguard::corpus
