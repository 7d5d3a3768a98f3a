#include "skillguard/registry.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "skillguard/errors.hpp"

using nlohmann::json;

namespace skillguard::registry {

namespace {

double monotonic_now() {
    auto now = std::chrono::steady_clock::now().time_since_epoch();
    return std::chrono::duration<double>(now).count();
}

void real_sleep(double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

SkillMetadata record_from_json(const json& j) {
    SkillMetadata meta;
    meta.skill_id = j.at("skill_id").get<std::string>();
    meta.name = j.value("name", "");
    meta.source = registry_source_from_string(j.value("registry_source", "local"));
    meta.repo_url = j.value("repo_url", "");
    return meta;
}

}  // namespace

RegistryClient::RegistryClient(RegistryClientOptions options)
    : RegistryClient(std::move(options), monotonic_now, real_sleep) {}

RegistryClient::RegistryClient(RegistryClientOptions options, Clock clock, Sleeper sleeper)
    : options_(std::move(options)), clock_(std::move(clock)), sleeper_(std::move(sleeper)) {}

void RegistryClient::pace() {
    double now = clock_();
    double earliest = last_request_time_ + options_.min_request_interval_s;
    if (now < earliest) {
        sleeper_(earliest - now);
        now = earliest;
    }
    last_request_time_ = now;
}

std::string RegistryClient::fetch(const std::string& path) {
    double backoff = options_.backoff_base_s;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        pace();
        httplib::Client client(options_.base_url);
        auto res = client.Get(path);
        if (res && res->status == 200) return res->body;
        bool retryable = !res || res->status == 429 || res->status >= 500;
        if (!retryable) {
            throw Error("registry request failed: HTTP " + std::to_string(res->status));
        }
        if (attempt == options_.max_retries) break;
        sleeper_(backoff);
        backoff *= 2.0;
    }
    throw ServiceUnavailable("registry unreachable after retries: " + options_.base_url + path);
}

std::vector<SkillMetadata> RegistryClient::list_page(int page, int per_page) {
    if (page < 1) throw Error("page must be >= 1");
    if (per_page < 1 || per_page > 100) throw Error("per_page must be in [1, 100]");
    return parse_metadata_records(
        fetch("/skills?page=" + std::to_string(page) + "&per_page=" + std::to_string(per_page)));
}

std::vector<SkillMetadata> RegistryClient::search_prefix(const std::string& prefix) {
    if (prefix.empty()) throw Error("prefix must be nonempty");
    return parse_metadata_records(fetch("/skills/search?prefix=" + prefix));
}

std::vector<SkillMetadata> parse_metadata_records(const std::string& body) {
    json parsed;
    try {
        parsed = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(std::string("unparseable registry response: ") + e.what());
    }
    const json& records = parsed.is_array() ? parsed : parsed.at("skills");
    std::vector<SkillMetadata> out;
    for (const auto& r : records) out.push_back(record_from_json(r));
    return out;
}

}  // namespace skillguard::registry
