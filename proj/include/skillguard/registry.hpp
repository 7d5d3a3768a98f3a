#pragma once

#include <functional>
#include <string>
#include <vector>

#include "skillguard/types.hpp"

namespace skillguard::registry {

struct SkillMetadata {
    std::string skill_id;
    std::string name;
    RegistrySource source = RegistrySource::local;
    std::string repo_url;
};

struct RegistryClientOptions {
    std::string base_url;
    double min_request_interval_s = 1.0;  // crawler etiquette: 1 request/second
    int max_retries = 5;
    double backoff_base_s = 1.0;
};

/// Serialized, rate-limited client for the two registry endpoints: paginated
/// listing (page, per_page <= 100) and search-by-prefix. Retries with
/// exponential backoff on 429/5xx and transport failures. Clock and sleeper
/// are injectable for tests.
class RegistryClient {
public:
    using Clock = std::function<double()>;
    using Sleeper = std::function<void(double)>;

    explicit RegistryClient(RegistryClientOptions options);
    RegistryClient(RegistryClientOptions options, Clock clock, Sleeper sleeper);

    std::vector<SkillMetadata> list_page(int page, int per_page);
    std::vector<SkillMetadata> search_prefix(const std::string& prefix);

private:
    std::string fetch(const std::string& path);
    void pace();

    RegistryClientOptions options_;
    Clock clock_;
    Sleeper sleeper_;
    double last_request_time_ = -1e18;
};

/// Parses a registry response body: an array of metadata records or an
/// object with a "skills" array.
std::vector<SkillMetadata> parse_metadata_records(const std::string& body);

}  // namespace skillguard::registry
