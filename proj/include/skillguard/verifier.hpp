#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillguard/patterns.hpp"
#include "skillguard/types.hpp"

namespace skillguard::verifier {

struct HoneypotEntry {
    std::string env_var;       // AWS_* / API_* / SECRET_* / TOKEN_*
    std::string secret_value;  // embeds the marker
    std::string marker;        // high-entropy, >= 16 chars, unique per entry
};

struct HoneypotSet {
    std::uint64_t seed = 0;
    std::vector<HoneypotEntry> entries;
};

/// Deterministic per seed; count >= 4 so each prefix family appears at least
/// once. Markers are pairwise distinct.
HoneypotSet generate_honeypots(std::uint64_t seed, std::size_t count);

nlohmann::json honeypots_to_json(const HoneypotSet& set);
HoneypotSet honeypots_from_json(const nlohmann::json& j);

enum class EventKind : std::uint8_t {
    net_connect,
    net_send,
    file_open,
    file_write,
    proc_exec,
    decode,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view text);

struct Event {
    std::int64_t ts_ms = 0;
    EventKind kind = EventKind::net_connect;
    // Kind-specific fields. net: dst_host, dst_port, payload_sample (base64
    // armored, decoded sample capped at 4 KiB); file: path, mode; proc: argv
    // (array), euid; decode: codec, decoded_sample.
    nlohmann::json attributes = nlohmann::json::object();
};

struct EvidenceTrace {
    std::string skill_id;
    std::string invocation_id;
    std::vector<Event> events;  // non-decreasing ts_ms
    std::int64_t duration_ms = 0;
    bool timeout_overridden = false;  // duration > 60s only with this set
};

// Event constructors; the net_send payload is armored here.
Event make_net_connect(std::int64_t ts_ms, std::string host, int port);
Event make_net_send(std::int64_t ts_ms, std::string host, int port, std::string_view raw_payload);
Event make_proc_exec(std::int64_t ts_ms, std::vector<std::string> argv, int euid);
Event make_decode(std::int64_t ts_ms, std::string codec, std::string decoded_sample);
Event make_file_event(std::int64_t ts_ms, EventKind kind, std::string path, std::string mode);

enum class RuntimeIndicator : std::uint8_t {
    credential_exfiltration,
    unauthorized_network,
    obfuscation_execution,
    privilege_escalation,
};

std::string_view to_string(RuntimeIndicator indicator);
RuntimeIndicator indicator_from_string(std::string_view text);

struct VerificationVerdict {
    std::string skill_id;
    std::set<RuntimeIndicator> indicators;
    std::map<RuntimeIndicator, std::vector<std::size_t>> evidence_refs;  // event indices
    bool forwarded_to_review = false;  // <=> !indicators.empty()
};

/// The four-criteria runtime oracle over one trace. Marker detection covers
/// the raw marker plus its base64 and hex encodings, nothing else. Throws
/// MalformedTrace on non-monotone timestamps.
VerificationVerdict evaluate_trace(const EvidenceTrace& trace, const HoneypotSet& honeypots,
                                   const std::set<std::string>& documented_endpoints,
                                   const patterns::PatternSet& pattern_set);

/// Union of indicators across invocation rounds of the same skill.
VerificationVerdict combine_rounds(const std::vector<VerificationVerdict>& rounds);

enum class Classification : std::uint8_t { malicious, benign };

std::string_view to_string(Classification c);
Classification classification_from_string(std::string_view text);

struct ReviewRecord {
    std::string skill_id;
    std::string reviewer_id;
    Classification classification = Classification::benign;
    int confidence = 1;  // 1=uncertain, 2=probable, 3=definite
    std::string notes;
};

enum class ConfirmationOutcome : std::uint8_t {
    confirmed_malicious,
    not_confirmed,
    needs_adjudication,
};

std::string_view to_string(ConfirmationOutcome outcome);

/// Confirmed only when two distinct reviewers rate malicious with
/// confidence >= 2; classification splits go to adjudication. Requires
/// reviews from at least two distinct reviewers (InsufficientReviews).
ConfirmationOutcome confirm_skill(const std::vector<ReviewRecord>& reviews);

struct AgreementStats {
    double percent_agreement = 0.0;
    double cohen_kappa = 0.0;  // NaN when chance agreement is 1
};

/// Percent agreement and Cohen's kappa with marginal-product chance
/// agreement over paired binary labels. Throws EmptyInput.
AgreementStats compute_review_agreement(const std::vector<std::pair<bool, bool>>& pairs);

// Trace files: line-delimited records, schema-versioned header line, one
// event per following line, payload_sample base64-armored.
std::string write_trace(const EvidenceTrace& trace);
EvidenceTrace read_trace(std::string_view text);
void save_trace_file(const EvidenceTrace& trace, const std::filesystem::path& path);
EvidenceTrace load_trace_file(const std::filesystem::path& path);

/// All *.trace.jsonl files under a directory, grouped by skill_id, rounds
/// ordered by invocation_id.
std::map<std::string, std::vector<EvidenceTrace>> load_trace_dir(
    const std::filesystem::path& dir);

/// Reference sandbox-runner contract consumed by external trace producers.
struct RunnerContract {
    std::string image;
    std::uint64_t memory_limit_bytes = 0;
    int timeout_seconds = 0;
    std::vector<std::string> monitor_commands;
    std::string honeypot_env_file;
    std::vector<std::pair<std::string, std::string>> mounts;  // host -> container
};

RunnerContract default_runner_contract();
RunnerContract load_runner_contract(const std::filesystem::path& path);
nlohmann::json runner_contract_to_json(const RunnerContract& contract);

}  // namespace skillguard::verifier
