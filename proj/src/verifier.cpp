#include "skillguard/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "skillguard/errors.hpp"
#include "skillguard/util.hpp"

using nlohmann::json;

namespace skillguard::verifier {

namespace {

constexpr std::size_t kPayloadSampleCap = 4096;
constexpr std::int64_t kExecutionTimeoutMs = 60000;

constexpr std::array<std::string_view, 4> kPrefixes = {"AWS_", "API_", "SECRET_", "TOKEN_"};
constexpr std::array<std::string_view, 4> kSuffixes = {"ACCESS_KEY", "KEY", "VALUE", "ID"};
constexpr std::array<std::string_view, 4> kShapes = {"AKIA", "sk-", "sv_", "ghp_"};

std::string random_marker(std::mt19937_64& rng, std::size_t length) {
    static constexpr std::string_view alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
    std::string out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        out.push_back(alphabet[rng() % alphabet.size()]);
    }
    return out;
}

std::string decoded_payload(const Event& event) {
    std::string armored = event.attributes.value("payload_sample", "");
    auto decoded = util::base64_decode(armored);
    return decoded ? *decoded : armored;
}

std::string basename_of(std::string_view path) {
    auto slash = path.rfind('/');
    return std::string(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

bool host_documented(const std::string& host, const std::set<std::string>& documented) {
    return util::is_loopback_host(host) || documented.count(util::to_lower(host)) > 0;
}

}  // namespace

HoneypotSet generate_honeypots(std::uint64_t seed, std::size_t count) {
    if (count < 4) throw Error("honeypot count must be >= 4 (one per prefix family)");

    std::mt19937_64 rng(seed);
    HoneypotSet set;
    set.seed = seed;
    std::set<std::string> markers;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t family = i % kPrefixes.size();
        std::size_t round = i / kPrefixes.size();

        HoneypotEntry entry;
        entry.env_var = std::string(kPrefixes[family]) + std::string(kSuffixes[family]);
        if (round > 0) entry.env_var += "_" + std::to_string(round);
        do {
            entry.marker = random_marker(rng, 24);
        } while (!markers.insert(entry.marker).second);
        entry.secret_value = std::string(kShapes[family]) + entry.marker;
        set.entries.push_back(std::move(entry));
    }
    return set;
}

json honeypots_to_json(const HoneypotSet& set) {
    json entries = json::array();
    for (const auto& e : set.entries) {
        entries.push_back(
            {{"env_var", e.env_var}, {"secret_value", e.secret_value}, {"marker", e.marker}});
    }
    return json{{"schema", 1}, {"seed", set.seed}, {"entries", entries}};
}

HoneypotSet honeypots_from_json(const json& j) {
    HoneypotSet set;
    set.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("entries")) {
        set.entries.push_back({e.at("env_var").get<std::string>(),
                               e.at("secret_value").get<std::string>(),
                               e.at("marker").get<std::string>()});
    }
    return set;
}

Event make_net_connect(std::int64_t ts_ms, std::string host, int port) {
    Event ev;
    ev.ts_ms = ts_ms;
    ev.kind = EventKind::net_connect;
    ev.attributes = {{"dst_host", std::move(host)}, {"dst_port", port}};
    return ev;
}

Event make_net_send(std::int64_t ts_ms, std::string host, int port,
                    std::string_view raw_payload) {
    Event ev;
    ev.ts_ms = ts_ms;
    ev.kind = EventKind::net_send;
    ev.attributes = {{"dst_host", std::move(host)},
                     {"dst_port", port},
                     {"payload_sample", util::base64_encode(raw_payload.substr(
                                            0, std::min(raw_payload.size(), kPayloadSampleCap)))}};
    return ev;
}

Event make_proc_exec(std::int64_t ts_ms, std::vector<std::string> argv, int euid) {
    Event ev;
    ev.ts_ms = ts_ms;
    ev.kind = EventKind::proc_exec;
    ev.attributes = {{"argv", argv}, {"euid", euid}};
    return ev;
}

Event make_decode(std::int64_t ts_ms, std::string codec, std::string decoded_sample) {
    Event ev;
    ev.ts_ms = ts_ms;
    ev.kind = EventKind::decode;
    ev.attributes = {{"codec", std::move(codec)}, {"decoded_sample", std::move(decoded_sample)}};
    return ev;
}

Event make_file_event(std::int64_t ts_ms, EventKind kind, std::string path, std::string mode) {
    Event ev;
    ev.ts_ms = ts_ms;
    ev.kind = kind;
    ev.attributes = {{"path", std::move(path)}, {"mode", std::move(mode)}};
    return ev;
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::net_connect: return "net_connect";
        case EventKind::net_send: return "net_send";
        case EventKind::file_open: return "file_open";
        case EventKind::file_write: return "file_write";
        case EventKind::proc_exec: return "proc_exec";
        case EventKind::decode: return "decode";
    }
    return "?";
}

EventKind event_kind_from_string(std::string_view text) {
    if (text == "net_connect") return EventKind::net_connect;
    if (text == "net_send") return EventKind::net_send;
    if (text == "file_open") return EventKind::file_open;
    if (text == "file_write") return EventKind::file_write;
    if (text == "proc_exec") return EventKind::proc_exec;
    if (text == "decode") return EventKind::decode;
    throw MalformedTrace("unknown event kind: " + std::string(text));
}

std::string_view to_string(RuntimeIndicator indicator) {
    switch (indicator) {
        case RuntimeIndicator::credential_exfiltration: return "credential_exfiltration";
        case RuntimeIndicator::unauthorized_network: return "unauthorized_network";
        case RuntimeIndicator::obfuscation_execution: return "obfuscation_execution";
        case RuntimeIndicator::privilege_escalation: return "privilege_escalation";
    }
    return "?";
}

RuntimeIndicator indicator_from_string(std::string_view text) {
    if (text == "credential_exfiltration") return RuntimeIndicator::credential_exfiltration;
    if (text == "unauthorized_network") return RuntimeIndicator::unauthorized_network;
    if (text == "obfuscation_execution") return RuntimeIndicator::obfuscation_execution;
    if (text == "privilege_escalation") return RuntimeIndicator::privilege_escalation;
    throw Error("unknown runtime indicator: " + std::string(text));
}

VerificationVerdict evaluate_trace(const EvidenceTrace& trace, const HoneypotSet& honeypots,
                                   const std::set<std::string>& documented_endpoints,
                                   const patterns::PatternSet& pattern_set) {
    for (std::size_t i = 1; i < trace.events.size(); ++i) {
        if (trace.events[i].ts_ms < trace.events[i - 1].ts_ms) {
            throw MalformedTrace("non-monotone timestamps in trace for " + trace.skill_id);
        }
    }

    VerificationVerdict verdict;
    verdict.skill_id = trace.skill_id;
    auto add = [&](RuntimeIndicator ind, std::size_t event_index) {
        verdict.indicators.insert(ind);
        verdict.evidence_refs[ind].push_back(event_index);
    };

    // Marker detection is closed under exactly these encodings of the marker
    // itself: raw, base64, hex.
    std::vector<std::array<std::string, 3>> marker_forms;
    marker_forms.reserve(honeypots.entries.size());
    for (const auto& e : honeypots.entries) {
        marker_forms.push_back(
            {e.marker, util::base64_encode(e.marker), util::hex_encode(e.marker)});
    }

    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const Event& ev = trace.events[i];
        std::string host = ev.attributes.value("dst_host", "");

        if (ev.kind == EventKind::net_send && !host.empty() && !util::is_loopback_host(host)) {
            std::string payload = decoded_payload(ev);
            for (const auto& forms : marker_forms) {
                bool hit = std::any_of(forms.begin(), forms.end(), [&](const std::string& f) {
                    return payload.find(f) != std::string::npos;
                });
                if (hit) {
                    add(RuntimeIndicator::credential_exfiltration, i);
                    break;
                }
            }
        }
        if ((ev.kind == EventKind::net_connect || ev.kind == EventKind::net_send) &&
            !host.empty() && !host_documented(host, documented_endpoints)) {
            add(RuntimeIndicator::unauthorized_network, i);
        }
        if (ev.kind == EventKind::decode) {
            std::string sample = ev.attributes.value("decoded_sample", "");
            if (!sample.empty() && patterns::match_code_text(pattern_set, sample).has_value()) {
                add(RuntimeIndicator::obfuscation_execution, i);
            }
        }
        if (ev.kind == EventKind::proc_exec && ev.attributes.contains("argv") &&
            ev.attributes["argv"].is_array() && !ev.attributes["argv"].empty()) {
            std::string argv0 = basename_of(ev.attributes["argv"][0].get<std::string>());
            if (argv0 == "sudo" || argv0 == "su" || argv0 == "doas") {
                add(RuntimeIndicator::privilege_escalation, i);
            }
        }
    }

    // euid transition to 0: some event strictly earlier (by timestamp) ran
    // with euid > 0 and a later one with euid == 0. Tie timestamps carry no
    // order, so the check is permutation-stable.
    std::int64_t earliest_nonroot_ts = std::numeric_limits<std::int64_t>::max();
    for (const auto& ev : trace.events) {
        if (ev.attributes.contains("euid") && ev.attributes["euid"].is_number_integer() &&
            ev.attributes["euid"].get<int>() > 0) {
            earliest_nonroot_ts = std::min(earliest_nonroot_ts, ev.ts_ms);
        }
    }
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const Event& ev = trace.events[i];
        if (ev.attributes.contains("euid") && ev.attributes["euid"].is_number_integer() &&
            ev.attributes["euid"].get<int>() == 0 && ev.ts_ms > earliest_nonroot_ts) {
            add(RuntimeIndicator::privilege_escalation, i);
        }
    }

    verdict.forwarded_to_review = !verdict.indicators.empty();
    return verdict;
}

VerificationVerdict combine_rounds(const std::vector<VerificationVerdict>& rounds) {
    VerificationVerdict combined;
    for (const auto& round : rounds) {
        if (combined.skill_id.empty()) combined.skill_id = round.skill_id;
        for (RuntimeIndicator ind : round.indicators) {
            if (combined.indicators.insert(ind).second) {
                combined.evidence_refs[ind] = round.evidence_refs.at(ind);
            }
        }
    }
    combined.forwarded_to_review = !combined.indicators.empty();
    return combined;
}

std::string_view to_string(Classification c) {
    return c == Classification::malicious ? "malicious" : "benign";
}

Classification classification_from_string(std::string_view text) {
    if (text == "malicious") return Classification::malicious;
    if (text == "benign") return Classification::benign;
    throw Error("unknown classification: " + std::string(text));
}

std::string_view to_string(ConfirmationOutcome outcome) {
    switch (outcome) {
        case ConfirmationOutcome::confirmed_malicious: return "confirmed_malicious";
        case ConfirmationOutcome::not_confirmed: return "not_confirmed";
        case ConfirmationOutcome::needs_adjudication: return "needs_adjudication";
    }
    return "?";
}

ConfirmationOutcome confirm_skill(const std::vector<ReviewRecord>& reviews) {
    std::set<std::string> reviewers;
    for (const auto& r : reviews) {
        if (r.confidence < 1 || r.confidence > 3) {
            throw Error("confidence must be in {1,2,3}");
        }
        reviewers.insert(r.reviewer_id);
    }
    if (reviewers.size() < 2) {
        throw InsufficientReviews("need reviews from at least 2 distinct reviewers");
    }

    std::set<std::string> confident_malicious;
    bool any_malicious = false;
    bool any_benign = false;
    for (const auto& r : reviews) {
        if (r.classification == Classification::malicious) {
            any_malicious = true;
            if (r.confidence >= 2) confident_malicious.insert(r.reviewer_id);
        } else {
            any_benign = true;
        }
    }
    if (confident_malicious.size() >= 2) return ConfirmationOutcome::confirmed_malicious;
    if (any_malicious && any_benign) return ConfirmationOutcome::needs_adjudication;
    return ConfirmationOutcome::not_confirmed;
}

AgreementStats compute_review_agreement(const std::vector<std::pair<bool, bool>>& pairs) {
    if (pairs.empty()) throw EmptyInput("no label pairs");

    double n = static_cast<double>(pairs.size());
    double equal = 0, a_true = 0, b_true = 0;
    for (const auto& [a, b] : pairs) {
        if (a == b) ++equal;
        if (a) ++a_true;
        if (b) ++b_true;
    }
    AgreementStats stats;
    stats.percent_agreement = equal / n;
    double pa = a_true / n;
    double pb = b_true / n;
    double p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
    if (p_e >= 1.0) {
        stats.cohen_kappa = std::numeric_limits<double>::quiet_NaN();
    } else {
        stats.cohen_kappa = (stats.percent_agreement - p_e) / (1.0 - p_e);
    }
    return stats;
}

std::string write_trace(const EvidenceTrace& trace) {
    json header{{"schema", 1},
                {"record", "trace_header"},
                {"skill_id", trace.skill_id},
                {"invocation_id", trace.invocation_id},
                {"duration_ms", trace.duration_ms},
                {"timeout_overridden", trace.timeout_overridden}};
    std::string out = header.dump();
    out += '\n';
    for (const auto& ev : trace.events) {
        json line{{"record", "event"},
                  {"ts_ms", ev.ts_ms},
                  {"kind", std::string(to_string(ev.kind))},
                  {"attributes", ev.attributes}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

EvidenceTrace read_trace(std::string_view text) {
    EvidenceTrace trace;
    bool have_header = false;
    for (std::string_view line : util::split_lines(text)) {
        if (util::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw MalformedTrace(std::string("bad trace record: ") + e.what());
        }
        std::string record = j.value("record", "");
        if (!have_header) {
            if (record != "trace_header" || j.value("schema", 0) != 1) {
                throw MalformedTrace("trace file must start with a schema-1 header record");
            }
            trace.skill_id = j.at("skill_id").get<std::string>();
            trace.invocation_id = j.at("invocation_id").get<std::string>();
            trace.duration_ms = j.at("duration_ms").get<std::int64_t>();
            trace.timeout_overridden = j.value("timeout_overridden", false);
            if (trace.duration_ms > kExecutionTimeoutMs && !trace.timeout_overridden) {
                throw MalformedTrace("duration exceeds 60s without timeout override");
            }
            have_header = true;
            continue;
        }
        if (record != "event") throw MalformedTrace("unexpected record type: " + record);
        Event ev;
        ev.ts_ms = j.at("ts_ms").get<std::int64_t>();
        ev.kind = event_kind_from_string(j.at("kind").get<std::string>());
        ev.attributes = j.value("attributes", json::object());
        if (ev.attributes.contains("payload_sample")) {
            auto decoded = util::base64_decode(ev.attributes["payload_sample"].get<std::string>());
            if (decoded && decoded->size() > kPayloadSampleCap) {
                ev.attributes["payload_sample"] =
                    util::base64_encode(decoded->substr(0, kPayloadSampleCap));
            }
        }
        trace.events.push_back(std::move(ev));
    }
    if (!have_header) throw MalformedTrace("empty trace file");
    return trace;
}

void save_trace_file(const EvidenceTrace& trace, const std::filesystem::path& path) {
    util::write_file(path, write_trace(trace));
}

EvidenceTrace load_trace_file(const std::filesystem::path& path) {
    return read_trace(util::read_file(path));
}

std::map<std::string, std::vector<EvidenceTrace>> load_trace_dir(
    const std::filesystem::path& dir) {
    std::map<std::string, std::vector<EvidenceTrace>> by_skill;
    if (!std::filesystem::is_directory(dir)) return by_skill;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.size() > 12 && name.substr(name.size() - 12) == ".trace.jsonl") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        EvidenceTrace trace = load_trace_file(file);
        by_skill[trace.skill_id].push_back(std::move(trace));
    }
    for (auto& [skill, traces] : by_skill) {
        (void)skill;
        std::stable_sort(traces.begin(), traces.end(),
                         [](const EvidenceTrace& a, const EvidenceTrace& b) {
                             return a.invocation_id < b.invocation_id;
                         });
    }
    return by_skill;
}

RunnerContract default_runner_contract() {
    RunnerContract c;
    c.image = "ubuntu:22.04";
    c.memory_limit_bytes = 2ULL * 1024 * 1024 * 1024;
    c.timeout_seconds = 60;
    c.monitor_commands = {
        "tcpdump -i any -U -w {out}/net.pcap 'not (dst host 127.0.0.1)'",
        "strace -f -e trace=network,file -o {out}/syscalls.log {entry}",
        "inotifywait -m -r {home} --format '%w%f %e' -o {out}/fs_audit.log",
    };
    c.honeypot_env_file = "/etc/skill-env/honeypots.env";
    c.mounts = {{"{skill_dir}", "/skill"}, {"{out_dir}", "/out"}};
    return c;
}

json runner_contract_to_json(const RunnerContract& contract) {
    json mounts = json::array();
    for (const auto& [host, guest] : contract.mounts) {
        mounts.push_back({{"host", host}, {"container", guest}});
    }
    return json{{"schema", 1},
                {"image", contract.image},
                {"memory_limit_bytes", contract.memory_limit_bytes},
                {"timeout_seconds", contract.timeout_seconds},
                {"monitor_commands", contract.monitor_commands},
                {"honeypot_env_file", contract.honeypot_env_file},
                {"mounts", mounts}};
}

RunnerContract load_runner_contract(const std::filesystem::path& path) {
    json j = json::parse(util::read_file(path));
    RunnerContract c;
    c.image = j.at("image").get<std::string>();
    c.memory_limit_bytes = j.at("memory_limit_bytes").get<std::uint64_t>();
    c.timeout_seconds = j.at("timeout_seconds").get<int>();
    c.monitor_commands = j.at("monitor_commands").get<std::vector<std::string>>();
    c.honeypot_env_file = j.at("honeypot_env_file").get<std::string>();
    for (const auto& m : j.value("mounts", json::array())) {
        c.mounts.emplace_back(m.at("host").get<std::string>(),
                              m.at("container").get<std::string>());
    }
    return c;
}

}  // namespace skillguard::verifier
