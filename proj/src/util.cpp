#include "skillguard/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "skillguard/errors.hpp"

namespace skillguard::util {

namespace {

constexpr std::string_view kB64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

// Dotted tokens ending in one of these are treated as file names, not hosts.
// Deliberately does not include reserved documentation TLDs (.example, .test).
const std::set<std::string>& extension_stoplist() {
    static const std::set<std::string> exts = {
        "py",   "pyc",  "pyo",  "sh",    "bash", "zsh",  "js",   "mjs",  "cjs",
        "jsx",  "ts",   "tsx",  "md",    "rst",  "json", "jsonl", "yml", "yaml",
        "toml", "ini",  "cfg",  "conf",  "txt",  "csv",  "tsv",  "log",  "png",
        "jpg",  "jpeg", "gif",  "svg",   "ico",  "bmp",  "webp", "pdf",  "html",
        "htm",  "css",  "scss", "xml",   "zip",  "tar",  "gz",   "tgz",  "bz2",
        "xz",   "rar",  "exe",  "bin",   "so",   "dll",  "dylib", "lock", "bak",
        "tmp",  "swp",  "cpp",  "hpp",   "rs",   "go",   "java", "rb",   "php",
        "pl",   "lua",  "sql",  "db",    "sqlite", "wav", "mp3", "mp4",  "mov",
    };
    return exts;
}

bool is_host_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
}

// Validates and normalizes a candidate host token; returns empty on rejection.
std::string normalize_host(std::string_view token) {
    while (!token.empty() && (token.back() == '.' || token.back() == '-')) token.remove_suffix(1);
    while (!token.empty() && (token.front() == '.' || token.front() == '-')) token.remove_prefix(1);
    if (token.empty()) return {};

    std::string host = to_lower(token);
    if (host == "localhost") return host;
    if (is_ipv4(host)) return host;

    std::vector<std::string> labels;
    std::string cur;
    for (char c : host) {
        if (c == '.') {
            if (cur.empty()) return {};
            labels.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (cur.empty()) return {};
    labels.push_back(cur);
    if (labels.size() < 2) return {};

    const std::string& tld = labels.back();
    if (tld.size() < 2) return {};
    if (!std::all_of(tld.begin(), tld.end(),
                     [](char c) { return std::isalpha(static_cast<unsigned char>(c)); })) {
        return {};
    }
    if (extension_stoplist().count(tld) > 0) return {};
    return host;
}

// Strips userinfo and port from a URL authority section.
std::string host_of_authority(std::string_view authority) {
    auto at = authority.rfind('@');
    if (at != std::string_view::npos) authority.remove_prefix(at + 1);
    auto colon = authority.find(':');
    if (colon != std::string_view::npos) authority = authority.substr(0, colon);
    return normalize_host(authority);
}

}  // namespace

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (true) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(start)
                                    : text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return lines;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    return text;
}

bool contains_icase(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    std::string h = to_lower(haystack);
    std::string n = to_lower(needle);
    return h.find(n) != std::string::npos;
}

std::string base64_encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                     static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back(kB64Alphabet[v & 63]);
        i += 3;
    }
    std::size_t rem = bytes.size() - i;
    if (rem == 1) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.append("==");
    } else if (rem == 2) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
    std::string out;
    out.reserve(text.size() / 4 * 3);
    int val = 0;
    int bits = -8;
    std::size_t pad = 0;
    for (char c : text) {
        if (c == '=') {
            ++pad;
            continue;
        }
        if (c == '\n' || c == '\r') continue;
        if (pad > 0) return std::nullopt;  // data after padding
        int d = b64_value(c);
        if (d < 0) return std::nullopt;
        val = (val << 6) | d;
        bits += 6;
        if (bits >= 0) {
            out.push_back(static_cast<char>((val >> bits) & 0xFF));
            bits -= 8;
        }
    }
    if (pad > 2) return std::nullopt;
    return out;
}

std::string hex_encode(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string fnv1a64_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 15];
        h >>= 4;
    }
    return out;
}

std::set<std::string> extract_hostnames(std::string_view text) {
    std::set<std::string> hosts;
    std::size_t i = 0;
    while (i < text.size()) {
        // URL form: take the authority after the scheme.
        if ((text.compare(i, 7, "http://") == 0) || (text.compare(i, 8, "https://") == 0)) {
            std::size_t start = text.find("//", i) + 2;
            std::size_t end = start;
            while (end < text.size() && text[end] != '/' && text[end] != '"' &&
                   text[end] != '\'' && text[end] != '<' && text[end] != '>' &&
                   text[end] != ')' && text[end] != ']' &&
                   !std::isspace(static_cast<unsigned char>(text[end]))) {
                ++end;
            }
            std::string host = host_of_authority(text.substr(start, end - start));
            if (!host.empty()) hosts.insert(host);
            i = end;
            continue;
        }
        // Bare dotted token.
        if (is_host_char(text[i]) && (i == 0 || !is_host_char(text[i - 1]))) {
            std::size_t end = i;
            bool has_dot = false;
            while (end < text.size() && is_host_char(text[end])) {
                if (text[end] == '.') has_dot = true;
                ++end;
            }
            if (has_dot) {
                // Skip path-like contexts (preceded by '/').
                bool path_context = i > 0 && text[i - 1] == '/';
                if (!path_context) {
                    std::string host = normalize_host(text.substr(i, end - i));
                    if (!host.empty() && host.find('.') != std::string::npos) hosts.insert(host);
                }
            }
            i = end;
            continue;
        }
        ++i;
    }
    return hosts;
}

bool is_ipv4(std::string_view host) {
    int parts = 0;
    std::size_t i = 0;
    while (i < host.size()) {
        std::size_t j = i;
        int value = 0;
        while (j < host.size() && std::isdigit(static_cast<unsigned char>(host[j]))) {
            value = value * 10 + (host[j] - '0');
            if (value > 255) return false;
            ++j;
        }
        if (j == i) return false;
        ++parts;
        if (j == host.size()) break;
        if (host[j] != '.') return false;
        i = j + 1;
        if (i == host.size()) return false;  // trailing dot
        continue;
    }
    return parts == 4;
}

bool is_loopback_host(std::string_view host) {
    std::string h = to_lower(trim(host));
    if (h == "localhost" || h == "::1" || h == "0.0.0.0") return true;
    return h.rfind("127.", 0) == 0 && is_ipv4(h);
}

bool is_private_ipv4(std::string_view host) {
    if (!is_ipv4(host)) return false;
    if (host.rfind("10.", 0) == 0) return true;
    if (host.rfind("192.168.", 0) == 0) return true;
    if (host.rfind("172.", 0) == 0) {
        std::size_t dot = host.find('.', 4);
        if (dot == std::string_view::npos) return false;
        int second = 0;
        for (std::size_t i = 4; i < dot; ++i) second = second * 10 + (host[i] - '0');
        return second >= 16 && second <= 31;
    }
    return false;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string truncate_excerpt(std::string_view text, std::size_t max_len) {
    if (text.size() <= max_len) return std::string(text);
    return std::string(text.substr(0, max_len));
}

}  // namespace skillguard::util
