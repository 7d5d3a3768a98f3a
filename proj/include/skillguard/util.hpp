#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace skillguard::util {

/// Splits on '\n', stripping a trailing '\r' from each line. The final line is
/// included even without a terminator; an empty input yields one empty line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);
bool contains_icase(std::string_view haystack, std::string_view needle);

std::string base64_encode(std::string_view bytes);
std::optional<std::string> base64_decode(std::string_view text);
std::string hex_encode(std::string_view bytes);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

/// Extracts hostnames from free text: hosts of http(s) URLs plus bare dotted
/// hostnames and IPv4 literals. Lowercased, ports stripped. Dotted tokens
/// whose last label looks like a file extension are skipped.
std::set<std::string> extract_hostnames(std::string_view text);

bool is_ipv4(std::string_view host);
bool is_loopback_host(std::string_view host);
bool is_private_ipv4(std::string_view host);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::string truncate_excerpt(std::string_view text, std::size_t max_len = 200);

}  // namespace skillguard::util
