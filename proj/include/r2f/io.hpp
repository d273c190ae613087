#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace r2f {

// Reads a whole file; throws Error(kIo) when it cannot be opened.
std::string read_file(const std::string& path);

std::vector<std::string> read_lines(const std::string& path);

// Writes `content` to a sibling temp file and renames it over `path`, so a
// failed run never leaves a partial output behind.
void write_file_atomic(const std::string& path, std::string_view content);

// Shortest decimal representation that parses back to the identical double.
std::string format_double(double value);
double parse_double(std::string_view text);

// 64-bit FNV-1a; stable across platforms, used for seeding and digests.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);

}  // namespace r2f
