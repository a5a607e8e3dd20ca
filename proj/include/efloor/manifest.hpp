#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace efloor {

inline constexpr const char* kVersion = "efloor 1.0.0";

// Reproducibility record written next to every CLI output file: rerunning
// the recorded command on inputs with the recorded digests must reproduce
// the output byte for byte.
struct RunManifest {
    std::string command;      // argv joined by spaces
    std::string config_json;  // effective configuration after precedence
    std::map<std::string, std::string> input_digests;  // path -> fnv1a-64 hex
    std::string version = kVersion;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(std::uint64_t d);

std::string read_text_file(const std::string& path);  // throws on failure
void write_text_file(const std::string& path, const std::string& content);

std::string manifest_to_json(const RunManifest& m);

}  // namespace efloor
