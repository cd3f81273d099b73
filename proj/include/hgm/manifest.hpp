#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hgm/config.hpp"

namespace hgm {

/// Record of one CLI run: the command, the fully resolved configuration
/// (file values plus flag overrides), and content hashes of every input
/// and output. Feeding the manifest back through the rerun command
/// reproduces the outputs byte-identically.
struct RunManifest {
    std::string command;
    ConfigFile::SectionMap config;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;   // path, content hash
    std::vector<std::pair<std::string, std::string>> outputs;  // path, content hash
    double wall_time_s = 0.0;
};

/// 64-bit FNV-1a over a byte range, rendered as fixed-width hex.
std::string fnv1a_hex(const void* data, std::size_t size);
/// Same hash over a file's bytes; throws std::runtime_error if unreadable.
std::string fnv1a_file(const std::string& path);

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

}  // namespace hgm
