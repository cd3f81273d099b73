#include "hgm/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hgm {

using nlohmann::json;

std::string fnv1a_hex(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

std::string fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("fnv1a_file: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    return fnv1a_hex(bytes.data(), bytes.size());
}

namespace {

json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& pairs) {
    json arr = json::array();
    for (const auto& [path, hash] : pairs) arr.push_back({{"path", path}, {"hash", hash}});
    return arr;
}

std::vector<std::pair<std::string, std::string>> pairs_from_json(const json& arr) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& item : arr)
        pairs.emplace_back(item.at("path").get<std::string>(),
                           item.at("hash").get<std::string>());
    return pairs;
}

}  // namespace

void write_manifest(const std::string& path, const RunManifest& manifest) {
    json j;
    j["command"] = manifest.command;
    j["seed"] = manifest.seed;
    j["wall_time_s"] = manifest.wall_time_s;
    j["config"] = json::object();
    for (const auto& [section, entries] : manifest.config) {
        json sec = json::object();
        for (const auto& [key, value] : entries) sec[key] = value;
        j["config"][section] = sec;
    }
    j["inputs"] = pairs_to_json(manifest.inputs);
    j["outputs"] = pairs_to_json(manifest.outputs);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write_manifest: write failed for " + path);
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_manifest: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("read_manifest: " + path + ": " + e.what());
    }
    RunManifest manifest;
    manifest.command = j.at("command").get<std::string>();
    manifest.seed = j.at("seed").get<std::uint64_t>();
    manifest.wall_time_s = j.at("wall_time_s").get<double>();
    for (const auto& [section, entries] : j.at("config").items())
        for (const auto& [key, value] : entries.items())
            manifest.config[section][key] = value.get<std::string>();
    manifest.inputs = pairs_from_json(j.at("inputs"));
    manifest.outputs = pairs_from_json(j.at("outputs"));
    return manifest;
}

}  // namespace hgm
