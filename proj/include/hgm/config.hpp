#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hgm {

/// Sectioned key-value configuration:
///
///   # comment
///   [section]
///   key = value
///   list = 1, 2, 3
///   name = "spaces preserved"
///
/// Values are stored as strings and parsed by the typed getters; every
/// getter takes a default so configs only state what they change.
class ConfigFile {
public:
    using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

    ConfigFile() = default;
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin = "");

    bool has(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key, const std::string& value);

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
    std::vector<std::int64_t> get_int_list(const std::string& section,
                                           const std::string& key) const;

    const SectionMap& sections() const { return sections_; }
    void replace_sections(SectionMap sections) { sections_ = std::move(sections); }

private:
    SectionMap sections_;
};

}  // namespace hgm
