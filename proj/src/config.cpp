#include "hgm/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hgm {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool is_comment_start(char c) { return c == '#' || c == ';'; }

/// Extracts a value, honouring double quotes and inline comments: an
/// unquoted value ends at the first comment character, a quoted value may
/// contain anything and tolerates only a trailing comment.
std::string parse_value(const std::string& raw, const std::string& context) {
    const std::string s = trim(raw);
    if (!s.empty() && s.front() == '"') {
        const auto close = s.find('"', 1);
        if (close == std::string::npos)
            throw std::runtime_error(context + ": unterminated quoted value");
        const std::string rest = trim(s.substr(close + 1));
        if (!rest.empty() && !is_comment_start(rest.front()))
            throw std::runtime_error(context + ": unexpected text after quoted value");
        return s.substr(1, close - 1);
    }
    for (std::size_t i = 0; i < s.size(); ++i)
        if (is_comment_start(s[i])) return trim(s.substr(0, i));
    return s;
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    const std::string where = origin.empty() ? "<string>" : origin;
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw std::runtime_error("config: " + where + ":" + std::to_string(line_no) +
                                         ": unterminated section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty())
                throw std::runtime_error("config: " + where + ":" + std::to_string(line_no) +
                                         ": empty section name");
            cfg.sections_[section];  // record even if empty
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: " + where + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        if (section.empty())
            throw std::runtime_error("config: " + where + ":" + std::to_string(line_no) +
                                     ": key outside of any [section]");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = parse_value(
            stripped.substr(eq + 1), "config: " + where + ":" + std::to_string(line_no));
        if (key.empty())
            throw std::runtime_error("config: " + where + ":" + std::to_string(line_no) +
                                     ": empty key");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
    sections_[section][key] = value;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key, "");
    try {
        std::size_t used = 0;
        const double value = std::stod(raw, &used);
        if (trim(raw.substr(used)) != "") throw std::invalid_argument(raw);
        return value;
    } catch (const std::logic_error&) {
        throw std::runtime_error("config: [" + section + "] " + key + ": not a number: " + raw);
    }
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key, "");
    try {
        std::size_t used = 0;
        const std::int64_t value = std::stoll(raw, &used);
        if (trim(raw.substr(used)) != "") throw std::invalid_argument(raw);
        return value;
    } catch (const std::logic_error&) {
        throw std::runtime_error("config: [" + section + "] " + key +
                                 ": not an integer: " + raw);
    }
}

std::uint64_t ConfigFile::get_uint(const std::string& section, const std::string& key,
                                   std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key, "");
    try {
        std::size_t used = 0;
        const std::uint64_t value = std::stoull(raw, &used);
        if (trim(raw.substr(used)) != "") throw std::invalid_argument(raw);
        return value;
    } catch (const std::logic_error&) {
        throw std::runtime_error("config: [" + section + "] " + key +
                                 ": not an integer: " + raw);
    }
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get_string(section, key, "");
    if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
    if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
    throw std::runtime_error("config: [" + section + "] " + key + ": not a boolean: " + raw);
}

std::vector<std::string> ConfigFile::get_list(const std::string& section,
                                              const std::string& key) const {
    std::vector<std::string> items;
    if (!has(section, key)) return items;
    const std::string raw = get_string(section, key, "");
    std::string current;
    std::istringstream in(raw);
    while (std::getline(in, current, ',')) {
        const std::string item = trim(current);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::vector<std::int64_t> ConfigFile::get_int_list(const std::string& section,
                                                   const std::string& key) const {
    std::vector<std::int64_t> values;
    for (const std::string& item : get_list(section, key)) {
        try {
            std::size_t used = 0;
            values.push_back(std::stoll(item, &used));
            if (trim(item.substr(used)) != "") throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw std::runtime_error("config: [" + section + "] " + key +
                                     ": not an integer list: " + item);
        }
    }
    return values;
}

}  // namespace hgm
