#include "phslab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace phslab {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        if (section.empty()) throw ConfigError(where + ": key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        auto [it, inserted] = cfg.sections_[section].emplace(key, value);
        (void)it;
        if (!inserted)
            throw ConfigError(where + ": duplicate key '" + key + "' in [" + section + "]");
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const { return sections_.count(section) > 0; }

const std::string& Config::raw(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end())
        throw ConfigError(origin_ + ": missing section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end())
        throw ConfigError(origin_ + ": missing key '" + key + "' in [" + section + "]");
    return k->second;
}

std::string Config::text(const std::string& section, const std::string& key) const {
    return raw(section, key);
}

std::string Config::text_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? raw(section, key) : fallback;
}

namespace {

double parse_number(const std::string& value, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError(what + ": not a number: '" + value + "'");
    }
    if (used != value.size()) throw ConfigError(what + ": trailing junk in number: '" + value + "'");
    return v;
}

}  // namespace

double Config::number(const std::string& section, const std::string& key) const {
    return parse_number(raw(section, key), origin_ + " [" + section + "] " + key);
}

double Config::number_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

long Config::integer(const std::string& section, const std::string& key) const {
    const double v = number(section, key);
    const long i = static_cast<long>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError(origin_ + " [" + section + "] " + key + ": expected an integer");
    return i;
}

long Config::integer_or(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? integer(section, key) : fallback;
}

bool Config::flag_or(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = raw(section, key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(origin_ + " [" + section + "] " + key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
    std::istringstream in(raw(section, key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok)
        out.push_back(parse_number(tok, origin_ + " [" + section + "] " + key));
    return out;
}

void Config::require_known(const std::map<std::string, std::vector<std::string>>& allowed) const {
    for (const auto& [section, keys] : sections_) {
        const auto it = allowed.find(section);
        if (it == allowed.end())
            throw ConfigError(origin_ + ": unknown section [" + section + "]");
        for (const auto& [key, value] : keys) {
            (void)value;
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ConfigError(origin_ + ": unknown key '" + key + "' in [" + section + "]");
        }
    }
}

}  // namespace phslab
