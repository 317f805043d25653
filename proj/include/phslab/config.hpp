#pragma once

#include "phslab/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace phslab {

// ============================================================================
// Scenario configuration files
//
// INI-style text: [section] headers, key = value pairs, # comments, blank
// lines ignored. Values are kept verbatim; typed accessors parse on demand
// and raise ConfigError with the offending location. Duplicate keys within
// a section are rejected.
// ============================================================================

class Config {
public:
    [[nodiscard]] static Config parse_file(const std::string& path);
    [[nodiscard]] static Config parse_text(const std::string& text, const std::string& origin = "<inline>");

    [[nodiscard]] bool has(const std::string& section, const std::string& key) const;
    [[nodiscard]] bool has_section(const std::string& section) const;

    [[nodiscard]] std::string text(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::string text_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const;

    [[nodiscard]] double number(const std::string& section, const std::string& key) const;
    [[nodiscard]] double number_or(const std::string& section, const std::string& key,
                                   double fallback) const;

    [[nodiscard]] long integer(const std::string& section, const std::string& key) const;
    [[nodiscard]] long integer_or(const std::string& section, const std::string& key,
                                  long fallback) const;

    [[nodiscard]] bool flag_or(const std::string& section, const std::string& key,
                               bool fallback) const;

    /// Whitespace-separated list of numbers.
    [[nodiscard]] std::vector<double> numbers(const std::string& section,
                                              const std::string& key) const;

    /// Rejects sections/keys outside the given allowlist (section -> keys).
    /// Call after parsing so typos in scenario files fail loudly.
    void require_known(const std::map<std::string, std::vector<std::string>>& allowed) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;

    [[nodiscard]] const std::string& raw(const std::string& section, const std::string& key) const;
};

}  // namespace phslab
