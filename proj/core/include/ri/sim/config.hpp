#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ri::sim {

// Minimal TOML-style configuration reader: [section] headers, `key =
// value` pairs, # comments. Values are numbers, booleans, quoted
// strings, or flat [a, b, c] lists of those.
class ConfigFile {
public:
    static ConfigFile parse(std::string_view text);
    static ConfigFile parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;

    double number(const std::string& section, const std::string& key, double fallback) const;
    long long integer(const std::string& section, const std::string& key,
                      long long fallback) const;
    bool boolean(const std::string& section, const std::string& key, bool fallback) const;
    std::string str(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    std::vector<double> number_list(const std::string& section, const std::string& key,
                                    std::vector<double> fallback) const;
    std::vector<std::string> str_list(const std::string& section, const std::string& key,
                                      std::vector<std::string> fallback) const;

private:
    const std::string* find(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace ri::sim
