#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ri/sim/config.hpp"

namespace ri::sim {

namespace {

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(std::string_view line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> items;
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw std::runtime_error("expected a [list] value, got '" + v + "'");
    std::string body = v.substr(1, v.size() - 2);
    std::string cur;
    bool in_string = false;
    for (char c : body) {
        if (c == '"') in_string = !in_string;
        if (c == ',' && !in_string) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) items.push_back(trim(cur));
    return items;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
    ConfigFile cfg;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": empty key or value");
        cfg.values_[section][key] = value;
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const std::string* ConfigFile::find(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    if (s == values_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

double ConfigFile::number(const std::string& section, const std::string& key,
                          double fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    return std::stod(*v);
}

long long ConfigFile::integer(const std::string& section, const std::string& key,
                              long long fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    return std::stoll(*v);
}

bool ConfigFile::boolean(const std::string& section, const std::string& key,
                         bool fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw std::runtime_error("config key " + section + "." + key + ": expected true/false");
}

std::string ConfigFile::str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    return unquote(*v);
}

std::vector<double> ConfigFile::number_list(const std::string& section, const std::string& key,
                                            std::vector<double> fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(*v)) out.push_back(std::stod(item));
    return out;
}

std::vector<std::string> ConfigFile::str_list(const std::string& section, const std::string& key,
                                              std::vector<std::string> fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    std::vector<std::string> out;
    for (const auto& item : split_list(*v)) out.push_back(unquote(item));
    return out;
}

}  // namespace ri::sim
