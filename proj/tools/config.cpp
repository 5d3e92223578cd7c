#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nhcli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

ConfigFile ConfigFile::from_string(const std::string& text) {
    ConfigFile cfg;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw std::runtime_error("config line " + std::to_string(lineno) + ": empty section name");
            if (!cfg.find(section)) cfg.sections_.push_back({section, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": key outside a section");
        cfg.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ConfigFile::Section* ConfigFile::find(const std::string& name) {
    for (auto& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

const ConfigFile::Section* ConfigFile::find(const std::string& name) const {
    for (const auto& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const Section* s = find(section);
    if (!s) return false;
    for (const auto& [k, v] : s->entries)
        if (k == key) return true;
    return false;
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    const Section* s = find(section);
    if (!s) return fallback;
    for (const auto& [k, v] : s->entries)
        if (k == key) return v;
    return fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    const std::string v = get(section, key);
    if (v.empty()) return fallback;
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size())
        throw std::runtime_error("config [" + section + "] " + key + ": not a number: '" + v + "'");
    return out;
}

long ConfigFile::get_long(const std::string& section, const std::string& key, long fallback) const {
    const std::string v = get(section, key);
    if (v.empty()) return fallback;
    std::size_t used = 0;
    const long out = std::stol(v, &used);
    if (used != v.size())
        throw std::runtime_error("config [" + section + "] " + key + ": not an integer: '" + v + "'");
    return out;
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
    const std::string v = get(section, key);
    if (v.empty()) return fallback;
    return std::stoull(v);
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const std::string v = get(section, key);
    if (v.empty()) return fallback;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error("config [" + section + "] " + key + ": expected true/false");
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
    Section* s = find(section);
    if (!s) {
        sections_.push_back({section, {}});
        s = &sections_.back();
    }
    for (auto& [k, v] : s->entries)
        if (k == key) {
            v = value;
            return;
        }
    s->entries.emplace_back(key, value);
}

void ConfigFile::set_double(const std::string& section, const std::string& key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    set(section, key, buf);
}

void ConfigFile::set_long(const std::string& section, const std::string& key, long value) {
    set(section, key, std::to_string(value));
}

void ConfigFile::set_bool(const std::string& section, const std::string& key, bool value) {
    set(section, key, value ? "true" : "false");
}

void ConfigFile::validate(const std::map<std::string, std::set<std::string>>& schema) const {
    for (const auto& s : sections_) {
        if (s.name == "result") continue;  // manifest echo, ignored on input
        auto it = schema.find(s.name);
        if (it == schema.end()) throw std::runtime_error("config: unknown section [" + s.name + "]");
        for (const auto& [k, v] : s.entries)
            if (!it->second.count(k))
                throw std::runtime_error("config: unknown key '" + k + "' in section [" + s.name + "]");
    }
}

std::string ConfigFile::serialize() const {
    std::string out;
    for (const auto& s : sections_) {
        out += "[" + s.name + "]\n";
        for (const auto& [k, v] : s.entries) out += k + " = " + v + "\n";
        out += "\n";
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

}  // namespace nhcli
