#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace nhcli {

/// Flat "key = value" configuration with [section] headers, order
/// preserving so that manifests serialize deterministically. The [result]
/// section is reserved for run outputs and is skipped on validation.
class ConfigFile {
  public:
    static ConfigFile load(const std::string& path);
    static ConfigFile from_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_long(const std::string& section, const std::string& key, long fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    void set_double(const std::string& section, const std::string& key, double value);
    void set_long(const std::string& section, const std::string& key, long value);
    void set_bool(const std::string& section, const std::string& key, bool value);

    /// Rejects any key outside the schema (the [result] section excepted).
    void validate(const std::map<std::string, std::set<std::string>>& schema) const;

    std::string serialize() const;

  private:
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;
    };
    std::vector<Section> sections_;

    Section* find(const std::string& name);
    const Section* find(const std::string& name) const;
};

std::vector<std::string> split_list(const std::string& text);

}  // namespace nhcli
