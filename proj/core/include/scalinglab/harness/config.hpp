#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slab::harness {

/// Minimal structured-text config: `[section]` headers with `key = value`
/// lines; values are numbers, bare/quoted strings, booleans, or flat lists
/// `[a, b, c]`. `#` starts a comment. One file fully determines a sweep.
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           std::optional<std::string> fallback = {}) const;
    double get_number(const std::string& section, const std::string& key,
                      std::optional<double> fallback = {}) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
    std::vector<double> get_number_list(const std::string& section, const std::string& key) const;

  private:
    // section -> key -> raw scalar or list
    std::map<std::string, std::map<std::string, std::vector<std::string>>> data_;
    std::map<std::string, std::map<std::string, bool>> is_list_;
    const std::vector<std::string>* find(const std::string& s, const std::string& k) const;
};

}  // namespace slab::harness
