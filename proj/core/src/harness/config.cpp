#include "scalinglab/harness/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slab::harness {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        std::vector<std::string> items;
        bool is_list = false;
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) + ": unterminated list");
            is_list = true;
            std::string body = value.substr(1, value.size() - 2);
            std::string item;
            std::istringstream bs(body);
            while (std::getline(bs, item, ',')) {
                item = trim(item);
                if (!item.empty()) items.push_back(unquote(item));
            }
        } else {
            items.push_back(unquote(value));
        }
        cfg.data_[section][key] = std::move(items);
        cfg.is_list_[section][key] = is_list;
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str());
}

const std::vector<std::string>* ConfigFile::find(const std::string& s, const std::string& k) const {
    const auto sec = data_.find(s);
    if (sec == data_.end()) return nullptr;
    const auto it = sec->second.find(k);
    return it == sec->second.end() ? nullptr : &it->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   std::optional<std::string> fallback) const {
    const auto* v = find(section, key);
    if (!v || v->empty()) {
        if (fallback) return *fallback;
        throw std::runtime_error("config: missing [" + section + "] " + key);
    }
    return v->front();
}

double ConfigFile::get_number(const std::string& section, const std::string& key,
                              std::optional<double> fallback) const {
    const auto* v = find(section, key);
    if (!v || v->empty()) {
        if (fallback) return *fallback;
        throw std::runtime_error("config: missing [" + section + "] " + key);
    }
    try {
        return std::stod(v->front());
    } catch (const std::exception&) {
        throw std::runtime_error("config: [" + section + "] " + key + " is not a number");
    }
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const auto* v = find(section, key);
    if (!v || v->empty()) return fallback;
    const std::string& s = v->front();
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::runtime_error("config: [" + section + "] " + key + " is not a boolean");
}

std::vector<std::string> ConfigFile::get_list(const std::string& section, const std::string& key) const {
    const auto* v = find(section, key);
    return v ? *v : std::vector<std::string>{};
}

std::vector<double> ConfigFile::get_number_list(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : get_list(section, key)) {
        try {
            out.push_back(std::stod(s));
        } catch (const std::exception&) {
            throw std::runtime_error("config: [" + section + "] " + key + " has non-numeric entry '" + s + "'");
        }
    }
    return out;
}

}  // namespace slab::harness
