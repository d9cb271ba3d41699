#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace bmdf {

// Sectioned key = value configuration (INI style). Keys are addressed as
// "section.key". Values set later (command-line flags) replace file values.
class RunConfig {
public:
    RunConfig() = default;

    static RunConfig load_file(const std::string& path);
    static RunConfig load_string(const std::string& text);

    // "section.key=value" or separate key and value.
    void set(const std::string& key, const std::string& value);
    void set_assignment(const std::string& assignment);

    bool has(const std::string& key) const;
    std::optional<std::string> raw(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback, double lo, double hi) const;
    std::size_t get_size(const std::string& key, std::size_t fallback, std::size_t lo, std::size_t hi) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

    // Rejects keys outside `allowed` ("section.key"); catches typos.
    void require_known(const std::vector<std::string>& allowed) const;

    // Sorted "section.key = value" lines, for settings echoes.
    std::vector<std::string> entries() const;

private:
    boost::property_tree::ptree tree_;
};

std::vector<std::string> split_list(const std::string& text);
double parse_double(const std::string& text, const std::string& what);

}  // namespace bmdf
