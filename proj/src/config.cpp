#include "bmdf/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "bmdf/errors.hpp"

namespace bmdf {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

void check_key(const std::string& key) {
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() || key.find('.', dot + 1) != std::string::npos) {
        throw ConfigurationError("configuration keys look like section.key, got '" + key + "'");
    }
}

RunConfig parse_stream(std::istream& in) {
    RunConfig cfg;
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError("config: " + e.message(), e.line());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigurationError("config: key '" + section + "' is outside any [section]");
        for (const auto& [key, value] : body) cfg.set(section + "." + key, value.data());
    }
    return cfg;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& text, const std::string& what) {
    const auto t = trim(text);
    double v = 0.0;
    const auto* begin = t.data();
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (t.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ConfigurationError(what + ": '" + text + "' is not a finite number");
    }
    return v;
}

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
    return parse_stream(in);
}

RunConfig RunConfig::load_string(const std::string& text) {
    std::istringstream in(text);
    return parse_stream(in);
}

void RunConfig::set(const std::string& key, const std::string& value) {
    check_key(key);
    tree_.put(boost::property_tree::ptree::path_type(key, '.'), trim(value));
}

void RunConfig::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigurationError("expected section.key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

bool RunConfig::has(const std::string& key) const { return raw(key).has_value(); }

std::optional<std::string> RunConfig::raw(const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return *v;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    return raw(key).value_or(fallback);
}

double RunConfig::get_double(const std::string& key, double fallback, double lo, double hi) const {
    const auto v = raw(key);
    const double x = v ? parse_double(*v, key) : fallback;
    if (!(x >= lo && x <= hi)) {
        std::ostringstream msg;
        msg << key << " = " << x << " is outside [" << lo << ", " << hi << "]";
        throw ConfigurationError(msg.str());
    }
    return x;
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback, std::size_t lo, std::size_t hi) const {
    const auto v = raw(key);
    std::size_t x = fallback;
    if (v) {
        const auto t = trim(*v);
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
        if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
            throw ConfigurationError(key + ": '" + *v + "' is not a nonnegative integer");
        }
    }
    if (x < lo || x > hi) {
        throw ConfigurationError(key + " = " + std::to_string(x) + " is outside [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]");
    }
    return x;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    std::string t = trim(*v);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ConfigurationError(key + ": '" + *v + "' is not a boolean");
}

std::vector<double> RunConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(*v)) out.push_back(parse_double(item, key));
    if (out.empty()) throw ConfigurationError(key + " is empty");
    return out;
}

std::vector<std::string> RunConfig::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    auto out = split_list(*v);
    if (out.empty()) throw ConfigurationError(key + " is empty");
    return out;
}

void RunConfig::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& line : entries()) {
        const auto key = line.substr(0, line.find(' '));
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigurationError("unknown configuration key '" + key + "'");
        }
    }
}

std::vector<std::string> RunConfig::entries() const {
    std::vector<std::string> out;
    for (const auto& [section, body] : tree_) {
        for (const auto& [key, value] : body) out.push_back(section + "." + key + " = " + value.data());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace bmdf
