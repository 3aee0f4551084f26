#include "solpath/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace solpath {

namespace {

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// Strips a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool valid_key_part(const std::string& s) {
    if (s.empty()) return false;
    for (char ch : s)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
            return false;
    return true;
}

}  // namespace

Config::Value Config::parse_value(const std::string& text, const std::string& where) {
    Value v;
    const std::string t = trim(text);
    if (t.empty()) throw std::runtime_error(where + ": empty value");
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"')
            throw std::runtime_error(where + ": unterminated string");
        v.kind = Kind::string;
        v.s = t.substr(1, t.size() - 2);
        if (v.s.find('"') != std::string::npos)
            throw std::runtime_error(where + ": embedded quote in string");
        return v;
    }
    if (t == "true" || t == "false") {
        v.kind = Kind::boolean;
        v.b = (t == "true");
        return v;
    }
    if (t.front() == '[') {
        if (t.back() != ']') throw std::runtime_error(where + ": unterminated array");
        v.kind = Kind::number_array;
        const std::string inner = t.substr(1, t.size() - 2);
        std::string item;
        std::stringstream ss(inner);
        while (std::getline(ss, item, ',')) {
            const std::string e = trim(item);
            if (e.empty()) throw std::runtime_error(where + ": empty array element");
            try {
                std::size_t used = 0;
                v.arr.push_back(std::stod(e, &used));
                if (used != e.size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw std::runtime_error(where + ": array element '" + e + "' is not a number");
            }
        }
        if (trim(inner).empty()) v.arr.clear();
        return v;
    }
    try {
        std::size_t used = 0;
        v.num = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument("trailing junk");
        v.kind = Kind::number;
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": value '" + t +
                                 "' is not a number, boolean, string, or array");
    }
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw std::runtime_error(where + ": malformed section header '" + body + "'");
            section = trim(body.substr(1, body.size() - 2));
            if (!valid_key_part(section))
                throw std::runtime_error(where + ": invalid section name '" + section + "'");
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected 'key = value', got '" + body + "'");
        const std::string key = trim(body.substr(0, eq));
        if (!valid_key_part(key))
            throw std::runtime_error(where + ": invalid key '" + key + "'");
        if (section.empty())
            throw std::runtime_error(where + ": key '" + key + "' outside any [section]");
        Value v = parse_value(body.substr(eq + 1), where);
        v.line = line_no;
        const std::string full = section + "." + key;
        if (cfg.values_.count(full))
            throw std::runtime_error(where + ": duplicate key '" + full + "'");
        cfg.values_[full] = std::move(v);
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

void Config::set_override(const std::string& dotted_key, const std::string& value_text) {
    const std::size_t dot = dotted_key.find('.');
    if (dot == std::string::npos || !valid_key_part(dotted_key.substr(0, dot)) ||
        !valid_key_part(dotted_key.substr(dot + 1)))
        throw std::runtime_error("override key '" + dotted_key +
                                 "' must have the form section.key");
    Value v;
    try {
        v = parse_value(value_text, "override '" + dotted_key + "'");
    } catch (const std::exception&) {
        // Bare words act as strings so shell users need not nest quotes.
        v.kind = Kind::string;
        v.s = value_text;
    }
    v.line = 0;
    values_[dotted_key] = std::move(v);
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

void Config::fail(const std::string& key, const std::string& what) const {
    const auto it = values_.find(key);
    std::string where = origin_;
    if (it != values_.end() && it->second.line > 0)
        where += ":" + std::to_string(it->second.line);
    throw std::runtime_error(where + ": key '" + key + "' " + what);
}

const Config::Value& Config::get(const std::string& key, Kind want) const {
    const auto it = values_.find(key);
    if (it == values_.end()) fail(key, "is missing");
    if (it->second.kind != want) {
        const char* names[] = {"a string", "a number", "a boolean", "a number array"};
        fail(key, std::string("must be ") + names[static_cast<int>(want)]);
    }
    return it->second;
}

std::string Config::str(const std::string& key) const { return get(key, Kind::string).s; }
std::string Config::str(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
}

double Config::number(const std::string& key) const { return get(key, Kind::number).num; }
double Config::number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long Config::integer(const std::string& key) const {
    const double v = number(key);
    const double r = std::round(v);
    if (std::fabs(v - r) > 1e-9 || std::fabs(v) > 9e15) fail(key, "must be an integer");
    return static_cast<long>(r);
}
long Config::integer(const std::string& key, long fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool Config::boolean(const std::string& key) const { return get(key, Kind::boolean).b; }
bool Config::boolean(const std::string& key, bool fallback) const {
    return has(key) ? boolean(key) : fallback;
}

std::vector<double> Config::numbers(const std::string& key) const {
    return get(key, Kind::number_array).arr;
}
std::vector<double> Config::numbers(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? numbers(key) : fallback;
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> out;
    out.reserve(values_.size());
    for (const auto& [k, v] : values_) out.push_back(k);
    return out;
}

}  // namespace solpath
