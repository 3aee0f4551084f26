#pragma once

#include <map>
#include <string>
#include <vector>

// Run configuration: a minimal TOML-like grammar, just enough for flat
// sectioned key/value files.
//
//   [section]            # comment
//   name = "string"
//   count = 42
//   rate = 1.5e-3
//   flag = true
//   box = [0.0, 1.0]
//
// Keys are addressed as "section.key".  Values keep their source line so
// errors can point at the file.  Command-line overrides reuse the same value
// grammar ("--set section.key=value"), except that bare words are read as
// strings so shell users need not nest quotes.

namespace solpath {

class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<config>");

    void set_override(const std::string& dotted_key, const std::string& value_text);

    bool has(const std::string& key) const;

    std::string str(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    long integer(const std::string& key) const;
    long integer(const std::string& key, long fallback) const;
    bool boolean(const std::string& key) const;
    bool boolean(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

    // All keys, sorted; handy for echoing the effective configuration.
    std::vector<std::string> keys() const;
    const std::string& origin() const { return origin_; }

  private:
    enum class Kind { string, number, boolean, number_array };
    struct Value {
        Kind kind = Kind::string;
        std::string s;
        double num = 0.0;
        bool b = false;
        std::vector<double> arr;
        int line = 0;
    };

    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
    const Value& get(const std::string& key, Kind want) const;
    static Value parse_value(const std::string& text, const std::string& where);

    std::map<std::string, Value> values_;
    std::string origin_;
};

}  // namespace solpath
