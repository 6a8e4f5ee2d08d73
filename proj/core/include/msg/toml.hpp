#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace msg::toml {

// Minimal TOML subset sufficient for run configs: [section] headers
// (dotted allowed), bare keys, strings, integers, floats, booleans, and
// flat arrays of those. Tables are flattened to "section.key" paths.

struct Value {
    enum class Kind { String, Integer, Float, Boolean, Array };
    Kind kind = Kind::String;
    std::string str;
    std::int64_t integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<Value> array;
    int line = 0;

    // Typed accessors; a Float request accepts an Integer value.
    const std::string& as_string(const std::string& key) const;
    std::int64_t as_integer(const std::string& key) const;
    double as_float(const std::string& key) const;
    bool as_boolean(const std::string& key) const;
    std::vector<double> as_float_array(const std::string& key) const;
    std::vector<std::string> as_string_array(const std::string& key) const;
};

using Table = std::map<std::string, Value>;

class TomlError : public std::runtime_error {
public:
    explicit TomlError(const std::string& what) : std::runtime_error(what) {}
};

Table parse(const std::string& text);
Table parse_file(const std::filesystem::path& path);

}  // namespace msg::toml
