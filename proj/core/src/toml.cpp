#include "msg/toml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace msg::toml {

namespace {

std::string type_name(Value::Kind k) {
    switch (k) {
        case Value::Kind::String: return "string";
        case Value::Kind::Integer: return "integer";
        case Value::Kind::Float: return "float";
        case Value::Kind::Boolean: return "boolean";
        case Value::Kind::Array: return "array";
    }
    return "?";
}

[[noreturn]] void fail_at(int line, const std::string& what) {
    throw TomlError("line " + std::to_string(line) + ": " + what);
}

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    int line;

    bool done() const { return i >= s.size(); }
    char peek() const { return s[i]; }
    char take() { return s[i++]; }
    void skip_ws() {
        while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
};

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& c) {
    std::string key;
    while (!c.done() && is_bare_key_char(c.peek())) key.push_back(c.take());
    if (key.empty()) fail_at(c.line, "expected a key");
    return key;
}

Value parse_scalar(Cursor& c);

Value parse_string(Cursor& c) {
    Value v;
    v.kind = Value::Kind::String;
    v.line = c.line;
    c.take();  // opening quote
    while (true) {
        if (c.done()) fail_at(c.line, "unterminated string");
        char ch = c.take();
        if (ch == '"') break;
        if (ch == '\\') {
            if (c.done()) fail_at(c.line, "unterminated escape");
            char esc = c.take();
            switch (esc) {
                case 'n': v.str.push_back('\n'); break;
                case 't': v.str.push_back('\t'); break;
                case '"': v.str.push_back('"'); break;
                case '\\': v.str.push_back('\\'); break;
                default: fail_at(c.line, std::string("unsupported escape '\\") + esc + "'");
            }
        } else {
            v.str.push_back(ch);
        }
    }
    return v;
}

Value parse_number_or_bool(Cursor& c) {
    Value v;
    v.line = c.line;
    std::string tok;
    while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
           c.peek() != ' ' && c.peek() != '\t')
        tok.push_back(c.take());
    if (tok == "true" || tok == "false") {
        v.kind = Value::Kind::Boolean;
        v.boolean = tok == "true";
        return v;
    }
    const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                             tok == "inf" || tok == "-inf" || tok == "nan";
    try {
        std::size_t used = 0;
        if (looks_float) {
            v.kind = Value::Kind::Float;
            v.real = std::stod(tok, &used);
        } else {
            v.kind = Value::Kind::Integer;
            v.integer = std::stoll(tok, &used);
        }
        if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
        fail_at(c.line, "cannot parse value '" + tok + "'");
    }
    return v;
}

Value parse_array(Cursor& c) {
    Value v;
    v.kind = Value::Kind::Array;
    v.line = c.line;
    c.take();  // '['
    c.skip_ws();
    while (true) {
        if (c.done()) fail_at(c.line, "unterminated array");
        if (c.peek() == ']') {
            c.take();
            break;
        }
        v.array.push_back(parse_scalar(c));
        c.skip_ws();
        if (!c.done() && c.peek() == ',') {
            c.take();
            c.skip_ws();
        } else if (!c.done() && c.peek() == ']') {
            c.take();
            break;
        } else {
            fail_at(c.line, "expected ',' or ']' in array");
        }
    }
    return v;
}

Value parse_scalar(Cursor& c) {
    c.skip_ws();
    if (c.done()) fail_at(c.line, "expected a value");
    if (c.peek() == '"') return parse_string(c);
    if (c.peek() == '[') return parse_array(c);
    return parse_number_or_bool(c);
}

}  // namespace

const std::string& Value::as_string(const std::string& key) const {
    if (kind != Kind::String)
        throw TomlError("key '" + key + "': expected string, got " + type_name(kind));
    return str;
}

std::int64_t Value::as_integer(const std::string& key) const {
    if (kind != Kind::Integer)
        throw TomlError("key '" + key + "': expected integer, got " + type_name(kind));
    return integer;
}

double Value::as_float(const std::string& key) const {
    if (kind == Kind::Float) return real;
    if (kind == Kind::Integer) return static_cast<double>(integer);
    throw TomlError("key '" + key + "': expected float, got " + type_name(kind));
}

bool Value::as_boolean(const std::string& key) const {
    if (kind != Kind::Boolean)
        throw TomlError("key '" + key + "': expected boolean, got " + type_name(kind));
    return boolean;
}

std::vector<double> Value::as_float_array(const std::string& key) const {
    if (kind != Kind::Array)
        throw TomlError("key '" + key + "': expected array, got " + type_name(kind));
    std::vector<double> out;
    for (const auto& v : array) out.push_back(v.as_float(key));
    return out;
}

std::vector<std::string> Value::as_string_array(const std::string& key) const {
    if (kind != Kind::Array)
        throw TomlError("key '" + key + "': expected array, got " + type_name(kind));
    std::vector<std::string> out;
    for (const auto& v : array) out.push_back(v.as_string(key));
    return out;
}

Table parse(const std::string& text) {
    Table table;
    std::string prefix;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        Cursor c{raw, 0, line_no};
        c.skip_ws();
        if (c.done() || c.peek() == '#') continue;
        if (c.peek() == '[') {
            c.take();
            std::string section;
            c.skip_ws();
            section = parse_bare_key(c);
            while (!c.done() && c.peek() == '.') {
                c.take();
                section += "." + parse_bare_key(c);
            }
            c.skip_ws();
            if (c.done() || c.take() != ']') fail_at(line_no, "expected ']' after section name");
            c.skip_ws();
            if (!c.done() && c.peek() != '#') fail_at(line_no, "trailing text after section header");
            prefix = section + ".";
            continue;
        }
        std::string key = parse_bare_key(c);
        while (!c.done() && c.peek() == '.') {
            c.take();
            key += "." + parse_bare_key(c);
        }
        c.skip_ws();
        if (c.done() || c.take() != '=') fail_at(line_no, "expected '=' after key '" + key + "'");
        Value v = parse_scalar(c);
        v.line = line_no;
        c.skip_ws();
        if (!c.done() && c.peek() != '#') fail_at(line_no, "trailing text after value");
        std::string full = prefix + key;
        if (table.count(full)) fail_at(line_no, "duplicate key '" + full + "'");
        table.emplace(std::move(full), std::move(v));
    }
    return table;
}

Table parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TomlError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const TomlError& e) {
        throw TomlError(path.string() + ": " + e.what());
    }
}

}  // namespace msg::toml
