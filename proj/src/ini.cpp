#include "platesim/ini.hpp"

#include "platesim/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace platesim {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

const std::string* IniSection::find(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

const IniSection* IniDoc::find(const std::string& name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

IniDoc parse_ini(const std::string& text) {
    IniDoc doc;
    IniSection* current = nullptr;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw config_error("line " + std::to_string(lineno) +
                                   ": unterminated section header");
            }
            std::string name = trim(t.substr(1, t.size() - 2));
            if (name.empty()) {
                throw config_error("line " + std::to_string(lineno) +
                                   ": empty section name");
            }
            if (doc.find(name) != nullptr) {
                throw config_error("line " + std::to_string(lineno) +
                                   ": duplicate section [" + name + "]");
            }
            doc.sections.push_back(IniSection{name, {}});
            current = &doc.sections.back();
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw config_error("line " + std::to_string(lineno) +
                               ": expected `key = value`, got \"" + t + "\"");
        }
        if (current == nullptr) {
            throw config_error("line " + std::to_string(lineno) +
                               ": key/value pair outside any section");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw config_error("line " + std::to_string(lineno) +
                               ": empty key");
        }
        if (current->find(key) != nullptr) {
            throw config_error("line " + std::to_string(lineno) +
                               ": duplicate key \"" + key + "\" in [" +
                               current->name + "]");
        }
        current->entries.emplace_back(std::move(key), std::move(value));
    }
    return doc;
}

std::string serialize_ini(const IniDoc& doc) {
    std::string out;
    bool first = true;
    for (const auto& s : doc.sections) {
        if (!first) out += "\n";
        first = false;
        out += "[" + s.name + "]\n";
        for (const auto& [k, v] : s.entries) {
            out += k + " = " + v + "\n";
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& context) {
    const std::string t = trim(s);
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw config_error(context + ": not a number: \"" + s + "\"");
    }
    return v;
}

long long parse_integer(const std::string& s, const std::string& context) {
    const std::string t = trim(s);
    long long v = 0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw config_error(context + ": not an integer: \"" + s + "\"");
    }
    return v;
}

} // namespace platesim
