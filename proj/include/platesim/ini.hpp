#pragma once

// Minimal strict INI reader/writer for the run configuration files.
// Sections in brackets, `key = value` pairs, `#`/`;` comments. Order is
// preserved so serialization round-trips. Duplicate keys and malformed
// lines are hard errors.

#include <string>
#include <utility>
#include <vector>

namespace platesim {

struct IniSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string* find(const std::string& key) const;
};

struct IniDoc {
    std::vector<IniSection> sections;

    const IniSection* find(const std::string& name) const;
};

IniDoc parse_ini(const std::string& text);
std::string serialize_ini(const IniDoc& doc);

// Exact decimal representation of a double (round-trips bit-exactly).
std::string format_double(double v);
double parse_double(const std::string& s, const std::string& context);
long long parse_integer(const std::string& s, const std::string& context);

} // namespace platesim
