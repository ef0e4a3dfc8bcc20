#include "platesim/csv.hpp"

#include "platesim/errors.hpp"
#include "platesim/ini.hpp"

#include <fstream>
#include <sstream>

namespace platesim {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open file: " + path.string());
    }
    CsvTable table;
    std::string line;
    bool have_header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t b = 1;
            while (b < line.size() && line[b] == ' ') ++b;
            table.meta.push_back(line.substr(b));
            continue;
        }
        if (!have_header) {
            table.header = split_fields(line);
            have_header = true;
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != table.header.size()) {
            throw config_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected " +
                               std::to_string(table.header.size()) +
                               " fields, got " + std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            row.push_back(parse_double(
                f, path.string() + ":" + std::to_string(lineno)));
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw config_error(path.string() + ": missing header row");
    }
    return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) {
        throw config_error("cannot write file: " + path.string());
    }
    for (const auto& m : table.meta) out << "# " << m << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ",";
        out << table.header[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << format_double(row[i]);
        }
        out << "\n";
    }
}

} // namespace platesim
