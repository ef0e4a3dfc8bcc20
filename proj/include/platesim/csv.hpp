#pragma once

// Plain comma-separated tables with a mandatory header row. Numeric cells are
// written with 17 significant digits so files round-trip bit-exactly.

#include <filesystem>
#include <string>
#include <vector>

namespace platesim {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    // `# key=value` lines preceding the header, without the leading `# `.
    std::vector<std::string> meta;

    int column(const std::string& name) const; // -1 if absent
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

} // namespace platesim
