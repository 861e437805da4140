#pragma once

#include "pareto/common.hpp"

#include <string>
#include <vector>

namespace pareto::io {

// Numeric CSV table with a header row. Doubles are written in shortest
// round-trip form so a write/read cycle reproduces every value bit for bit.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::size_t column(const std::string& name) const; // throws ConfigError if absent
    std::string to_string() const;
    static CsvTable parse(const std::string& text);
};

std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace pareto::io
