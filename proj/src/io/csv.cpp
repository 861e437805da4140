#include "pareto/io/csv.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pareto::io {

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

void CsvTable::add_row(std::vector<double> row)
{
    if (row.size() != header.size())
        throw DimensionError(fmt::format("CSV row has {} fields, header has {}", row.size(),
                                         header.size()));
    rows.push_back(std::move(row));
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw ConfigError(fmt::format("CSV column '{}' not found", name));
}

std::string CsvTable::to_string() const
{
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i)
            out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

CsvTable CsvTable::parse(const std::string& text)
{
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : l) {
            if (ch == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        out.push_back(cur);
        return out;
    };
    if (!std::getline(in, line))
        throw ConfigError("empty CSV input");
    t.header = split(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto fields = split(line);
        if (fields.size() != t.header.size())
            throw ConfigError(fmt::format("CSV line {} has {} fields, expected {}", lineno,
                                          fields.size(), t.header.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (end == f.c_str() || *end != '\0')
                throw ConfigError(fmt::format("CSV line {}: '{}' is not a number", lineno, f));
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError(fmt::format("cannot write '{}'", path));
    out << contents;
    if (!out)
        throw ConfigError(fmt::format("write to '{}' failed", path));
}

} // namespace pareto::io
