#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "frequc/errors.hpp"

namespace frequc::detail {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable CsvTable::read(const std::filesystem::path& path,
                        const std::vector<std::string>& required_columns) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    CsvTable table;
    table.path_ = path;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split(t);
        if (!have_header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (!table.index_.emplace(fields[i], i).second) {
                    throw ParseError(path.string() + ":" + std::to_string(lineno) +
                                     ": duplicate column '" + fields[i] + "'");
                }
            }
            width = fields.size();
            have_header = true;
            continue;
        }
        if (fields.size() != width) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(width) + " fields, got " +
                             std::to_string(fields.size()));
        }
        table.rows_.push_back({std::move(fields), lineno});
    }
    if (!have_header) throw ParseError(path.string() + ": missing header");
    for (const auto& col : required_columns) {
        if (!table.has_column(col)) {
            throw ParseError(path.string() + ":1: missing column '" + col + "'");
        }
    }
    return table;
}

const std::string& CsvTable::text(const Row& row, const std::string& column) const {
    const auto it = index_.find(column);
    if (it == index_.end()) fail(row, "missing column '" + column + "'");
    return row.fields[it->second];
}

double CsvTable::number(const Row& row, const std::string& column) const {
    const std::string& s = text(row, column);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        fail(row, "column '" + column + "': '" + s + "' is not a number");
    }
    return v;
}

int CsvTable::integer(const Row& row, const std::string& column) const {
    const std::string& s = text(row, column);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        fail(row, "column '" + column + "': '" + s + "' is not an integer");
    }
    return v;
}

void CsvTable::fail(const Row& row, const std::string& what) const {
    throw ParseError(path_.string() + ":" + std::to_string(row.line) + ": " + what);
}

}  // namespace frequc::detail
