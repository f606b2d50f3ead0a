#pragma once

// Minimal reader for the comma-separated input tables. No quoting; fields
// are trimmed; blank lines and lines starting with '#' are skipped.

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace frequc::detail {

class CsvTable {
public:
    struct Row {
        std::vector<std::string> fields;
        int line = 0;
    };

    static CsvTable read(const std::filesystem::path& path,
                         const std::vector<std::string>& required_columns);

    const std::vector<Row>& rows() const { return rows_; }
    bool has_column(const std::string& name) const { return index_.count(name) > 0; }

    const std::string& text(const Row& row, const std::string& column) const;
    double number(const Row& row, const std::string& column) const;
    int integer(const Row& row, const std::string& column) const;

    [[noreturn]] void fail(const Row& row, const std::string& what) const;

private:
    std::filesystem::path path_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<Row> rows_;
};

}  // namespace frequc::detail
