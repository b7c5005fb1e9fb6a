#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace emoidx::csv {

// Splits one record. Supports double-quoted fields with "" escapes; quoted
// fields may not span lines.
std::vector<std::string> split(std::string_view line);

// Quotes the field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based source line of each row, for error messages.
    std::vector<std::size_t> lines;
};

// Reads a whole CSV file; every row must have as many fields as the header.
// Throws DataError.
Table read(const std::filesystem::path& path);

// Index of column `name`; throws DataError if missing.
std::size_t column(const Table& t, std::string_view name);

} // namespace emoidx::csv
