#pragma once

// Plain-text table helpers shared by the file formats: round-trip decimal
// formatting, delimited table reading and CSV writing.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace eolink::io {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
double parse_double(std::string_view text);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // Index of a header column; throws io error if absent.
    std::size_t column(std::string_view name) const;
};

// Reads a table whose fields are separated by commas and/or whitespace.
// Empty lines and lines starting with '#' are skipped.
Table read_table(const std::filesystem::path& path);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& cell(double value);
    CsvWriter& cell(std::string_view text);
    void end_row();

private:
    std::ofstream out_;
    bool first_in_row_ = true;
};

}  // namespace eolink::io
