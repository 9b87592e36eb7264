#include "eolink/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "eolink/error.hpp"

namespace eolink::io {

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error(ErrorKind::io, "number formatting failed");
    return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw Error(ErrorKind::io, "not a number: '" + std::string(text) + "'");
    return value;
}

std::size_t Table::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorKind::io, "missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (const char c : line) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
            if (!current.empty()) fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) fields.push_back(std::move(current));
    return fields;
}

}  // namespace

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());

    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto fields = split_fields(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size())
            throw Error(ErrorKind::io, path.string() + ":" + std::to_string(line_no) +
                                           ": expected " + std::to_string(table.header.size()) +
                                           " fields");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw Error(ErrorKind::io, path.string() + ": no header row");
    return table;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path) {
    if (!out_) throw Error(ErrorKind::io, "cannot write " + path.string());
    for (const auto& h : header) cell(std::string_view(h));
    end_row();
}

CsvWriter& CsvWriter::cell(double value) { return cell(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::cell(std::string_view text) {
    if (!first_in_row_) out_ << ',';
    out_ << text;
    first_in_row_ = false;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    first_in_row_ = true;
    if (!out_) throw Error(ErrorKind::io, "write failed");
}

}  // namespace eolink::io
