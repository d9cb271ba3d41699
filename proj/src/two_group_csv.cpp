#include "bmdf/two_group_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "bmdf/errors.hpp"

namespace bmdf {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    return std::string(s.substr(b, s.find_last_not_of(" \t\r") - b + 1));
}

std::vector<std::string> split_fields(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        auto field = trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
        if (field.find('"') != std::string::npos) throw ParseError("quoted fields with embedded quotes are not supported", line_no);
        out.push_back(std::move(field));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError("column " + std::to_string(column) + ": '" + cell + "' is not a finite number", line_no);
    }
    return v;
}

}  // namespace

TwoGroupCsv parse_two_group_csv(std::istream& in) {
    TwoGroupCsv csv;
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_fields(line, line_no);
        if (csv.header.empty()) {
            if (fields.size() < 3) throw ParseError("header needs an id column and at least two value columns", line_no);
            csv.header = std::move(fields);
            continue;
        }
        if (fields.size() != csv.header.size()) {
            throw ParseError("expected " + std::to_string(csv.header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        if (fields[0].empty()) throw ParseError("empty id", line_no);
        if (!seen.insert(fields[0]).second) throw ParseError("duplicate id '" + fields[0] + "'", line_no);
        std::vector<double> row(fields.size() - 1);
        for (std::size_t j = 1; j < fields.size(); ++j) row[j - 1] = parse_cell(fields[j], line_no, j + 1);
        csv.ids.push_back(std::move(fields[0]));
        csv.data.rows.push_back(std::move(row));
    }
    if (csv.header.empty()) throw ParseError("missing header", line_no == 0 ? 1 : line_no);
    if (csv.ids.empty()) throw ParseError("no data rows after the header", line_no);
    return csv;
}

TwoGroupCsv read_two_group_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open input file '" + path + "'");
    return parse_two_group_csv(in);
}

void write_two_group_csv(std::ostream& out, const std::vector<std::string>& ids, const DataMatrix& data,
                         std::size_t n1, std::size_t n2) {
    if (ids.size() != data.size()) throw DimensionError("id count differs from row count");
    out << "id";
    for (std::size_t j = 1; j <= n1; ++j) out << ",control_" << j;
    for (std::size_t j = 1; j <= n2; ++j) out << ",treatment_" << j;
    out << '\n';
    out.precision(17);
    for (std::size_t m = 0; m < data.size(); ++m) {
        if (data.rows[m].size() != n1 + n2) throw DimensionError("row has the wrong number of values");
        out << ids[m];
        for (double v : data.rows[m]) out << ',' << v;
        out << '\n';
    }
}

}  // namespace bmdf
