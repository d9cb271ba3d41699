#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "bmdf/models.hpp"

namespace bmdf {

// id column followed by n1 control and n2 treatment columns, header mandatory.
struct TwoGroupCsv {
    std::vector<std::string> header;
    std::vector<std::string> ids;
    DataMatrix data;

    std::size_t value_columns() const { return header.empty() ? 0 : header.size() - 1; }
};

// Comma separated, '.' decimal point. Blank lines are skipped; NA or other
// non-numeric cells, ragged rows and an empty data section raise ParseError
// carrying the 1-based line number.
TwoGroupCsv parse_two_group_csv(std::istream& in);
TwoGroupCsv read_two_group_csv(const std::string& path);

void write_two_group_csv(std::ostream& out, const std::vector<std::string>& ids, const DataMatrix& data,
                         std::size_t n1, std::size_t n2);

}  // namespace bmdf
