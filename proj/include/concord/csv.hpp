#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace concord::csv {

/// One non-blank line of a comma-separated file, already split into fields.
struct Row {
    std::size_t line = 0;  ///< 1-based line number in the source
    std::vector<std::string> fields;
};

/// Reads the header and all data rows. Blank lines are skipped; fields are
/// trimmed of surrounding whitespace and a trailing '\r'. No quoting support.
struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;
};

Table read(std::istream& in);

std::vector<std::string> split(std::string_view line);

/// Strict number parse of the whole field; false on trailing junk or empty.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long& out);

/// `%.6g` rendering used by the plot-data tables.
std::string format6(double value);

}  // namespace concord::csv
