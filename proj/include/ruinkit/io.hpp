#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ruinkit {

/// Shortest decimal form that parses back to the same double, so emitted
/// files are byte-identical across reruns.
std::string format_double(double value);

/// Joins cells with commas and terminates the line.
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV with a header line. Malformed cells or ragged rows
/// raise std::runtime_error naming the source and 1-based line number.
CsvTable read_numeric_csv(std::istream& in, const std::string& source_name);

/// Column by header name; throws std::runtime_error when absent.
std::vector<double> csv_column(const CsvTable& table, const std::string& name);

/// Parses "start:stop:step" into the grid start, start+step, ... below stop
/// (start inclusive, stop exclusive). Requires step > 0 and start >= 0.
std::vector<double> parse_u_grid(const std::string& text);

}  // namespace ruinkit
