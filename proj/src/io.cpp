#include "ruinkit/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace ruinkit {

namespace {

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            return cells;
        }
        cells.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line_no,
                             const std::string& what) {
    throw std::runtime_error(source + ":" + std::to_string(line_no) + ": " +
                             what);
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 32> buf;
    const auto result =
        std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), result.ptr);
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << cells[i];
    }
    out << '\n';
}

CsvTable read_numeric_csv(std::istream& in, const std::string& source_name) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            if (in.peek() == std::char_traits<char>::eof()) {
                break;  // tolerate one trailing newline
            }
            parse_fail(source_name, line_no, "empty line");
        }
        if (line_no == 1) {
            table.header = split_line(line);
            continue;
        }
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != table.header.size()) {
            parse_fail(source_name, line_no,
                       "expected " + std::to_string(table.header.size()) +
                           " cells, got " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const std::string& cell : cells) {
            double v = 0.0;
            const auto result =
                std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (result.ec != std::errc{} ||
                result.ptr != cell.data() + cell.size()) {
                parse_fail(source_name, line_no,
                           "malformed number '" + cell + "'");
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) {
        parse_fail(source_name, line_no == 0 ? 1 : line_no, "missing header");
    }
    return table;
}

std::vector<double> csv_column(const CsvTable& table, const std::string& name) {
    std::size_t index = table.header.size();
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == name) {
            index = i;
            break;
        }
    }
    if (index == table.header.size()) {
        throw std::runtime_error("no column named '" + name + "'");
    }
    std::vector<double> column;
    column.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        column.push_back(row[index]);
    }
    return column;
}

std::vector<double> parse_u_grid(const std::string& text) {
    const std::size_t first = text.find(':');
    const std::size_t second =
        first == std::string::npos ? std::string::npos
                                   : text.find(':', first + 1);
    if (second == std::string::npos ||
        text.find(':', second + 1) != std::string::npos) {
        throw std::invalid_argument("u-grid must be start:stop:step, got '" +
                                    text + "'");
    }
    auto parse_part = [&text](std::size_t begin, std::size_t end) {
        double v = 0.0;
        const char* b = text.data() + begin;
        const char* e = text.data() + end;
        const auto result = std::from_chars(b, e, v);
        if (result.ec != std::errc{} || result.ptr != e || !std::isfinite(v)) {
            throw std::invalid_argument("u-grid has malformed number in '" +
                                        text + "'");
        }
        return v;
    };
    const double start = parse_part(0, first);
    const double stop = parse_part(first + 1, second);
    const double step = parse_part(second + 1, text.size());
    if (!(step > 0.0) || start < 0.0) {
        throw std::invalid_argument(
            "u-grid requires start >= 0 and step > 0, got '" + text + "'");
    }
    if ((stop - start) / step > 1e6) {
        throw std::invalid_argument("u-grid '" + text + "' has over 10^6 points");
    }
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        const double u = start + static_cast<double>(k) * step;
        if (!(u < stop)) {
            break;
        }
        grid.push_back(u);
    }
    return grid;
}

}  // namespace ruinkit
