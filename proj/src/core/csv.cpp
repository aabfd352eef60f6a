#include "ptab/core/csv.hpp"

#include "ptab/core/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ptab {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            return cells;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

double parse_number(std::string_view cell, std::size_t line, std::string_view column) {
    double v = 0.0;
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ParseError(line, "non-numeric value '" + std::string(cell) + "' in column " +
                                   std::string(column));
    }
    return v;
}

int parse_binary(std::string_view cell, std::size_t line, std::string_view column) {
    const double v = parse_number(cell, line, column);
    if (v != 0.0 && v != 1.0) {
        throw ParseError(line, "column " + std::string(column) + " must be 0 or 1, got '" +
                                   std::string(cell) + "'");
    }
    return static_cast<int>(v);
}

long parse_integer(std::string_view cell, std::size_t line, std::string_view column) {
    const double v = parse_number(cell, line, column);
    if (v != std::floor(v)) {
        throw ParseError(line, "column " + std::string(column) + " must be an integer");
    }
    return static_cast<long>(v);
}

void expect_header(const std::vector<std::string_view>& header,
                   const std::vector<std::string>& fixed, char feature_prefix) {
    if (header.size() < fixed.size()) {
        throw ParseError(1, "header too short");
    }
    for (std::size_t j = 0; j < fixed.size(); ++j) {
        if (header[j] != fixed[j]) {
            throw ParseError(1, "expected column '" + fixed[j] + "', found '" + std::string(header[j]) + "'");
        }
    }
    for (std::size_t j = fixed.size(); j < header.size(); ++j) {
        const std::string expected = feature_prefix + std::to_string(j - fixed.size() + 1);
        if (header[j] != expected) {
            throw ParseError(1, "expected column '" + expected + "', found '" + std::string(header[j]) + "'");
        }
    }
}

void put_number(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

}  // namespace

IidDataset read_iid_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    const auto header = split(line);
    expect_header(header, {"y", "a"}, 'x');
    const std::size_t p = header.size() - 2;

    std::vector<double> xs;
    std::vector<int> as;
    std::vector<double> ys;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                                          std::to_string(cells.size()));
        }
        ys.push_back(parse_number(cells[0], line_no, "y"));
        as.push_back(parse_binary(cells[1], line_no, "a"));
        for (std::size_t j = 0; j < p; ++j) xs.push_back(parse_number(cells[2 + j], line_no, header[2 + j]));
    }
    const std::size_t n = ys.size();
    Eigen::MatrixXd x(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) x(i, j) = xs[i * p + j];
    }
    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(n));
    return IidDataset(std::move(x), std::move(as), std::move(y));
}

IidDataset load_iid_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_iid_csv(in);
}

void write_iid_csv(std::ostream& out, const IidDataset& data) {
    out << "y,a";
    for (std::size_t j = 0; j < data.dim(); ++j) out << ",x" << (j + 1);
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        put_number(out, data.y()[i]);
        out << ',' << data.a()[i];
        for (std::size_t j = 0; j < data.dim(); ++j) {
            out << ',';
            put_number(out, data.x()(i, j));
        }
        out << '\n';
    }
}

void write_iid_csv(const std::filesystem::path& path, const IidDataset& data) {
    auto out = open_output(path);
    write_iid_csv(out, data);
}

PanelDataset read_panel_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    const auto header = split(line);
    expect_header(header, {"day", "t", "a", "y"}, 'x');
    const std::size_t d = header.size() - 4;

    struct Row {
        double y;
        int a;
        std::vector<double> x;
    };
    std::vector<std::vector<Row>> days;
    long current_day = 0;
    long last_t = 0;
    std::size_t horizon = 0;
    std::size_t line_no = 1;

    auto close_day = [&](std::size_t at_line) {
        if (days.empty()) return;
        const auto len = days.back().size();
        if (horizon == 0) {
            horizon = len;
        } else if (len != horizon) {
            throw SchemaError("day " + std::to_string(current_day) + " ending before line " +
                              std::to_string(at_line) + " has " + std::to_string(len) +
                              " steps, expected T=" + std::to_string(horizon));
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                                          std::to_string(cells.size()));
        }
        const long day = parse_integer(cells[0], line_no, "day");
        const long t = parse_integer(cells[1], line_no, "t");
        Row row;
        row.a = parse_binary(cells[2], line_no, "a");
        row.y = parse_number(cells[3], line_no, "y");
        row.x.reserve(d);
        for (std::size_t j = 0; j < d; ++j) row.x.push_back(parse_number(cells[4 + j], line_no, header[4 + j]));

        if (days.empty() || day != current_day) {
            if (!days.empty() && day < current_day) {
                throw SchemaError("line " + std::to_string(line_no) + ": rows not sorted by day");
            }
            close_day(line_no);
            if (t != 1) {
                throw SchemaError("line " + std::to_string(line_no) + ": day " + std::to_string(day) +
                                  " does not start at t=1 (missing step)");
            }
            days.emplace_back();
            current_day = day;
        } else if (t == last_t) {
            throw SchemaError("line " + std::to_string(line_no) + ": duplicate (day, t) = (" +
                              std::to_string(day) + ", " + std::to_string(t) + ")");
        } else if (t < last_t) {
            throw SchemaError("line " + std::to_string(line_no) + ": rows not sorted by t within day " +
                              std::to_string(day));
        } else if (t != last_t + 1) {
            throw SchemaError("line " + std::to_string(line_no) + ": day " + std::to_string(day) +
                              " is missing t=" + std::to_string(last_t + 1));
        }
        last_t = t;
        days.back().push_back(std::move(row));
    }
    close_day(line_no + 1);
    if (days.empty()) throw SchemaError("panel has no rows");

    std::vector<Trajectory> out;
    out.reserve(days.size());
    for (const auto& rows : days) {
        Trajectory tr;
        tr.x.resize(static_cast<Eigen::Index>(horizon), static_cast<Eigen::Index>(d));
        tr.y.resize(static_cast<Eigen::Index>(horizon));
        tr.a.resize(horizon);
        for (std::size_t t = 0; t < horizon; ++t) {
            tr.y[t] = rows[t].y;
            tr.a[t] = rows[t].a;
            for (std::size_t j = 0; j < d; ++j) tr.x(t, j) = rows[t].x[j];
        }
        out.push_back(std::move(tr));
    }
    return PanelDataset(std::move(out));
}

PanelDataset load_panel_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_panel_csv(in);
}

void write_panel_csv(std::ostream& out, const PanelDataset& panel) {
    out << "day,t,a,y";
    for (std::size_t j = 0; j < panel.dim(); ++j) out << ",x" << (j + 1);
    out << '\n';
    for (std::size_t i = 0; i < panel.size(); ++i) {
        const auto& day = panel.day(i);
        for (std::size_t t = 0; t < panel.horizon(); ++t) {
            out << (i + 1) << ',' << (t + 1) << ',' << day.a[t] << ',';
            put_number(out, day.y[t]);
            for (std::size_t j = 0; j < panel.dim(); ++j) {
                out << ',';
                put_number(out, day.x(t, j));
            }
            out << '\n';
        }
    }
}

void write_panel_csv(const std::filesystem::path& path, const PanelDataset& panel) {
    auto out = open_output(path);
    write_panel_csv(out, panel);
}

}  // namespace ptab
