#include "rboost/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "rboost/error.hpp"

namespace rboost {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string> join_split(const std::string& field) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = field.find(';', start);
        out.push_back(field.substr(start, end == std::string::npos ? std::string::npos : end - start));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

}  // namespace

std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"' && cur.empty() && !was_quoted) {
            quoted = true;
            was_quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur += ch;
        }
    }
    if (quoted) throw std::invalid_argument("unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

std::string quote_csv_field(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

NumericTable read_numeric_csv(std::istream& in) {
    NumericTable table;
    std::string line;
    if (!next_line(in, line)) throw CsvError("data: empty file (expected a header line)", 1, 0);
    try {
        table.header = split_csv_record(line);
    } catch (const std::invalid_argument& e) {
        throw CsvError(std::string("data row 1: ") + e.what(), 1, 0);
    }
    const std::size_t cols = table.header.size();
    std::vector<double> values;
    std::size_t row = 1;
    std::size_t rows = 0;
    while (next_line(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        try {
            fields = split_csv_record(line);
        } catch (const std::invalid_argument& e) {
            throw CsvError("data row " + std::to_string(row) + ": " + e.what(), row, 0);
        }
        if (fields.size() != cols) {
            throw CsvError("data row " + std::to_string(row) + ": expected " + std::to_string(cols) +
                               " columns, found " + std::to_string(fields.size()),
                           row, 0);
        }
        for (std::size_t c = 0; c < cols; ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], v) || !std::isfinite(v)) {
                throw CsvError("data row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                                   ": not a finite number: '" + fields[c] + "'",
                               row, c + 1);
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw CsvError("data: no rows after the header", 1, 0);
    table.values = Matrix(rows, cols, std::move(values));
    return table;
}

NumericTable read_numeric_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("data: cannot open '" + path + "'", 0, 0);
    return read_numeric_csv(in);
}

Dataset table_to_dataset(const NumericTable& table, Task task, std::ostream& warnings) {
    const Matrix& v = table.values;
    if (v.cols() < 2) throw CsvError("data: need at least one feature column and a target column", 1, 0);
    const std::size_t d = v.cols() - 1;
    Matrix x(v.rows(), d);
    std::vector<double> y(v.rows());
    for (std::size_t i = 0; i < v.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) x(i, j) = v(i, j);
        y[i] = v(i, d);
    }
    if (task == Task::binary_classification) {
        bool zero_one = true;
        bool plus_minus = true;
        for (std::size_t i = 0; i < y.size(); ++i) {
            zero_one = zero_one && (y[i] == 0.0 || y[i] == 1.0);
            plus_minus = plus_minus && (y[i] == -1.0 || y[i] == 1.0);
        }
        if (!plus_minus && zero_one) {
            warnings << "warning: remapping {0,1} labels to {-1,+1}\n";
            for (double& label : y) label = label == 0.0 ? -1.0 : 1.0;
        } else if (!plus_minus) {
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (y[i] != -1.0 && y[i] != 1.0) {
                    throw CsvError("data row " + std::to_string(i + 2) + ", column " + std::to_string(d + 1) +
                                       ": label " + fmt(y[i]) + " is not in {-1, +1}",
                                   i + 2, d + 1);
                }
            }
        }
    }
    return Dataset(std::move(x), std::move(y), task);
}

Dataset read_dataset_csv(const std::string& path, Task task, std::ostream& warnings) {
    return table_to_dataset(read_numeric_csv(path), task, warnings);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
    out << "y\n";
    const Matrix& x = data.features();
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : x.row(i)) out << fmt(v) << ',';
        out << fmt(data.targets()[i]) << '\n';
    }
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_dataset_csv(out, data);
}

void write_trace_csv(std::ostream& out, const TrainTrace& trace) {
    out << "k,beta,alpha,empirical_risk\n";
    for (const auto& r : trace.records) {
        out << r.k << ',' << fmt(r.beta) << ',' << fmt(r.alpha) << ',' << fmt(r.empirical_risk) << '\n';
    }
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
    out << "method,mean_metric,stderr,chosen_params,chosen_k,runs\n";
    for (const auto& row : report.methods) {
        std::string params;
        std::string ks;
        for (std::size_t i = 0; i < row.params.size(); ++i) {
            if (i > 0) params += ';';
            params += row.params[i];
        }
        for (std::size_t i = 0; i < row.ks.size(); ++i) {
            if (i > 0) ks += ';';
            ks += std::to_string(row.ks[i]);
        }
        out << quote_csv_field(std::string(method_name(row.method))) << ',' << fmt(row.mean) << ','
            << fmt(row.std_error) << ',' << quote_csv_field(params) << ',' << quote_csv_field(ks) << ',' << row.runs
            << '\n';
    }
}

ExperimentReport read_report_csv(std::istream& in) {
    std::string line;
    if (!next_line(in, line) || line != "method,mean_metric,stderr,chosen_params,chosen_k,runs") {
        throw CsvError("report: missing or unexpected header", 1, 0);
    }
    ExperimentReport report;
    std::size_t row_no = 1;
    while (next_line(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const auto f = split_csv_record(line);
        if (f.size() != 6) throw CsvError("report row " + std::to_string(row_no) + ": expected 6 fields", row_no, 0);
        MethodReport row;
        try {
            row.method = parse_method(f[0]);
        } catch (const InvalidInput& e) {
            throw CsvError("report row " + std::to_string(row_no) + ": " + e.what(), row_no, 1);
        }
        if (!parse_double(f[1], row.mean)) throw CsvError("report: bad mean", row_no, 2);
        if (!parse_double(f[2], row.std_error)) throw CsvError("report: bad stderr", row_no, 3);
        if (!f[3].empty()) row.params = join_split(f[3]);
        if (!f[4].empty()) {
            for (const auto& k : join_split(f[4])) {
                int v = 0;
                const auto [p, ec] = std::from_chars(k.data(), k.data() + k.size(), v);
                if (ec != std::errc() || p != k.data() + k.size()) throw CsvError("report: bad k", row_no, 5);
                row.ks.push_back(v);
            }
        }
        const auto [p, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), row.runs);
        if (ec != std::errc() || p != f[5].data() + f[5].size()) throw CsvError("report: bad runs", row_no, 6);
        report.methods.push_back(std::move(row));
    }
    return report;
}

}  // namespace rboost
