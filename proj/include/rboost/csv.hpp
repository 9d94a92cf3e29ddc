#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rboost/boosters.hpp"
#include "rboost/dataset.hpp"
#include "rboost/harness.hpp"

namespace rboost {

/// Malformed data file. Row and column are 1-based; row 1 is the header and
/// column 0 means the whole row.
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, std::size_t row, std::size_t column)
        : std::runtime_error(what), row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Splits one RFC-4180 record. Quoted fields may contain commas and doubled
/// quotes but not line breaks.
std::vector<std::string> split_csv_record(const std::string& line);
std::string quote_csv_field(const std::string& field);

/// Header plus a rectangular numeric body.
struct NumericTable {
    std::vector<std::string> header;
    Matrix values;
};

NumericTable read_numeric_csv(std::istream& in);
NumericTable read_numeric_csv(const std::string& path);

/// Last column is the target. For classification, {0, 1} labels are
/// remapped to {-1, +1} with a note on `warnings`; other labels are errors.
Dataset table_to_dataset(const NumericTable& table, Task task, std::ostream& warnings);
Dataset read_dataset_csv(const std::string& path, Task task, std::ostream& warnings);

/// Header x1..xd,y and 17 significant digits per value.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::string& path, const Dataset& data);

/// k,beta,alpha,empirical_risk
void write_trace_csv(std::ostream& out, const TrainTrace& trace);

/// method,mean_metric,stderr,chosen_params,chosen_k,runs with per-run
/// parameters and k joined by ';'.
void write_report_csv(std::ostream& out, const ExperimentReport& report);
/// Inverse of write_report_csv for the columns the schema carries.
ExperimentReport read_report_csv(std::istream& in);

}  // namespace rboost
