#ifndef PCFIT_CSV_HPP
#define PCFIT_CSV_HPP

#include <map>
#include <string>
#include <vector>

namespace pcfit {

/// Columns of a headered CSV file, keyed by header name. Numeric cells only.
std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path);

/// Fetch a column or throw with a helpful message.
const std::vector<double>& csv_column(
    const std::map<std::string, std::vector<double>>& columns, const std::string& name,
    const std::string& path);

/// Deterministic float formatting used in every emitted CSV (%.12g).
std::string format_double(double v);

}  // namespace pcfit

#endif
