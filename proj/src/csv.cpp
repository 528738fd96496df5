#include "pcfit/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcfit {

std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<std::string> headers;
  std::map<std::string, std::vector<double>> out;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream ss(line);
    std::string cell;
    if (first) {
      while (std::getline(ss, cell, ',')) headers.push_back(cell);
      if (headers.empty()) throw std::runtime_error(path + ": missing header row");
      for (const auto& h : headers) out[h];
      first = false;
      continue;
    }
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= headers.size())
        throw std::runtime_error(path + ": too many cells on line " +
                                 std::to_string(lineno));
      try {
        out[headers[col]].push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": non-numeric cell '" + cell + "' on line " +
                                 std::to_string(lineno));
      }
      ++col;
    }
    if (col != headers.size())
      throw std::runtime_error(path + ": short row on line " + std::to_string(lineno));
  }
  if (first) throw std::runtime_error(path + ": empty file");
  return out;
}

const std::vector<double>& csv_column(
    const std::map<std::string, std::vector<double>>& columns, const std::string& name,
    const std::string& path) {
  auto it = columns.find(name);
  if (it == columns.end())
    throw std::runtime_error(path + ": missing required column '" + name + "'");
  return it->second;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace pcfit
