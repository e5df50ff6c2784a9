#include "biot/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace biot {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CsvTable::Row& CsvTable::Row::operator<<(double v) {
  cells_.push_back(format_number(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(int v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(bool v) {
  cells_.push_back(v ? "1" : "0");
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(const std::string& v) {
  if (v.find(',') != std::string::npos || v.find('\n') != std::string::npos)
    throw std::invalid_argument("CSV cells may not contain commas or newlines");
  cells_.push_back(v);
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(const char* v) { return *this << std::string(v); }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(const Row& row) {
  if (row.cells().size() != header_.size())
    throw std::invalid_argument("row has " + std::to_string(row.cells().size()) +
                                " cells, header has " + std::to_string(header_.size()));
  rows_.push_back(row.cells());
}

int CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw std::out_of_range("no column named " + name);
  return static_cast<int>(it - header_.begin());
}

std::vector<std::string> CsvTable::column(const std::string& name) const {
  const int c = column_index(name);
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[c]);
  return out;
}

namespace {

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  std::vector<double> out;
  for (const auto& s : column(name)) out.push_back(parse_number(s));
  return out;
}

void CsvTable::sort_by(const std::vector<std::string>& columns) {
  std::vector<int> idx;
  for (const auto& c : columns) idx.push_back(column_index(c));
  auto key = [](const std::string& s) {
    try {
      return std::make_pair(0, parse_number(s));
    } catch (const std::invalid_argument&) {
      return std::make_pair(1, 0.0);
    }
  };
  std::stable_sort(rows_.begin(), rows_.end(), [&](const auto& a, const auto& b) {
    for (int c : idx) {
      const auto ka = key(a[c]), kb = key(b[c]);
      if (ka != kb) return ka < kb;
      if (ka.first == 1 && a[c] != b[c]) return a[c] < b[c];
    }
    return false;
  });
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::write_file(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write(f);
}

void CsvTable::write_gnuplot(std::ostream& out, const std::vector<std::string>& columns) const {
  std::vector<int> idx;
  for (const auto& c : columns) idx.push_back(column_index(c));
  out << '#';
  for (const auto& c : columns) out << ' ' << c;
  out << '\n';
  for (const auto& r : rows_) {
    for (size_t i = 0; i < idx.size(); ++i) out << (i ? " " : "") << r[idx[i]];
    out << '\n';
  }
}

void CsvTable::write_gnuplot_file(const std::string& path,
                                  const std::vector<std::string>& columns) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_gnuplot(f, columns);
}

CsvTable read_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
  CsvTable table(split(line));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CsvTable::Row row;
    for (const auto& c : split(line)) row << c;
    table.add(row);
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_csv(f);
}

}  // namespace biot
