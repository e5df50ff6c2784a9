/** @file io.hpp
 *  @brief CSV tables with six significant digits and gnuplot data files.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biot {

/// Six significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

class CsvTable {
 public:
  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(int v);
    Row& operator<<(long v);
    Row& operator<<(bool v);
    Row& operator<<(const std::string& v);
    Row& operator<<(const char* v);
    const std::vector<std::string>& cells() const { return cells_; }

   private:
    std::vector<std::string> cells_;
  };

  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header);

  /// Throws std::invalid_argument if the row width differs from the header.
  void add(const Row& row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  /// Throws std::out_of_range for an unknown column.
  int column_index(const std::string& name) const;
  std::vector<std::string> column(const std::string& name) const;
  /// Column parsed as numbers; throws std::invalid_argument on a non-numeric cell.
  std::vector<double> numeric_column(const std::string& name) const;
  /// Rows sorted lexicographically by the given columns, compared numerically.
  void sort_by(const std::vector<std::string>& columns);

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;
  /// Space-separated columns with a "# " header line.
  void write_gnuplot(std::ostream& out, const std::vector<std::string>& columns) const;
  void write_gnuplot_file(const std::string& path, const std::vector<std::string>& columns) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parses a comma-separated table without quoting; the first line is the header.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace biot
