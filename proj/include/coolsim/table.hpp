#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coolsim {

/// Numeric delimited table with a header row. Lines starting with '#' are
/// metadata and skipped; blank lines are ignored. Header cells may carry a
/// unit tag in brackets, e.g. `dry_bulb[F]`.
struct DelimitedTable {
  struct Column {
    std::string name;
    std::string unit;  // empty when no tag was given
  };

  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
  std::vector<int> line_numbers;  // source line of each row, 1-based

  bool has(const std::string& name) const;
  std::size_t index(const std::string& name) const;  // throws MissingId
  std::vector<double> column(const std::string& name) const;
  const std::string& unit(const std::string& name) const;
};

DelimitedTable read_delimited(std::istream& in, char delimiter = ',');
DelimitedTable read_delimited_file(const std::string& path, char delimiter = ',');

void write_delimited(std::ostream& out, const DelimitedTable& table, char delimiter = ',');

}  // namespace coolsim
