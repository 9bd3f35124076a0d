#include "coolsim/table.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "coolsim/errors.hpp"

namespace coolsim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delimiter)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

DelimitedTable::Column parse_header_cell(const std::string& cell) {
  DelimitedTable::Column col;
  const auto open = cell.find('[');
  if (open != std::string::npos && cell.back() == ']') {
    col.name = trim(cell.substr(0, open));
    col.unit = trim(cell.substr(open + 1, cell.size() - open - 2));
  } else {
    col.name = cell;
  }
  return col;
}

}  // namespace

bool DelimitedTable::has(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return true;
  return false;
}

std::size_t DelimitedTable::index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  fail(Errc::MissingId, "table has no column '" + name + "'");
}

std::vector<double> DelimitedTable::column(const std::string& name) const {
  const auto i = index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[i]);
  return out;
}

const std::string& DelimitedTable::unit(const std::string& name) const {
  return columns[index(name)].unit;
}

DelimitedTable read_delimited(std::istream& in, char delimiter) {
  DelimitedTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t, delimiter);
    if (!have_header) {
      for (const auto& c : cells) table.columns.push_back(parse_header_cell(c));
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      fail(Errc::Parse, "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(table.columns.size()) + " cells, got " +
                            std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        fail(Errc::Parse,
             "line " + std::to_string(line_no) + ": cannot parse '" + c + "' as a number");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) fail(Errc::Parse, "missing header row");
  return table;
}

DelimitedTable read_delimited_file(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) fail(Errc::Parse, "cannot open '" + path + "'");
  return read_delimited(in, delimiter);
}

void write_delimited(std::ostream& out, const DelimitedTable& table, char delimiter) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << delimiter;
    out << table.columns[i].name;
    if (!table.columns[i].unit.empty()) out << '[' << table.columns[i].unit << ']';
  }
  out << '\n';
  out << std::setprecision(17);
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << delimiter;
      out << r[i];
    }
    out << '\n';
  }
}

}  // namespace coolsim
