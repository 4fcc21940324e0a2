#include "dpdsel/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dpdsel/error.hpp"

namespace dpdsel {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

}  // namespace

Eigen::Index Table::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return static_cast<Eigen::Index>(j);
  std::string avail;
  for (const auto& c : columns) avail += (avail.empty() ? "" : ", ") + c;
  throw ValidationError("column '" + name + "' not found (available: " + avail + ")");
}

Table read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  Table t;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (line_no == 0 || trim(line).empty()) throw ValidationError(source + ": empty CSV");
  t.columns = split_line(line);
  for (std::size_t j = 0; j < t.columns.size(); ++j)
    if (t.columns[j].empty())
      throw ValidationError(source + ": line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                            ": empty header name");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != t.columns.size())
      throw ValidationError(source + ": line " + std::to_string(line_no) + ": expected " +
                            std::to_string(t.columns.size()) + " cells, found " + std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string& cell = cells[j];
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw ValidationError(source + ": line " + std::to_string(line_no) + ", column '" + t.columns[j] +
                              "': non-numeric cell '" + cell + "'");
      row[j] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(source + ": no data rows");

  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return t;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_csv(in, path.string());
}

}  // namespace dpdsel
