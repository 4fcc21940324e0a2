#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dpdsel {

/// Numeric table with a header row.
struct Table {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;

  /// Index of `name`; throws ValidationError listing the available columns.
  Eigen::Index column(const std::string& name) const;
};

/// Parse a comma-separated table. Header names may be double-quoted. Cells
/// must be finite numbers; failures report the 1-based line and column name.
Table read_csv(std::istream& in, const std::string& source = "<stream>");
/// Throws IoError when the file cannot be opened.
Table read_csv(const std::filesystem::path& path);

}  // namespace dpdsel
