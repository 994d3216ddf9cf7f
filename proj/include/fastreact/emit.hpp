#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fastreact {

struct Series {
  std::string name;
  std::vector<double> values;
};

/// %.17g, so that values re-parse to the same double.
std::string format_double(double x);

/// Header line of names, then one row per index. Throws ShapeError on ragged columns.
void emit_csv(const std::vector<Series>& columns, std::ostream& out);

/// Rows of preformatted cells below a header; every row must match the header width.
void emit_csv_rows(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, std::ostream& out);

struct ChartSpec {
  std::string title;
  bool log_x = false;
  bool log_y = false;
};

/// Line chart of columns[1..] against columns[0]; standalone SVG. Non-positive
/// values are dropped on log axes.
void emit_svg(const std::vector<Series>& columns, const ChartSpec& spec, std::ostream& out);

}  // namespace fastreact
