#include "fastreact/emit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "fastreact/errors.hpp"

namespace fastreact {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

void emit_csv_rows(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, std::ostream& out) {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) {
      throw ShapeError("csv row has " + std::to_string(r.size()) + " cells, header has " +
                       std::to_string(header.size()));
    }
    line(r);
  }
}

void emit_csv(const std::vector<Series>& columns, std::ostream& out) {
  const std::size_t n = columns.empty() ? 0 : columns.front().values.size();
  std::vector<std::string> header;
  for (const auto& c : columns) {
    if (c.values.size() != n) throw ShapeError("ragged columns: '" + c.name + "'");
    header.push_back(c.name);
  }
  std::vector<std::vector<std::string>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& c : columns) rows[i].push_back(format_double(c.values[i]));
  }
  emit_csv_rows(header, rows, out);
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string short_number(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.3g", x);
  return buf.data();
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double x) const {
    const double a = log ? std::log10(x) : x;
    return (a - lo) / (hi - lo);
  }
  bool usable(double x) const { return std::isfinite(x) && (!log || x > 0); }
};

Axis fit_axis(const std::vector<const std::vector<double>*>& data, bool log) {
  Axis ax;
  ax.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* v : data) {
    for (double x : *v) {
      if (!ax.usable(x)) continue;
      const double a = log ? std::log10(x) : x;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  ax.lo = lo;
  ax.hi = hi;
  return ax;
}

}  // namespace

void emit_svg(const std::vector<Series>& columns, const ChartSpec& spec, std::ostream& out) {
  if (columns.empty()) throw ShapeError("svg chart needs at least an x column");
  const std::size_t n = columns.front().values.size();
  for (const auto& c : columns) {
    if (c.values.size() != n) throw ShapeError("ragged columns: '" + c.name + "'");
  }
  constexpr double W = 640, H = 420, left = 70, right = 160, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  const Axis ax = fit_axis({&columns.front().values}, spec.log_x);
  std::vector<const std::vector<double>*> ys;
  for (std::size_t i = 1; i < columns.size(); ++i) ys.push_back(&columns[i].values);
  const Axis ay = fit_axis(ys, spec.log_y);
  static constexpr std::array<const char*, 6> colors = {"#1f77b4", "#d62728", "#2ca02c",
                                                        "#9467bd", "#ff7f0e", "#17becf"};

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << escape_xml(spec.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double xv = ax.lo + f * (ax.hi - ax.lo);
    const double yv = ay.lo + f * (ay.hi - ay.lo);
    const double px = left + f * pw, py = top + ph - f * ph;
    out << "<line x1=\"" << px << "\" y1=\"" << top + ph << "\" x2=\"" << px << "\" y2=\""
        << top + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << short_number(spec.log_x ? std::pow(10.0, xv) : xv) << "</text>\n";
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << py << "\" x2=\"" << left << "\" y2=\"" << py
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << py + 3
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << short_number(spec.log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape_xml(columns.front().name) << (spec.log_x ? " (log)" : "") << "</text>\n";
  out << "<text x=\"18\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 18 " << top + ph / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << (spec.log_y ? "value (log)" : "value") << "</text>\n";

  for (std::size_t s = 1; s < columns.size(); ++s) {
    const char* color = colors[(s - 1) % colors.size()];
    std::string points;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = columns.front().values[i];
      const double y = columns[s].values[i];
      if (!ax.usable(x) || !ay.usable(y)) continue;
      const double px = left + ax.map(x) * pw;
      const double py = top + ph - ay.map(y) * ph;
      points += short_number(px) + "," + short_number(py) + " ";
      out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    if (!points.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
          << points << "\"/>\n";
    }
    const double ly = top + 14.0 * static_cast<double>(s);
    out << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(columns[s].name)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace fastreact
