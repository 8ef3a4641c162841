#include "lsirm/plot.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <ostream>

#include "lsirm/csv.hpp"
#include "lsirm/error.hpp"

namespace lsirm {

namespace {

constexpr std::array<const char*, 10> kPalette{
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
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

void check(const AlignedCoordinates& c, const std::vector<std::string>& groups,
           const ScatterOptions& o) {
  require(groups.size() == c.node_id.size(), "plot: one group per node required");
  require(o.dim_x < c.coords.n_cols && o.dim_y < c.coords.n_cols,
          "plot: dimension out of range");
}

}  // namespace

void write_scatter_svg(std::ostream& out, const AlignedCoordinates& c,
                       const std::vector<std::string>& groups, const ScatterOptions& o) {
  check(c, groups, o);
  const double margin = 40;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool first = true;
  for (std::size_t r = 0; r < c.node_id.size(); ++r) {
    if (c.node_type[r] == "bill" && !o.show_bills) continue;
    const double x = c.coords(r, o.dim_x), y = c.coords(r, o.dim_y);
    if (first) {
      x0 = x1 = x;
      y0 = y1 = y;
      first = false;
    }
    x0 = std::min(x0, x); x1 = std::max(x1, x);
    y0 = std::min(y0, y); y1 = std::max(y1, y);
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  const double scale = (std::min(o.width, o.height) - 2 * margin) / span;
  auto px = [&](double x) { return margin + (x - x0) * scale; };
  auto py = [&](double y) { return o.height - margin - (y - y0) * scale; };

  std::map<std::string, std::size_t> colour;
  for (std::size_t r = 0; r < groups.size(); ++r)
    if (c.node_type[r] == "legislator" && !colour.count(groups[r]))
      colour.emplace(groups[r], colour.size());
  // Map order is lexicographic, which keeps colours stable across runs.
  std::size_t next = 0;
  for (auto& [g, idx] : colour) idx = next++;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(o.width)
      << "\" height=\"" << num(o.height) << "\" viewBox=\"0 0 " << num(o.width) << ' '
      << num(o.height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!o.title.empty())
    out << "<text x=\"" << num(o.width / 2) << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << xml_escape(o.title)
        << "</text>\n";
  if (o.show_bills) {
    for (std::size_t r = 0; r < c.node_id.size(); ++r) {
      if (c.node_type[r] != "bill") continue;
      const double x = px(c.coords(r, o.dim_x)), y = py(c.coords(r, o.dim_y));
      out << "<path d=\"M" << num(x - 2) << ' ' << num(y - 2) << "L" << num(x + 2) << ' '
          << num(y + 2) << "M" << num(x - 2) << ' ' << num(y + 2) << "L" << num(x + 2)
          << ' ' << num(y - 2) << "\" stroke=\"#999999\" stroke-width=\"0.8\"/>\n";
    }
  }
  for (std::size_t r = 0; r < c.node_id.size(); ++r) {
    if (c.node_type[r] != "legislator") continue;
    const char* fill = kPalette[colour.at(groups[r]) % kPalette.size()];
    out << "<circle cx=\"" << num(px(c.coords(r, o.dim_x))) << "\" cy=\""
        << num(py(c.coords(r, o.dim_y))) << "\" r=\"3.5\" fill=\"" << fill
        << "\" fill-opacity=\"0.8\"><title>" << xml_escape(c.node_id[r]) << ' '
        << xml_escape(groups[r]) << "</title></circle>\n";
  }
  double ly = 40;
  for (const auto& [g, idx] : colour) {
    out << "<circle cx=\"" << num(o.width - 90) << "\" cy=\"" << num(ly)
        << "\" r=\"4\" fill=\"" << kPalette[idx % kPalette.size()] << "\"/>"
        << "<text x=\"" << num(o.width - 80) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(g)
        << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
}

void write_plot_csv(std::ostream& out, const AlignedCoordinates& c,
                    const std::vector<std::string>& groups, const ScatterOptions& o) {
  check(c, groups, o);
  out << "node_id,node_type,group,x,y\n";
  for (std::size_t r = 0; r < c.node_id.size(); ++r)
    out << csv_escape(c.node_id[r]) << ',' << c.node_type[r] << ','
        << csv_escape(groups[r]) << ',' << format_double(c.coords(r, o.dim_x)) << ','
        << format_double(c.coords(r, o.dim_y)) << '\n';
}

}  // namespace lsirm
