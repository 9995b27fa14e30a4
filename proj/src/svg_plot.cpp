#include "btq/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace btq {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_loglog_svg(const std::vector<PlotSeries>& series, const std::string& title,
                              const std::string& x_label, const std::string& y_label) {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      x0 = std::min(x0, std::log10(x));
      x1 = std::max(x1, std::log10(x));
      y0 = std::min(y0, std::log10(y));
      y1 = std::max(y1, std::log10(y));
    }
  }
  if (!(x0 <= x1)) {
    x0 = -1.0;
    x1 = 0.0;
    y0 = -1.0;
    y1 = 0.0;
  }
  x0 = std::floor(x0);
  x1 = std::max(std::ceil(x1), x0 + 1.0);
  y0 = std::floor(y0);
  y1 = std::max(std::ceil(y1), y0 + 1.0);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto sx = [&](double lx) { return kLeft + (lx - x0) / (x1 - x0) * pw; };
  const auto sy = [&](double ly) { return kTop + (y1 - ly) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\">"
      << escape(title) << "</text>\n";

  for (double d = x0; d <= x1 + 1e-9; d += 1.0) {
    svg << "<line x1=\"" << num(sx(d)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(sx(d))
        << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(sx(d)) << "\" y=\"" << num(kTop + ph + 16)
        << "\" text-anchor=\"middle\">1e" << static_cast<int>(d) << "</text>\n";
  }
  for (double d = y0; d <= y1 + 1e-9; d += 1.0) {
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(sy(d)) << "\" x2=\""
        << num(kLeft + pw) << "\" y2=\"" << num(sy(d)) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(d) + 4)
        << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
  }
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % kColors.size()];
    std::string path;
    for (auto [x, y] : series[s].points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      path += num(sx(std::log10(x))) + "," + num(sy(std::log10(y))) + " ";
    }
    if (!path.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
          << path << "\"/>\n";
    }
    for (auto [x, y] : series[s].points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      svg << "<circle cx=\"" << num(sx(std::log10(x))) << "\" cy=\"" << num(sy(std::log10(y)))
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(s);
    svg << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kLeft + pw + 32) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly + 4) << "\">"
        << escape(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace btq
