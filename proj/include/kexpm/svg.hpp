#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace kexpm {

enum class SeriesStyle { solid, dashed, dotted, plus, cross };

/// One chart series on a shared integer x-grid; values outside (0, inf) or
/// flagged overflow are omitted from the drawing.
struct ChartSeries {
  std::string name;
  SeriesStyle style = SeriesStyle::solid;
  std::vector<std::pair<double, double>> points;  // (k, value)
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

inline const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f4e9c", "#c23b22", "#2a7e43",
                                  "#8a5fbf", "#b8860b", "#3a3a3a"};
  return palette[i % 6];
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace detail

/// Self-contained SVG line chart with a log10 y-axis clamped to
/// [1e-16, 1e16]; marker styles draw +/x glyphs at the sample points.
inline void write_svg_chart(std::ostream& out, const std::string& title,
                            const std::vector<ChartSeries>& series) {
  constexpr double W = 720, H = 480;
  constexpr double L = 64, R = 168, T = 40, B = 48;  // margins
  const double plot_w = W - L - R, plot_h = H - T - B;
  constexpr double y_clamp_lo = 1e-16, y_clamp_hi = 1e16;

  double xmin = 0, xmax = 1, ymin_log = 0, ymax_log = 1;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(y) || y <= 0.0) continue;
      const double ly = std::log10(std::clamp(y, y_clamp_lo, y_clamp_hi));
      if (!any) {
        xmin = xmax = x;
        ymin_log = ymax_log = ly;
        any = true;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin_log = std::min(ymin_log, ly);
        ymax_log = std::max(ymax_log, ly);
      }
    }
  }
  if (!any) {
    xmin = 0;
    xmax = 1;
    ymin_log = -1;
    ymax_log = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  ymin_log = std::floor(ymin_log);
  ymax_log = std::ceil(ymax_log);
  if (ymax_log == ymin_log) ymax_log += 1;

  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double ylog) {
    return T + plot_h - (ylog - ymin_log) / (ymax_log - ymin_log) * plot_h;
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
      << detail::xml_escape(title) << "</text>\n";

  // frame and y decade grid
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const int decades = static_cast<int>(ymax_log - ymin_log);
  const int stride = std::max(1, decades / 8);
  for (int d = 0; d <= decades; d += stride) {
    const double ylog = ymin_log + d;
    const double y = py(ylog);
    out << "<line x1=\"" << L << "\" y1=\"" << y << "\" x2=\"" << L + plot_w << "\" y2=\""
        << y << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e"
        << static_cast<int>(ylog) << "</text>\n";
  }
  for (double x = xmin; x <= xmax + 0.5; x += std::max(1.0, std::round((xmax - xmin) / 8))) {
    out << "<text x=\"" << px(x) << "\" y=\"" << T + plot_h + 16
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << detail::fmt(x) << "</text>\n";
  }
  out << "<text x=\"" << L + plot_w / 2 << "\" y=\"" << H - 12
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">iteration k"
      << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = detail::series_color(si);
    const bool markers = s.style == SeriesStyle::plus || s.style == SeriesStyle::cross;
    std::string dash;
    if (s.style == SeriesStyle::dashed) dash = " stroke-dasharray=\"7 4\"";
    if (s.style == SeriesStyle::dotted) dash = " stroke-dasharray=\"2 4\"";

    // polyline segments, broken at omitted points
    std::vector<std::pair<double, double>> seg;
    auto flush = [&] {
      if (seg.size() >= 2) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\"" << dash << " points=\"";
        for (const auto& [x, y] : seg) out << detail::fmt(x) << ',' << detail::fmt(y) << ' ';
        out << "\"/>\n";
      }
      seg.clear();
    };
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(y) || y <= 0.0) {
        flush();
        continue;
      }
      const double ly = std::log10(std::clamp(y, y_clamp_lo, y_clamp_hi));
      seg.emplace_back(px(x), py(ly));
    }
    flush();

    if (markers) {
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(y) || y <= 0.0) continue;
        const double cx = px(x);
        const double cy = py(std::log10(std::clamp(y, y_clamp_lo, y_clamp_hi)));
        constexpr double r = 3.2;
        if (s.style == SeriesStyle::plus) {
          out << "<path stroke=\"" << color << "\" d=\"M" << detail::fmt(cx - r) << ' '
              << detail::fmt(cy) << "H" << detail::fmt(cx + r) << "M" << detail::fmt(cx)
              << ' ' << detail::fmt(cy - r) << "V" << detail::fmt(cy + r) << "\"/>\n";
        } else {
          out << "<path stroke=\"" << color << "\" d=\"M" << detail::fmt(cx - r) << ' '
              << detail::fmt(cy - r) << "L" << detail::fmt(cx + r) << ' '
              << detail::fmt(cy + r) << "M" << detail::fmt(cx - r) << ' '
              << detail::fmt(cy + r) << "L" << detail::fmt(cx + r) << ' '
              << detail::fmt(cy - r) << "\"/>\n";
        }
      }
    }

    // legend
    const double ly = T + 14 + 18 * static_cast<double>(si);
    const double lx = L + plot_w + 10;
    out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 26 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\"" << dash << "/>\n";
    out << "<text x=\"" << lx + 32 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace kexpm
