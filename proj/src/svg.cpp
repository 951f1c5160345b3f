#include "bellcool/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bellcool {

namespace {

constexpr int kWidth = 760;
constexpr int kHeight = 520;
constexpr int kMarginL = 80, kMarginR = 30, kMarginT = 50, kMarginB = 60;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void axes(std::ostringstream& os, const std::string& title, const std::string& xlabel,
          const std::string& ylabel, double x_min, double x_max, double y_min,
          double y_max) {
  const int x0 = kMarginL, x1 = kWidth - kMarginR;
  const int y0 = kHeight - kMarginB, y1 = kMarginT;
  os << "<rect x='" << x0 << "' y='" << y1 << "' width='" << (x1 - x0) << "' height='"
     << (y0 - y1) << "' fill='none' stroke='black'/>\n";
  os << "<text x='" << kWidth / 2 << "' y='25' text-anchor='middle' font-size='16'>"
     << title << "</text>\n";
  os << "<text x='" << kWidth / 2 << "' y='" << kHeight - 15
     << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
  os << "<text x='20' y='" << kHeight / 2
     << "' text-anchor='middle' font-size='13' transform='rotate(-90 20 " << kHeight / 2
     << ")'>" << ylabel << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    const int px = x0 + (x1 - x0) * i / 5;
    const int py = y0 - (y0 - y1) * i / 5;
    os << "<text x='" << px << "' y='" << y0 + 18
       << "' text-anchor='middle' font-size='11'>" << fmt(fx) << "</text>\n";
    os << "<text x='" << x0 - 8 << "' y='" << py + 4
       << "' text-anchor='end' font-size='11'>" << fmt(fy) << "</text>\n";
    os << "<line x1='" << px << "' y1='" << y0 << "' x2='" << px << "' y2='" << y0 + 4
       << "' stroke='black'/>\n";
    os << "<line x1='" << x0 - 4 << "' y1='" << py << "' x2='" << x0 << "' y2='" << py
       << "' stroke='black'/>\n";
  }
}

void save(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='"
    << kHeight << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
    << body << "</svg>\n";
}

}  // namespace

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<LineSeries>& series) {
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (x_min >= x_max) x_max = x_min + 1.0;
  if (y_min >= y_max) y_max = y_min + 1.0;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const int x0 = kMarginL, x1 = kWidth - kMarginR;
  const int y0 = kHeight - kMarginB, y1 = kMarginT;
  auto px = [&](double x) { return x0 + (x - x_min) / (x_max - x_min) * (x1 - x0); };
  auto py = [&](double y) { return y0 - (y - y_min) / (y_max - y_min) * (y0 - y1); };

  std::ostringstream os;
  axes(os, title, xlabel, ylabel, x_min, x_max, y_min, y_max);
  int legend_y = kMarginT + 16;
  for (const auto& s : series) {
    os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < s.x.size(); ++i) os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    os << "'/>\n";
    if (!s.label.empty()) {
      os << "<line x1='" << x1 - 130 << "' y1='" << legend_y << "' x2='" << x1 - 105
         << "' y2='" << legend_y << "' stroke='" << s.color << "' stroke-width='2'/>\n";
      os << "<text x='" << x1 - 100 << "' y='" << legend_y + 4 << "' font-size='12'>"
         << s.label << "</text>\n";
      legend_y += 18;
    }
  }
  save(path, os.str());
}

void write_heatmap(const std::string& path, const std::string& title,
                   const std::string& xlabel, const std::string& ylabel, double x_min,
                   double x_max, double y_min, double y_max,
                   const std::vector<std::vector<double>>& values, double v_abs_max) {
  if (values.empty() || values[0].empty())
    throw std::invalid_argument("write_heatmap: empty value grid");
  const int rows = static_cast<int>(values.size());
  const int cols = static_cast<int>(values[0].size());
  if (v_abs_max <= 0.0) {
    for (const auto& row : values)
      for (double v : row) v_abs_max = std::max(v_abs_max, std::abs(v));
    if (v_abs_max <= 0.0) v_abs_max = 1.0;
  }

  // blue (negative) - white - red (positive)
  auto color = [&](double v) {
    const double u = std::clamp(v / v_abs_max, -1.0, 1.0);
    int r = 255, g = 255, b = 255;
    if (u >= 0) {
      g = b = static_cast<int>(std::lround(255 * (1.0 - u)));
    } else {
      r = g = static_cast<int>(std::lround(255 * (1.0 + u)));
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  const int x0 = kMarginL, x1 = kWidth - kMarginR;
  const int y0 = kHeight - kMarginB, y1 = kMarginT;
  const double cw = static_cast<double>(x1 - x0) / cols;
  const double chh = static_cast<double>(y0 - y1) / rows;

  std::ostringstream os;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double x = x0 + c * cw;
      const double y = y0 - (r + 1) * chh;
      os << "<rect x='" << x << "' y='" << y << "' width='" << cw + 0.5 << "' height='"
         << chh + 0.5 << "' fill='" << color(values[r][c]) << "'/>\n";
    }
  axes(os, title, xlabel, ylabel, x_min, x_max, y_min, y_max);
  save(path, os.str());
}

}  // namespace bellcool
