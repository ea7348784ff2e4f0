#include "svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace eveopt::cli {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr int kMarginLeft = 80;
constexpr int kMarginRight = 190;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 60;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// 1, 2 or 5 times a power of ten, close to span / 5.
double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string render_line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
  if (series.empty()) throw std::invalid_argument("chart: no series");

  double x_min = HUGE_VAL, x_max = -HUGE_VAL, y_min = HUGE_VAL, y_max = -HUGE_VAL;
  double min_positive = HUGE_VAL;
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) throw std::invalid_argument("chart: empty or ragged series");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
      if (s.y[i] > 0.0) min_positive = std::min(min_positive, s.y[i]);
    }
  }
  if (!std::isfinite(x_min) || !std::isfinite(y_min)) throw std::invalid_argument("chart: no finite points");

  // Values <= 0 cannot be drawn on a log axis; pin them to the floor.
  auto ty = [&](double y) {
    if (!opt.log_y) return y;
    return std::log10(y > 0.0 ? y : min_positive);
  };
  double lo, hi;
  if (opt.log_y) {
    if (!std::isfinite(min_positive)) throw std::invalid_argument("chart: log scale needs a positive value");
    lo = std::floor(std::log10(min_positive));
    hi = std::ceil(std::log10(std::max(y_max, min_positive)));
    if (hi <= lo) hi = lo + 1.0;
  } else {
    lo = y_min;
    hi = y_max;
    if (hi <= lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;

  const double plot_w = opt.width - kMarginLeft - kMarginRight;
  const double plot_h = opt.height - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kMarginTop + (hi - ty(y)) / (hi - lo) * plot_h; };
  auto py_raw = [&](double v) { return kMarginTop + (hi - v) / (hi - lo) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    svg << "<text x=\"" << fixed(kMarginLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(opt.title) << "</text>\n";
  }

  // axes
  svg << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
      << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << fixed(plot_w)
      << "\" height=\"" << fixed(plot_h) << "\"/>\n</g>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  const double x_step = nice_step(x_max - x_min);
  for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9 * x_step; x += x_step) {
    svg << "<line x1=\"" << fixed(px(x)) << "\" y1=\"" << fixed(kMarginTop + plot_h) << "\" x2=\"" << fixed(px(x))
        << "\" y2=\"" << fixed(kMarginTop + plot_h + 5) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(kMarginTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << label_number(x) << "</text>\n";
  }
  if (opt.log_y) {
    for (double e = lo; e <= hi + 1e-9; e += 1.0) {
      svg << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fixed(py_raw(e)) << "\" x2=\"" << kMarginLeft
          << "\" y2=\"" << fixed(py_raw(e)) << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fixed(py_raw(e) + 4) << "\" text-anchor=\"end\">1e"
          << label_number(e) << "</text>\n";
    }
  } else {
    const double y_step = nice_step(hi - lo);
    for (double y = std::ceil(lo / y_step) * y_step; y <= hi + 1e-9 * y_step; y += y_step) {
      svg << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fixed(py_raw(y)) << "\" x2=\"" << kMarginLeft
          << "\" y2=\"" << fixed(py_raw(y)) << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fixed(py_raw(y) + 4) << "\" text-anchor=\"end\">"
          << label_number(std::abs(y) < 1e-12 * y_step ? 0.0 : y) << "</text>\n";
    }
  }
  svg << "<text x=\"" << fixed(kMarginLeft + plot_w / 2) << "\" y=\"" << opt.height - 15
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(opt.x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << fixed(kMarginTop + plot_h / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << fixed(kMarginTop + plot_h / 2) << ")\">" << xml_escape(opt.y_label)
      << (opt.log_y ? " (log scale)" : "") << "</text>\n</g>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    svg << "<polyline fill=\"none\" stroke=\"" << kPalette[k % std::size(kPalette)]
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!first) svg << ' ';
      svg << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i]));
      first = false;
    }
    svg << "\"/>\n";
  }

  svg << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  const double lx = kMarginLeft + plot_w + 15;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double ly = kMarginTop + 12 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 24) << "\" y2=\""
        << fixed(ly) << "\" stroke=\"" << kPalette[k % std::size(kPalette)] << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed(lx + 30) << "\" y=\"" << fixed(ly + 4) << "\">" << xml_escape(series[k].label)
        << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace eveopt::cli
