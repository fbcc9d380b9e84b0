#include "ksos/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace ksos {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
constexpr double kMarginLeft = 70, kMarginRight = 150, kMarginTop = 40, kMarginBottom = 50;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
  void widen() {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

void write_line_chart(std::ostream& out, const std::vector<ChartSeries>& series, const ChartOptions& options) {
  auto ty = [&](double y) { return options.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!options.log_y || y > 0.0); };

  Range xr, yr;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xr.add(s.x[i]);
      yr.add(ty(s.y[i]));
    }
  }
  xr.widen();
  yr.widen();

  const double w = options.width, h = options.height;
  const double plot_w = w - kMarginLeft - kMarginRight, plot_h = h - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kMarginTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * plot_h; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << options.width << "\" height=\""
      << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fixed(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(options.title) << "</text>\n";

  // Axes and ticks.
  out << "<g stroke=\"#333\" fill=\"none\">\n"
      << "<rect x=\"" << fixed(kMarginLeft) << "\" y=\"" << fixed(kMarginTop) << "\" width=\"" << fixed(plot_w)
      << "\" height=\"" << fixed(plot_h) << "\"/>\n</g>\n<g fill=\"#333\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    out << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(kMarginTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    out << "<text x=\"" << fixed(kMarginLeft - 6) << "\" y=\"" << fixed(py(yv) + 4) << "\" text-anchor=\"end\">"
        << tick_label(options.log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  out << "<text x=\"" << fixed(kMarginLeft + plot_w / 2) << "\" y=\"" << fixed(h - 10)
      << "\" text-anchor=\"middle\">" << escape(options.x_label) << "</text>\n"
      << "<text transform=\"translate(16," << fixed(kMarginTop + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(options.y_label) << "</text>\n</g>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    const ChartSeries& cs = series[s];
    for (std::size_t i = 0; i < std::min(cs.x.size(), cs.y.size()); ++i) {
      if (!usable(cs.x[i], cs.y[i])) continue;
      out << (first ? "" : " ") << fixed(px(cs.x[i])) << "," << fixed(py(ty(cs.y[i])));
      first = false;
    }
    out << "\"/>\n";
    const double ly = kMarginTop + 12 + 18.0 * static_cast<double>(s);
    const double lx = kMarginLeft + plot_w + 12;
    out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 20) << "\" y2=\""
        << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed(lx + 26) << "\" y=\"" << fixed(ly + 4) << "\">" << escape(cs.name) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace ksos
