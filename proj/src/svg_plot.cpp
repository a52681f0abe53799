#include "fhbench/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fhbench/format.hpp"

namespace fhbench {

namespace {

constexpr double kLeft = 78.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 52.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string num(double v) { return format_fixed(v, 2); }

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
};

// Roughly five ticks at 1/2/5 multiples.
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (span / step <= 6.0) break;
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return ticks;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  const bool log_y = spec.log_y;
  auto usable = [log_y](double y) { return std::isfinite(y) && (!log_y || y > 0.0); };

  Range xr;
  Range yr;
  for (const auto& s : spec.lines) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.y[i])) continue;
      xr.add(s.x[i]);
      yr.add(s.y[i]);
    }
  }
  for (const auto& b : spec.bars) {
    for (std::size_t i = 0; i < b.x.size() && i < b.height.size(); ++i) {
      xr.add(b.x[i] - 0.5);
      xr.add(b.x[i] + 0.5);
      if (!log_y) yr.add(0.0);
      if (usable(b.height[i])) yr.add(b.height[i]);
    }
  }
  for (const auto& r : spec.rules) {
    if (usable(r.y)) yr.add(r.y);
  }
  if (xr.empty()) xr = {0.0, 1.0};
  if (yr.empty()) yr = log_y ? Range{1e-3, 1.0} : Range{0.0, 1.0};
  if (xr.hi - xr.lo < 1e-12) { xr.lo -= 1.0; xr.hi += 1.0; }

  double ylo = log_y ? std::log10(yr.lo) : yr.lo;
  double yhi = log_y ? std::log10(yr.hi) : yr.hi;
  if (log_y) {
    ylo = std::floor(ylo);
    yhi = std::ceil(yhi);
    if (yhi - ylo < 1.0) yhi = ylo + 1.0;
  } else {
    const double pad = yhi - ylo < 1e-12 ? 1.0 : 0.06 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }
  const double xpad = 0.04 * (xr.hi - xr.lo);
  const double xlo = xr.lo - xpad;
  const double xhi = xr.hi + xpad;

  const double w = spec.width;
  const double h = spec.height;
  const double pw = w - kLeft - kRight;
  const double ph = h - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) {
    const double v = log_y ? std::log10(y) : y;
    return kTop + (yhi - v) / (yhi - ylo) * ph;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
    << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(spec.title) << "</text>\n";

  // Axes and ticks.
  o << "<g stroke=\"#444\" fill=\"none\">\n";
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\"/>\n</g>\n";
  o << "<g stroke=\"#ddd\">\n";
  std::vector<std::pair<double, std::string>> yticks;
  if (log_y) {
    for (int e = static_cast<int>(ylo); e <= static_cast<int>(yhi); ++e) {
      yticks.emplace_back(std::pow(10.0, e), "1e" + std::to_string(e));
    }
  } else {
    for (double v : linear_ticks(ylo, yhi)) yticks.emplace_back(v, format_general(v, 4));
  }
  for (const auto& [v, _] : yticks) {
    o << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(py(v))
      << "\" y2=\"" << num(py(v)) << "\"/>\n";
  }
  o << "</g>\n";
  for (const auto& [v, text] : yticks) {
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(v) + 4)
      << "\" text-anchor=\"end\">" << text << "</text>\n";
  }
  for (double v : linear_ticks(xr.lo, xr.hi)) {
    o << "<text x=\"" << num(px(v)) << "\" y=\"" << num(kTop + ph + 16)
      << "\" text-anchor=\"middle\">" << format_general(v, 4) << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(h - 12)
    << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << num(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

  // Data.
  const double base = log_y ? std::pow(10.0, ylo) : std::clamp(0.0, ylo, yhi);
  for (const auto& b : spec.bars) {
    o << "<g fill=\"" << b.color << "\" fill-opacity=\"0.75\">\n";
    for (std::size_t i = 0; i < b.x.size() && i < b.height.size(); ++i) {
      if (!usable(b.height[i])) continue;
      const double y0 = py(base);
      const double y1 = py(b.height[i]);
      const double bw = 0.6 * pw / (xhi - xlo);
      o << "<rect x=\"" << num(px(b.x[i]) - bw / 2) << "\" y=\"" << num(std::min(y0, y1))
        << "\" width=\"" << num(bw) << "\" height=\"" << num(std::abs(y1 - y0)) << "\"/>\n";
    }
    o << "</g>\n";
  }
  for (const auto& r : spec.rules) {
    if (!usable(r.y)) continue;
    o << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(py(r.y))
      << "\" y2=\"" << num(py(r.y)) << "\" stroke=\"" << r.color
      << "\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n";
  }
  for (const auto& s : spec.lines) {
    std::ostringstream pts;
    std::vector<std::pair<double, double>> kept;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.y[i])) continue;
      kept.emplace_back(px(s.x[i]), py(s.y[i]));
    }
    for (const auto& [x, y] : kept) pts << num(x) << ',' << num(y) << ' ';
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) o << " stroke-dasharray=\"6 4\"";
    o << " points=\"" << pts.str() << "\"/>\n";
    if (s.markers) {
      o << "<g fill=\"" << s.color << "\">\n";
      for (const auto& [x, y] : kept) {
        o << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3.5\"/>\n";
      }
      o << "</g>\n";
    }
  }

  // Legend.
  double ly = kTop + 8;
  const double lx = kLeft + pw + 12;
  auto legend = [&](const std::string& color, const std::string& label, bool dashed) {
    o << "<line x1=\"" << num(lx) << "\" x2=\"" << num(lx + 22) << "\" y1=\"" << num(ly)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"3\"";
    if (dashed) o << " stroke-dasharray=\"6 4\"";
    o << "/>\n<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 4) << "\">" << escape(label)
      << "</text>\n";
    ly += 18;
  };
  for (const auto& s : spec.lines) legend(s.color, s.label, s.dashed);
  for (const auto& b : spec.bars) legend(b.color, b.label, false);
  for (const auto& r : spec.rules) legend(r.color, r.label, true);

  o << "</svg>\n";
  return o.str();
}

}  // namespace fhbench
