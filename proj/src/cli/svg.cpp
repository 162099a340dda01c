#include "hyplab/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hyplab::svg {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                               "#bcbd22", "#17becf"};

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

std::pair<double, double> extent(const std::vector<Series>& series, bool use_x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi};
}

}  // namespace

std::vector<double> ticks(double lo, double hi, int target) {
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

std::string line_plot(const std::vector<Series>& series, const PlotSpec& spec) {
  auto [x0, x1] = spec.x_range.value_or(extent(series, true));
  auto [y0, y1] = spec.y_range.value_or(extent(series, false));
  double pw = kWidth - kLeft - kRight;
  double ph = kHeight - kTop - kBottom;
  if (spec.equal_aspect) {
    const double sx = pw / (x1 - x0);
    const double sy = ph / (y1 - y0);
    if (sx > sy) pw = sy * (x1 - x0); else ph = sx * (y1 - y0);
  }
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << std::setprecision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<defs><clipPath id=\"plot\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
     << pw << "\" height=\"" << ph << "\"/></clipPath></defs>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">"
     << escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(x0, x1)) {
    os << "<line x1=\"" << px(t) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(t) << "\" y2=\""
       << kTop + ph + 5 << "\" stroke=\"black\"/>"
       << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 20
       << "\" text-anchor=\"middle\" font-size=\"12\">" << t << "</text>\n";
  }
  for (double t : ticks(y0, y1)) {
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << kLeft << "\" y2=\""
       << py(t) << "\" stroke=\"black\"/>"
       << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(t) + 4
       << "\" text-anchor=\"end\" font-size=\"12\">" << t << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.x_label) << "</text>\n"
     << "<text x=\"20\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" font-size=\"14\" "
     << "transform=\"rotate(-90 20 " << kTop + ph / 2 << ")\">" << escape(spec.y_label)
     << "</text>\n";
  if (spec.zero_line && y0 < 0.0 && y1 > 0.0) {
    os << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft + pw << "\" y2=\""
       << py(0) << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
  }

  os << "<g clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    os << "<polyline stroke=\"" << kPalette[s % kPalette.size()] << "\" points=\"";
    const auto& sr = series[s];
    for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
      if (!std::isfinite(sr.y[i])) continue;
      const double yc = std::clamp(sr.y[i], y0 - (y1 - y0), y1 + (y1 - y0));
      os << px(sr.x[i]) << ',' << py(yc) << ' ';
    }
    os << "\"/>\n";
  }
  os << "</g>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = kTop + 15 + 20.0 * static_cast<double>(s);
    const double lx = kLeft + pw + 20;
    os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 25 << "\" y2=\"" << ly
       << "\" stroke=\"" << kPalette[s % kPalette.size()] << "\" stroke-width=\"2\"/>"
       << "<text x=\"" << lx + 32 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
       << escape(series[s].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace hyplab::svg
