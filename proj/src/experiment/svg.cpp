#include "stackelberg/experiment/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace stackelberg {

namespace {

constexpr std::size_t kMaxPoints = 2000;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string Escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string RenderLineChart(const std::vector<Series>& series, const ChartOptions& options) {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double w = options.width - left - right;
  const double h = options.height - top - bottom;

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  bool positive = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
      positive = positive && s.y[i] > 0.0;
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  const bool log_y = options.log_y && positive;
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double ly = ty(y_lo);
  double hy = ty(y_hi);
  if (hy - ly < 1e-12) ly -= 0.5, hy += 0.5;
  if (x_hi - x_lo < 1e-12) x_lo -= 0.5, x_hi += 0.5;
  auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * w; };
  auto py = [&](double v) { return top + (hy - ty(v)) / (hy - ly) * h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
     << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << options.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << Escape(options.title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x_lo + (x_hi - x_lo) * k / 4.0;
    const double gy = ly + (hy - ly) * k / 4.0;
    const double label_y = log_y ? std::pow(10.0, gy) : gy;
    const double yy = top + (hy - gy) / (hy - ly) * h;
    os << "<text x=\"" << px(fx) << "\" y=\"" << top + h + 18 << "\" text-anchor=\"middle\">"
       << Tick(fx) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << yy + 4 << "\" text-anchor=\"end\">"
       << Tick(label_y) << "</text>\n";
    os << "<line x1=\"" << left << "\" x2=\"" << left + w << "\" y1=\"" << yy << "\" y2=\"" << yy
       << "\" stroke=\"#ddd\"/>\n";
  }
  os << "<text x=\"" << left + w / 2 << "\" y=\"" << options.height - 12
     << "\" text-anchor=\"middle\">" << Escape(options.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << top + h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << Escape(options.y_label) << (log_y ? " (log)" : "") << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, (n + kMaxPoints - 1) / kMaxPoints);
    const char* color = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    os << "\"/>\n";
    if (k < 10) {
      const double ly_pos = top + 14 + 16 * static_cast<double>(k);
      os << "<line x1=\"" << left + w - 150 << "\" x2=\"" << left + w - 130 << "\" y1=\"" << ly_pos - 4
         << "\" y2=\"" << ly_pos - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << left + w - 125 << "\" y=\"" << ly_pos << "\">" << Escape(s.name)
         << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace stackelberg
