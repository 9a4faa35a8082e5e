#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace cbfed::cli {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

void write_loglog_svg(std::ostream& os, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.1, xmax = 1.0, ymin = 0.1, ymax = 1.0;
  // Whole decades on both axes, at least one decade wide.
  const double lx0 = std::floor(std::log10(xmin)),
               lx1 = std::max(lx0 + 1, std::ceil(std::log10(xmax)));
  const double ly0 = std::floor(std::log10(ymin)),
               ly1 = std::max(ly0 + 1, std::ceil(std::log10(ymax)));
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - lx0) / (lx1 - lx0) * pw; };
  auto py = [&](double y) { return kTop + (ly1 - std::log10(y)) / (ly1 - ly0) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" "
     << "font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-size=\"15\">" << escape(title) << "</text>\n";

  // Grid and tick labels at every decade.
  for (double e = lx0; e <= lx1; ++e) {
    const double x = px(std::pow(10.0, e));
    os << "<line x1=\"" << num(x) << "\" y1=\"" << kTop << "\" x2=\"" << num(x) << "\" y2=\""
       << kTop + ph << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << num(x) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">1e"
       << static_cast<int>(e) << "</text>\n";
  }
  for (double e = ly0; e <= ly1; ++e) {
    const double y = py(std::pow(10.0, e));
    os << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft + pw << "\" y2=\""
       << num(y) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e"
       << static_cast<int>(e) << "</text>\n";
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << kHeight - 16
     << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  os << "<text transform=\"translate(20," << num(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";

  // Slope guides through the geometric middle of the data, clipped to the box.
  const double xm = std::sqrt(xmin * xmax), ym = std::sqrt(ymin * ymax);
  int slot = 0;
  for (int slope : {1, 2}) {
    const double xa = std::pow(10.0, lx0), xb = std::pow(10.0, lx1);
    auto yat = [&](double x) { return ym * std::pow(x / xm, slope); };
    double x0 = xa, x1 = xb;
    // Keep the guide inside the y range.
    const double ylo = std::pow(10.0, ly0), yhi = std::pow(10.0, ly1);
    x0 = std::max(x0, xm * std::pow(ylo / ym, 1.0 / slope));
    x1 = std::min(x1, xm * std::pow(yhi / ym, 1.0 / slope));
    if (x1 > x0) {
      os << "<line x1=\"" << num(px(x0)) << "\" y1=\"" << num(py(yat(x0))) << "\" x2=\""
         << num(px(x1)) << "\" y2=\"" << num(py(yat(x1)))
         << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    }
    const double ly = kTop + 20 + 20.0 * static_cast<double>(series.size() + slot++);
    os << "<line x1=\"" << kLeft + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 45
       << "\" y2=\"" << ly << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << kLeft + pw + 52 << "\" y=\"" << ly + 4 << "\">slope " << slope
       << "</text>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
      os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
         << "\" r=\"3.5\" fill=\"" << s.color << "\"/>\n";
    }
    if (!pts.empty()) {
      pts.pop_back();
      os << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << s.color
         << "\" stroke-width=\"1.8\"/>\n";
    }
    const double ly = kTop + 20 + 20.0 * static_cast<double>(k);
    os << "<line x1=\"" << kLeft + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 45
       << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"/>\n";
    os << "<text x=\"" << kLeft + pw + 52 << "\" y=\"" << ly + 4 << "\">" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace cbfed::cli
