#include "reic/app/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace reic::app {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 60;
constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
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
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

class Canvas {
 public:
  Canvas(const std::string& title, const std::string& x_label, const std::string& y_label) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\""
         << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         << "font-size=\"15\">" << escape(title) << "</text>\n"
         << "<text x=\"" << kLeft + plot_w() / 2 << "\" y=\"" << kHeight - 15
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label)
         << "</text>\n"
         << "<text x=\"18\" y=\"" << kTop + plot_h() / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         << "font-size=\"12\" transform=\"rotate(-90 18 " << kTop + plot_h() / 2 << ")\">" << escape(y_label)
         << "</text>\n"
         << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w() << "\" height=\"" << plot_h()
         << "\" fill=\"none\" stroke=\"black\"/>\n";
  }

  static double plot_w() { return kWidth - kLeft - kRight; }
  static double plot_h() { return kHeight - kTop - kBottom; }

  void y_axis(const Range& r) {
    for (int k = 0; k <= 4; ++k) {
      const double v = r.lo + (r.hi - r.lo) * k / 4.0;
      const double y = kTop + plot_h() * (1.0 - k / 4.0);
      out_ << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
           << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(v) << "</text>\n";
    }
  }

  void x_tick(double x, const std::string& label) {
    out_ << "<line x1=\"" << x << "\" y1=\"" << kTop + plot_h() << "\" x2=\"" << x << "\" y2=\""
         << kTop + plot_h() + 4 << "\" stroke=\"black\"/>\n"
         << "<text x=\"" << x << "\" y=\"" << kTop + plot_h() + 16
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << escape(label) << "</text>\n";
  }

  void legend(std::size_t k, const std::string& label) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(k);
    const double x = kWidth - kRight + 12;
    out_ << "<rect x=\"" << x << "\" y=\"" << y - 8 << "\" width=\"12\" height=\"10\" fill=\"" << color(k)
         << "\"/>\n"
         << "<text x=\"" << x + 18 << "\" y=\"" << y + 1 << "\" font-family=\"sans-serif\" font-size=\"11\">"
         << escape(label) << "</text>\n";
  }

  static const char* color(std::size_t k) { return kColors[k % kColors.size()]; }

  std::ostringstream& raw() { return out_; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  const auto px = [&](double v) { return kLeft + Canvas::plot_w() * (v - xr.lo) / (xr.hi - xr.lo); };
  const auto py = [&](double v) { return kTop + Canvas::plot_h() * (1.0 - (v - yr.lo) / (yr.hi - yr.lo)); };

  Canvas c(title, x_label, y_label);
  c.y_axis(yr);
  for (int k = 0; k <= 4; ++k) {
    const double v = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    c.x_tick(px(v), num(v));
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    auto& out = c.raw();
    out << "<polyline fill=\"none\" stroke=\"" << Canvas::color(k) << "\" stroke-width=\"1.5\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) out << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    out << "\"/>\n";
    if (n <= 20)
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\" fill=\""
              << Canvas::color(k) << "\"/>\n";
    c.legend(k, s.label);
  }
  return c.finish();
}

std::string bar_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<std::string>& categories, const std::vector<Series>& series) {
  Range yr;
  yr.add(0.0);
  for (const auto& s : series)
    for (double v : s.y) yr.add(v);
  yr.finish();
  const auto py = [&](double v) { return kTop + Canvas::plot_h() * (1.0 - (v - yr.lo) / (yr.hi - yr.lo)); };

  Canvas c(title, x_label, y_label);
  c.y_axis(yr);
  const double group_w = Canvas::plot_w() / static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  const double bar_w = 0.8 * group_w / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t g = 0; g < categories.size(); ++g) {
    const double x0 = kLeft + group_w * static_cast<double>(g) + 0.1 * group_w;
    c.x_tick(x0 + 0.4 * group_w, categories[g]);
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (g >= series[k].y.size() || !std::isfinite(series[k].y[g])) continue;
      const double top = py(std::max(series[k].y[g], 0.0));
      const double base = py(std::max(yr.lo, 0.0));
      c.raw() << "<rect x=\"" << num(x0 + bar_w * static_cast<double>(k)) << "\" y=\"" << num(top) << "\" width=\""
              << num(bar_w) << "\" height=\"" << num(std::max(base - top, 0.0)) << "\" fill=\"" << Canvas::color(k)
              << "\"/>\n";
    }
  }
  for (std::size_t k = 0; k < series.size(); ++k) c.legend(k, series[k].label);
  return c.finish();
}

}  // namespace reic::app
