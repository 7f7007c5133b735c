#ifndef REIC_APP_SVG_HPP
#define REIC_APP_SVG_HPP

#include <string>
#include <vector>

namespace reic::app {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG 1.1 documents; no scripts, fonts or external references.
std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series);

/// Grouped bars: one group per category, one bar per series (series.y is
/// indexed by category; series.x is ignored).
std::string bar_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<std::string>& categories, const std::vector<Series>& series);

}  // namespace reic::app

#endif  // REIC_APP_SVG_HPP
