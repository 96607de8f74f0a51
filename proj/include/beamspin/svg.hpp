#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "beamspin/sweeps.hpp"

namespace beamspin {

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool x_log = false;
  bool y_log = false;
  bool timestamp = false;  // adds a generation-time comment (off for reproducible output)
};

/// Hand-emitted line plot; no plotting dependencies.
void write_svg_lines(std::ostream& out, std::span<const LineSeries> series,
                     const PlotOptions& opt);

/// Heatmap of a 2-D sweep (axis1 vertical, axis2 horizontal).
void write_svg_heatmap(std::ostream& out, const SweepResult& sweep,
                       const PlotOptions& opt);

} // namespace beamspin
