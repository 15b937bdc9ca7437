#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tnc/sim.hpp"

namespace tnc {

struct PlotOptions {
  std::string title;
  int width = 800;
  int height = 450;
};

/// Static SVG line plot: axes with ticks, one polyline per column, a legend.
void write_svg(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& columns,
               const PlotOptions& options = {});

}  // namespace tnc
