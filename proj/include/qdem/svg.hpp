#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qdem/perm.hpp"

namespace qdem {

// A curve in field coordinates (coord1, coord2).
struct Polyline {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Grayscale heat map of the field (coord2 horizontal, coord1 vertical, values
// scaled by the field maximum) with the curves drawn on top.
void write_heatmap_svg(std::ostream& out, const HeightField& field, const std::vector<Polyline>& curves,
                       const std::string& title);

}  // namespace qdem
