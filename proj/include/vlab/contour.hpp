#ifndef VLAB_CONTOUR_HPP
#define VLAB_CONTOUR_HPP

#include <string>
#include <vector>

#include "vlab/grid.hpp"

namespace vlab {

using Polyline = std::vector<Complex>;

/// Level set of a scalar grid by marching squares. Segments are joined into
/// polylines; a closed curve repeats its first point at the end. Cells with a
/// masked corner are skipped; ambiguous cells are resolved by the cell mean.
std::vector<Polyline> contour_lines(const FieldGrid& grid, double level);

/// `count` levels evenly spaced strictly inside the finite value range.
std::vector<double> even_levels(const FieldGrid& grid, int count);

struct VortexMarker {
  Complex position;
  double strength = 0.0;
};

struct RenderOptions {
  int width = 640;               ///< pixels; height follows the aspect ratio
  double stroke = 0.8;
  double highlight_stroke = 2.4;
  std::string title;
  std::vector<VortexMarker> vortices;  ///< drawn when inside the window
  /// When set, only highlight-level curves passing within two grid cells of
  /// one of these points (typically the saddles) are drawn; the rest of
  /// each highlight level is left out.
  std::vector<Complex> highlight_anchors;
};

/// SVG document with one path per contour polyline. Highlight levels are
/// drawn with the heavier stroke; vortices are marked by sign.
/// Coordinates carry 6 significant digits.
std::string render_contours(const FieldGrid& grid, const std::vector<double>& levels,
                            const std::vector<double>& highlight_levels, const RenderOptions& options = {});

}  // namespace vlab

#endif  // VLAB_CONTOUR_HPP
