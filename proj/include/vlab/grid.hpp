#ifndef VLAB_GRID_HPP
#define VLAB_GRID_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vlab/lattice.hpp"

namespace vlab {

/// Grid points within this distance (times a) of a vortex are masked.
inline constexpr double kMaskRadius = 1e-6;

struct Window {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  void validate() const;
};

/// Samples on an nx-by-ny lattice covering a window, stored row-major
/// (index = j * nx + i, x fastest). Masked cells hold NaN.
struct FieldGrid {
  Window window;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;
  std::vector<double> vx;  ///< empty for scalar grids
  std::vector<double> vy;

  [[nodiscard]] bool is_vector() const { return !vx.empty(); }
  [[nodiscard]] double x(int i) const;
  [[nodiscard]] double y(int j) const;
  [[nodiscard]] double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
  /// Bilinear interpolation of `values`; NaN if any corner is masked.
  [[nodiscard]] double interpolate(double x, double y) const;
  void validate() const;
};

using ScalarField = std::function<double(Complex)>;
using VectorField = std::function<Complex(Complex)>;  ///< planar (u + i v)
using MaskPredicate = std::function<bool(Complex)>;

FieldGrid sample_grid(const Window& window, int nx, int ny, const ScalarField& evaluator,
                      const MaskPredicate& masked = {});

/// `values` receives the speed |v|; vx, vy the components.
FieldGrid sample_vector_grid(const Window& window, int nx, int ny, const VectorField& evaluator,
                             const MaskPredicate& masked = {});

/// Mask predicates for the two kinds of vortex configuration.
MaskPredicate lattice_mask(const StreetParams& params);
MaskPredicate set_mask(const VortexSet& vortices, double length_scale = 1.0);

/// CSV with header x,y,value[,vx,vy]; masked cells are written as NaN.
void write_csv(std::ostream& out, const FieldGrid& grid);
/// JSON document with window metadata and row-major value arrays.
void write_json(std::ostream& out, const FieldGrid& grid);

}  // namespace vlab

#endif  // VLAB_GRID_HPP
