#ifndef VLAB_EQUILIBRIUM_HPP
#define VLAB_EQUILIBRIUM_HPP

#include <span>
#include <vector>

#include "vlab/lattice.hpp"

namespace vlab {

struct EquilibriumSpeed {
  double u = 0.0;       ///< U_N, common translation speed along x
  int n_used = 0;       ///< truncation half-count N
  double offset = 0.0;  ///< gamma b / (a h)

  /// U_N - gamma b / (a h): the speed in the radially truncated convention.
  [[nodiscard]] double shifted() const { return u - offset; }
};

/// Translation speed of one isolated street: gamma/(2a) tanh(pi b / a).
double street_speed(const StreetParams& params);

/// U_N = gamma/(2a) sum_{n=-N}^{N} tanh(pi (b + n h)/a), accumulated as the
/// n = 0 term followed by the (n, -n) pairs.
EquilibriumSpeed array_speed(const StreetParams& params);

struct ConvergenceRow {
  int streets = 0;  ///< 2N + 1
  double u = 0.0;   ///< U_N
};

/// U_N for each N of `n_list` (must be non-decreasing).
std::vector<ConvergenceRow> convergence_table(const StreetParams& params, std::span<const int> n_list);

/// Per-street contributions (without the gamma/(2a i) prefactor) to the
/// conjugate velocity of the -Gamma vortex at the origin, and of the +Gamma
/// vortex at a/2 + ib, with the self row removed.
Complex origin_vortex_term(int n, const StreetParams& params);
Complex offset_vortex_term(int n, const StreetParams& params);

struct EquilibriumCheck {
  Complex velocity_origin;  ///< planar velocity of the vortex at 0
  Complex velocity_offset;  ///< planar velocity of the vortex at a/2 + ib
  double speed = 0.0;       ///< U_N
  double residual = 0.0;    ///< max |velocity - U_N| over both vortices
};

/// Sums the row-excluded velocities of the two representative vortices and
/// compares them with array_speed.
EquilibriumCheck verify_equilibrium(const StreetParams& params);

}  // namespace vlab

#endif  // VLAB_EQUILIBRIUM_HPP
