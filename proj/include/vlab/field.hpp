#ifndef VLAB_FIELD_HPP
#define VLAB_FIELD_HPP

#include <complex>

#include "vlab/lattice.hpp"

namespace vlab {

/// Evaluation closer than this (times a) to a vortex raises SingularPointError.
inline constexpr double kSingularRadius = 1e-12;

/// Planar velocity (u, v) stored as u + i v.
inline Complex velocity_from_conjugate(Complex conjugate_velocity) { return std::conj(conjugate_velocity); }

// Infinite-row closed forms --------------------------------------------------
//
// Potentials use the principal branch of log; only the imaginary part (the
// stream function) is single valued. Velocities are returned as the
// conjugate velocity u - i v = dw/dz.

/// Complex potential of the single street n = 0.
Complex single_street_potential(Complex z, const StreetParams& params);

/// Complex potential of streets -N..N, summed street by street.
Complex array_potential(Complex z, const StreetParams& params);

/// Im(array_potential); far streets enter through their exact constant
/// contribution, so the cost is independent of N.
double array_stream_function(Complex z, const StreetParams& params);

/// Conjugate velocity of streets -N..N.
Complex array_velocity(Complex z, const StreetParams& params);

/// d/dz of array_velocity.
Complex array_velocity_derivative(Complex z, const StreetParams& params);

/// Stream function in the frame translating at u_frame along x:
/// Im(w_N(z) - u_frame z).
double relative_stream_function(Complex z, const StreetParams& params, double u_frame);

// Explicit vortex sets ----------------------------------------------------------

/// Conjugate velocity induced at z by all vortices of the set.
Complex set_velocity(Complex z, const VortexSet& vortices);

Complex set_velocity_derivative(Complex z, const VortexSet& vortices);

/// -sum Gamma_j / (2 pi) log|z - z_j|.
double set_stream_function(Complex z, const VortexSet& vortices);

/// Stream function in a frame moving with planar velocity `frame` (u + i v).
double set_relative_stream_function(Complex z, const VortexSet& vortices, Complex frame);

}  // namespace vlab

#endif  // VLAB_FIELD_HPP
