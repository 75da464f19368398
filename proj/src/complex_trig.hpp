// Overflow-free trigonometric kernels for complex arguments with large
// imaginary parts (deep street stacks put |Im| in the hundreds).
#ifndef VLAB_SRC_COMPLEX_TRIG_HPP
#define VLAB_SRC_COMPLEX_TRIG_HPP

#include <cmath>
#include <complex>
#include <numbers>

namespace vlab::detail {

using Complex = std::complex<double>;

/// Beyond this |Im(arg)| cot is replaced by its limit -i*sign(Im).
inline constexpr double kCotCutoff = 30.0;

/// cot(x + iy) = (sin 2x - i sinh 2y) / (2 (sin^2 x + sinh^2 y)).
inline Complex stable_cot(Complex w) {
  const double x = w.real();
  const double y = w.imag();
  if (y > kCotCutoff) return {0.0, -1.0};
  if (y < -kCotCutoff) return {0.0, 1.0};
  const double sx = std::sin(x);
  const double shy = std::sinh(y);
  const double denom = 2.0 * (sx * sx + shy * shy);
  return {std::sin(2.0 * x) / denom, -std::sinh(2.0 * y) / denom};
}

/// log|sin(x + iy)|, with the exponentially small correction dropped past
/// the cutoff.
inline double log_abs_sin(Complex w) {
  const double x = w.real();
  const double y = w.imag();
  if (std::abs(y) > kCotCutoff) return std::abs(y) - std::numbers::ln2;
  const double sx = std::sin(x);
  const double shy = std::sinh(y);
  return 0.5 * std::log(sx * sx + shy * shy);
}

/// Principal argument of sin(x + iy), computed without forming cosh/sinh.
inline double arg_sin(Complex w) {
  return std::atan2(std::cos(w.real()) * std::tanh(w.imag()), std::sin(w.real()));
}

/// log sin(w) on the principal branch of arg.
inline Complex log_sin(Complex w) { return {log_abs_sin(w), arg_sin(w)}; }

}  // namespace vlab::detail

#endif  // VLAB_SRC_COMPLEX_TRIG_HPP
