#include "vlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "complex_trig.hpp"
#include "vlab/errors.hpp"

namespace vlab {

namespace {

using detail::kCotCutoff;
using detail::log_abs_sin;
using detail::log_sin;
using detail::stable_cot;
using std::numbers::pi;

constexpr Complex kI{0.0, 1.0};

void check_lattice_point(Complex z, const StreetParams& p) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ValidationError("field point must be finite");
  if (distance_to_lattice(z, p) < kSingularRadius * p.a)
    throw SingularPointError("field evaluated on a vortex at (" + std::to_string(z.real()) + ", " +
                             std::to_string(z.imag()) + ")");
}

void check_set_point(Complex z, const VortexSet& v) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ValidationError("field point must be finite");
  if (distance_to_set(z, v) < kSingularRadius)
    throw SingularPointError("field evaluated on a vortex at (" + std::to_string(z.real()) + ", " +
                             std::to_string(z.imag()) + ")");
}

// Streets outside [lo, hi] have both rows beyond the cot cutoff on the same
// side of z, so their velocity contribution is exactly zero and their
// stream-function contribution is the constant +-gamma b / (2a).
struct ActiveStreets {
  int lo;
  int hi;
  int below;  // streets entirely below z
  int above;  // streets entirely above z
};

ActiveStreets active_streets(double y, const StreetParams& p) {
  const double reach = kCotCutoff * p.a / pi;
  const double big_n = p.big_n;
  const double lo_raw = std::clamp(std::floor((y - p.b - reach) / p.h), -big_n - 1.0, big_n + 1.0);
  const double hi_raw = std::clamp(std::ceil((y + reach) / p.h), -big_n - 1.0, big_n + 1.0);
  ActiveStreets s{};
  s.lo = static_cast<int>(std::max(-big_n, lo_raw));
  s.hi = static_cast<int>(std::min(big_n, hi_raw));
  s.below = static_cast<int>(std::clamp(lo_raw + big_n, 0.0, 2.0 * big_n + 1.0));
  s.above = static_cast<int>(std::clamp(big_n - hi_raw, 0.0, 2.0 * big_n + 1.0));
  return s;
}

// pi/a * (z - centre) for the two rows of street n.
struct RowArgs {
  Complex positive;
  Complex negative;
};

RowArgs row_args(Complex z, int n, const StreetParams& p) {
  const double k = pi / p.a;
  const Complex c_pos{0.5 * p.a, p.b + n * p.h};
  const Complex c_neg{0.0, n * p.h};
  return {k * (z - c_pos), k * (z - c_neg)};
}

}  // namespace

Complex single_street_potential(Complex z, const StreetParams& params) {
  params.validate();
  StreetParams one = params;
  one.big_n = 0;
  check_lattice_point(z, one);
  const auto args = row_args(z, 0, one);
  return params.gamma / (2.0 * pi * kI) * (log_sin(args.positive) - log_sin(args.negative));
}

Complex array_potential(Complex z, const StreetParams& params) {
  params.validate();
  check_lattice_point(z, params);
  Complex total{0.0, 0.0};
  for (int n = -params.big_n; n <= params.big_n; ++n) {
    const auto args = row_args(z, n, params);
    total += log_sin(args.positive) - log_sin(args.negative);
  }
  return params.gamma / (2.0 * pi * kI) * total;
}

double array_stream_function(Complex z, const StreetParams& params) {
  params.validate();
  check_lattice_point(z, params);
  const auto s = active_streets(z.imag(), params);
  double sum = 0.0;
  for (int n = s.lo; n <= s.hi; ++n) {
    const auto args = row_args(z, n, params);
    sum += log_abs_sin(args.positive) - log_abs_sin(args.negative);
  }
  const double far = 0.5 * params.gamma * params.b / params.a * (s.below - s.above);
  return -params.gamma / (2.0 * pi) * sum + far;
}

Complex array_velocity(Complex z, const StreetParams& params) {
  params.validate();
  check_lattice_point(z, params);
  const auto s = active_streets(z.imag(), params);
  Complex sum{0.0, 0.0};
  for (int n = s.lo; n <= s.hi; ++n) {
    const auto args = row_args(z, n, params);
    sum += stable_cot(args.positive) - stable_cot(args.negative);
  }
  return params.gamma / (2.0 * params.a * kI) * sum;
}

Complex array_velocity_derivative(Complex z, const StreetParams& params) {
  params.validate();
  check_lattice_point(z, params);
  const auto s = active_streets(z.imag(), params);
  Complex sum{0.0, 0.0};
  for (int n = s.lo; n <= s.hi; ++n) {
    const auto args = row_args(z, n, params);
    const Complex cp = stable_cot(args.positive);
    const Complex cn = stable_cot(args.negative);
    sum += cp * cp - cn * cn;
  }
  return -params.gamma * pi / (2.0 * params.a * params.a * kI) * sum;
}

double relative_stream_function(Complex z, const StreetParams& params, double u_frame) {
  return array_stream_function(z, params) - u_frame * z.imag();
}

Complex set_velocity(Complex z, const VortexSet& vortices) {
  check_set_point(z, vortices);
  Complex sum{0.0, 0.0};
  for (std::size_t j = 0; j < vortices.size(); ++j) sum += vortices.strengths[j] / (z - vortices.positions[j]);
  return sum / (2.0 * pi * kI);
}

Complex set_velocity_derivative(Complex z, const VortexSet& vortices) {
  check_set_point(z, vortices);
  Complex sum{0.0, 0.0};
  for (std::size_t j = 0; j < vortices.size(); ++j) {
    const Complex d = z - vortices.positions[j];
    sum += vortices.strengths[j] / (d * d);
  }
  return -sum / (2.0 * pi * kI);
}

double set_stream_function(Complex z, const VortexSet& vortices) {
  check_set_point(z, vortices);
  double sum = 0.0;
  for (std::size_t j = 0; j < vortices.size(); ++j)
    sum += vortices.strengths[j] * std::log(std::abs(z - vortices.positions[j]));
  return -sum / (2.0 * pi);
}

double set_relative_stream_function(Complex z, const VortexSet& vortices, Complex frame) {
  return set_stream_function(z, vortices) - (frame.real() * z.imag() - frame.imag() * z.real());
}

}  // namespace vlab
