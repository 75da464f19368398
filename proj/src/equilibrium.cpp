#include "vlab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "complex_trig.hpp"
#include "vlab/errors.hpp"

namespace vlab {

namespace {

using std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

double speed_with_truncation(const StreetParams& p, int big_n) {
  const double k = pi / p.a;
  double sum = std::tanh(k * p.b);
  for (int n = 1; n <= big_n; ++n) sum += std::tanh(k * (p.b + n * p.h)) + std::tanh(k * (p.b - n * p.h));
  return p.gamma / (2.0 * p.a) * sum;
}

// Sums f(0) + sum_{n=1}^{N} (f(n) + f(-n)).
template <typename F>
Complex paired_sum(int big_n, F&& f) {
  Complex total = f(0);
  for (int n = 1; n <= big_n; ++n) total += f(n) + f(-n);
  return total;
}

}  // namespace

double street_speed(const StreetParams& params) {
  params.validate();
  return params.gamma / (2.0 * params.a) * std::tanh(pi * params.b / params.a);
}

EquilibriumSpeed array_speed(const StreetParams& params) {
  params.validate();
  return {speed_with_truncation(params, params.big_n), params.big_n, params.gamma * params.b / (params.a * params.h)};
}

std::vector<ConvergenceRow> convergence_table(const StreetParams& params, std::span<const int> n_list) {
  params.validate();
  if (!std::is_sorted(n_list.begin(), n_list.end())) throw ValidationError("n_list must be non-decreasing");
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    if (n < 0) throw ValidationError("truncation half-count must be non-negative");
    rows.push_back({2 * n + 1, speed_with_truncation(params, n)});
  }
  return rows;
}

Complex origin_vortex_term(int n, const StreetParams& p) {
  const double k = pi / p.a;
  // +Gamma row of street n, minus the -Gamma row of street n (absent for n = 0).
  Complex term = detail::stable_cot(k * Complex{-0.5 * p.a, -(p.b + n * p.h)});
  if (n != 0) term -= detail::stable_cot(k * Complex{0.0, -n * p.h});
  return term;
}

Complex offset_vortex_term(int n, const StreetParams& p) {
  const double k = pi / p.a;
  Complex term = -detail::stable_cot(k * Complex{0.5 * p.a, p.b - n * p.h});
  if (n != 0) term += detail::stable_cot(k * Complex{0.0, -n * p.h});
  return term;
}

EquilibriumCheck verify_equilibrium(const StreetParams& params) {
  params.validate();
  const Complex prefactor = params.gamma / (2.0 * params.a * kI);
  const Complex ubar0 = prefactor * paired_sum(params.big_n, [&](int n) { return origin_vortex_term(n, params); });
  const Complex ubar1 = prefactor * paired_sum(params.big_n, [&](int n) { return offset_vortex_term(n, params); });

  EquilibriumCheck check;
  check.velocity_origin = std::conj(ubar0);
  check.velocity_offset = std::conj(ubar1);
  check.speed = speed_with_truncation(params, params.big_n);
  check.residual = std::max(std::abs(check.velocity_origin - check.speed), std::abs(check.velocity_offset - check.speed));
  return check;
}

}  // namespace vlab
