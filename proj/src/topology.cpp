#include "vlab/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "vlab/equilibrium.hpp"
#include "vlab/errors.hpp"
#include "vlab/field.hpp"
#include "vlab/parallel.hpp"

namespace vlab {

namespace {

namespace odeint = boost::numeric::odeint;

constexpr Complex kI{0.0, 1.0};

double wrap_into(double x, double lo, double period) {
  double r = std::fmod(x - lo, period);
  if (r < 0.0) r += period;
  if (r >= period - 1e-12 * period) r = 0.0;
  return lo + r;
}

double periodic_distance(Complex p, Complex q, const std::optional<double>& period) {
  double dx = p.real() - q.real();
  if (period) dx -= *period * std::round(dx / *period);
  return std::hypot(dx, p.imag() - q.imag());
}

double segment_distance(Complex a, Complex b, Complex p) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

// Gradient of the stream function as gx + i gy, from the conjugate velocity
// f = u - i v: (psi_x, psi_y) = (-v, u).
Complex stream_gradient(Complex conj_velocity) { return kI * std::conj(conj_velocity); }

std::vector<StagnationPoint> search_once(const FlowModel& flow, const SearchRegion& region, Complex cell,
                                         const StagnationSearchOptions& options, int seeds_per_cell) {
  const double a = flow.length_scale;
  const double width = region.x_max - region.x_min;
  const double height = region.y_max - region.y_min;
  const int nsx = std::max(1, static_cast<int>(std::ceil(width / cell.real() * seeds_per_cell - 1e-9)));
  const int nsy = std::max(1, static_cast<int>(std::ceil(height / cell.imag() * seeds_per_cell - 1e-9)));

  std::vector<std::optional<Complex>> found(static_cast<std::size_t>(nsx) * nsy);
  parallel_for(found.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k % nsx);
    const int j = static_cast<int>(k / nsx);
    const Complex seed{region.x_min + (i + 0.5) * width / nsx, region.y_min + (j + 0.5) * height / nsy};
    auto root = refine_stagnation_point(flow, seed, options);
    if (!root) return;
    Complex z = *root;
    if (flow.x_period) z.real(wrap_into(z.real(), region.x_min, *flow.x_period));
    const bool inside = z.imag() >= region.y_min && z.imag() <= region.y_max &&
                        (flow.x_period || (z.real() >= region.x_min && z.real() <= region.x_max));
    if (inside) found[k] = z;
  });

  std::vector<Complex> roots;
  for (const auto& z : found) {
    if (!z) continue;
    const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](Complex r) {
      return periodic_distance(r, *z, flow.x_period) < options.dedup_radius * a;
    });
    if (!duplicate) roots.push_back(*z);
  }

  std::vector<StagnationPoint> points;
  points.reserve(roots.size());
  for (Complex z : roots) {
    // Polish once more at the reduced position.
    if (auto polished = refine_stagnation_point(flow, z, options)) z = *polished;
    points.push_back(classify_stagnation_point(flow, z, options));
  }
  std::sort(points.begin(), points.end(), [](const StagnationPoint& p, const StagnationPoint& q) {
    if (p.position.imag() != q.position.imag()) return p.position.imag() < q.position.imag();
    return p.position.real() < q.position.real();
  });
  return points;
}

}  // namespace

std::string to_string(StagnationKind kind) { return kind == StagnationKind::saddle ? "saddle" : "center"; }

std::string to_string(TraceEnd end) {
  switch (end) {
    case TraceEnd::closed:
      return "closed";
    case TraceEnd::vortex_approach:
      return "vortex_approach";
    case TraceEnd::budget_exhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

FlowModel lattice_flow(const StreetParams& params, double u_frame) {
  params.validate();
  FlowModel flow;
  flow.conj_velocity = [params, u_frame](Complex z) { return array_velocity(z, params) - u_frame; };
  flow.conj_velocity_derivative = [params](Complex z) { return array_velocity_derivative(z, params); };
  flow.stream_function = [params, u_frame](Complex z) { return relative_stream_function(z, params, u_frame); };
  flow.vortex_distance = [params](Complex z) { return distance_to_lattice(z, params); };
  flow.length_scale = params.a;
  flow.circulation_scale = std::abs(params.gamma);
  flow.x_period = params.a;
  return flow;
}

std::optional<Complex> refine_stagnation_point(const FlowModel& flow, Complex seed,
                                               const StagnationSearchOptions& options) {
  const double a = flow.length_scale;
  const double scale = flow.circulation_scale / a;
  const double max_step = 0.25 * a;
  Complex z = seed;
  try {
    for (int it = 0; it < options.max_iterations; ++it) {
      if (flow.vortex_distance(z) < 1e-9 * a) return std::nullopt;
      const Complex f = flow.conj_velocity(z);
      if (std::abs(f) < options.converge_tol * scale) return z;
      const Complex df = flow.conj_velocity_derivative(z);
      if (df == Complex{0.0, 0.0} || !std::isfinite(std::abs(df))) return std::nullopt;
      Complex step = f / df;
      if (const double s = std::abs(step); s > max_step) step *= max_step / s;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
    }
    if (flow.vortex_distance(z) >= 1e-9 * a && std::abs(flow.conj_velocity(z)) < options.accept_tol * scale) return z;
  } catch (const NumericalError&) {
  }
  return std::nullopt;
}

StagnationPoint classify_stagnation_point(const FlowModel& flow, Complex z, const StagnationSearchOptions& options) {
  const double s = options.hessian_step * flow.length_scale;
  const auto psi = flow.stream_function;
  const double p0 = psi(z);
  const double pxx = (psi(z + s) - 2.0 * p0 + psi(z - s)) / (s * s);
  const double pyy = (psi(z + kI * s) - 2.0 * p0 + psi(z - kI * s)) / (s * s);
  const double pxy =
      (psi(z + s + kI * s) - psi(z + s - kI * s) - psi(z - s + kI * s) + psi(z - s - kI * s)) / (4.0 * s * s);

  StagnationPoint point;
  point.position = z;
  point.psi = p0;
  point.residual = std::abs(flow.conj_velocity(z));
  point.hessian_det = pxx * pyy - pxy * pxy;
  point.kind = point.hessian_det < 0.0 ? StagnationKind::saddle : StagnationKind::center;
  if (point.kind == StagnationKind::saddle) {
    // Linear flow conj(A dz): outflow along arg(dz) = -arg(A)/2.
    const double theta = std::arg(flow.conj_velocity_derivative(z));
    point.unstable_direction = std::polar(1.0, -0.5 * theta);
    point.stable_direction = kI * point.unstable_direction;
  }
  return point;
}

std::vector<StagnationPoint> find_stagnation_points(const FlowModel& flow, const SearchRegion& region, Complex cell,
                                                    const StagnationSearchOptions& options) {
  if (!(region.x_min < region.x_max) || !(region.y_min < region.y_max))
    throw ValidationError("search region must satisfy min < max");
  if (cell.real() <= 0.0 || cell.imag() <= 0.0) throw ValidationError("seed cell must be positive");
  if (options.seeds_per_cell < 1) throw ValidationError("seeds_per_cell must be positive");

  auto points = search_once(flow, region, cell, options, options.seeds_per_cell);
  if (!options.check_refinement) return points;
  auto finer = search_once(flow, region, cell, options, 2 * options.seeds_per_cell);
  if (finer.size() != points.size())
    throw ConvergenceError("stagnation point count changed under seed refinement (" + std::to_string(points.size()) +
                           " vs " + std::to_string(finer.size()) + ")");
  return finer;
}

std::vector<StagnationPoint> find_stagnation_points(const StreetParams& params, double y_min, double y_max,
                                                    const StagnationSearchOptions& options) {
  params.validate();
  const double reliable = params.big_n * params.h / 4.0;
  if (std::abs(y_min) > reliable || std::abs(y_max) > reliable)
    throw ValidationError("search window must satisfy |y| <= N h / 4");
  const auto flow = lattice_flow(params, array_speed(params).u);
  return find_stagnation_points(flow, {0.0, params.a, y_min, y_max}, {params.a, params.h}, options);
}

SeparatrixPath trace_separatrix(const FlowModel& flow, const StagnationPoint& saddle, const TraceOptions& options) {
  if (saddle.kind != StagnationKind::saddle) throw ValidationError("separatrices start from saddles only");
  using State = std::array<double, 2>;
  const double a = flow.length_scale;
  const double psi0 = saddle.psi;

  auto system = [&flow](const State& x, State& dxdt, double) {
    const Complex v = std::conj(flow.conj_velocity({x[0], x[1]}));
    const double speed = std::abs(v);
    if (speed == 0.0) {
      dxdt = {0.0, 0.0};
      return;
    }
    dxdt = {v.real() / speed, v.imag() / speed};
  };

  auto project = [&](Complex z) {
    const Complex g = stream_gradient(flow.conj_velocity(z));
    const double g2 = std::norm(g);
    if (g2 < 1e-16) return z;
    const double err = flow.stream_function(z) - psi0;
    const Complex shift = err * g / g2;
    return std::abs(shift) < 1e-3 * a ? z - shift : z;
  };

  auto trace_branch = [&](double sign, std::vector<Complex>& out, double& arc) {
    Complex z = saddle.position + sign * options.offset * a * saddle.unstable_direction;
    out.push_back(z);
    auto stepper = odeint::make_controlled<odeint::runge_kutta_cash_karp54<State>>(options.step_tol, options.step_tol);
    double s = 0.0;
    double ds = 1e-6 * a;
    bool left_start = false;
    const double max_step = options.max_step * a;
    long guard = 0;
    while (true) {
      if (s >= options.arc_budget * a) return TraceEnd::budget_exhausted;
      if (++guard > 2'000'000) return TraceEnd::budget_exhausted;
      State x{z.real(), z.imag()};
      double s_try = s;
      ds = std::min(ds, max_step);
      if (stepper.try_step(system, x, s_try, ds) != odeint::success) continue;
      const Complex prev = z;
      z = project({x[0], x[1]});
      arc += std::abs(z - prev);
      s = s_try;
      out.push_back(z);

      if (!left_start && std::abs(z - saddle.position) > 100.0 * options.closure_tol * a) left_start = true;
      const double tol = options.closure_tol * a;
      if (flow.x_period) {
        const double period = *flow.x_period;
        const double m0 = std::round((z.real() - saddle.position.real()) / period);
        for (double m = m0 - 1.0; m <= m0 + 1.0; m += 1.0) {
          if (m == 0.0 && !left_start) continue;
          if (segment_distance(prev, z, saddle.position + m * period) < tol) return TraceEnd::closed;
        }
      } else if (left_start && segment_distance(prev, z, saddle.position) < tol) {
        return TraceEnd::closed;
      }
      for (Complex target : options.targets)
        if (left_start && segment_distance(prev, z, target) < tol) return TraceEnd::closed;
      if (flow.vortex_distance(z) < options.vortex_stop * a) return TraceEnd::vortex_approach;
    }
  };

  SeparatrixPath path;
  path.origin = saddle;
  std::vector<Complex> plus;
  std::vector<Complex> minus;
  double arc = 0.0;
  path.ends[0] = trace_branch(-1.0, minus, arc);
  path.ends[1] = trace_branch(+1.0, plus, arc);
  path.arc_length = arc;
  path.polyline.assign(minus.rbegin(), minus.rend());
  path.polyline.push_back(saddle.position);
  path.polyline.insert(path.polyline.end(), plus.begin(), plus.end());
  return path;
}

std::set<int> streets_visited(const std::vector<Complex>& polyline, const StreetParams& p) {
  std::set<int> streets;
  if (polyline.empty()) return streets;
  double y_lo = polyline.front().imag();
  double y_hi = y_lo;
  for (Complex z : polyline) {
    y_lo = std::min(y_lo, z.imag());
    y_hi = std::max(y_hi, z.imag());
  }
  // Street n owns the rows y = n h and y = b + n h; a path that reaches one
  // of those levels has passed between that street's vortices.
  const int first = std::max(-p.big_n, static_cast<int>(std::ceil((y_lo - p.b) / p.h)));
  const int last = std::min(p.big_n, static_cast<int>(std::floor(y_hi / p.h)));
  for (int n = first; n <= last; ++n) streets.insert(n);
  return streets;
}

SeparatrixPath trace_separatrix(const StagnationPoint& saddle, const StreetParams& params, double u_frame,
                                double arc_budget) {
  TraceOptions options;
  options.arc_budget = arc_budget;
  auto path = trace_separatrix(lattice_flow(params, u_frame), saddle, options);
  path.streets_visited = streets_visited(path.polyline, params);
  return path;
}

SaddleLevels saddle_levels(const StreetParams& params, const SaddleLevels* previous) {
  params.validate();
  const double u = array_speed(params).u;
  const auto flow = lattice_flow(params, u);
  const StagnationSearchOptions options;

  SaddleLevels levels;
  levels.u_frame = u;
  levels.drift = params.gamma * params.b / params.a - u * params.h;

  auto accept = [&](Complex lower, Complex upper) {
    lower.real(wrap_into(lower.real(), 0.0, params.a));
    upper.real(wrap_into(upper.real(), 0.0, params.a));
    levels.lower = classify_stagnation_point(flow, lower, options);
    levels.upper = classify_stagnation_point(flow, upper, options);
  };

  if (previous) {
    const auto lower = refine_stagnation_point(flow, previous->lower.position, options);
    const auto upper = refine_stagnation_point(flow, previous->upper.position, options);
    if (lower && upper && periodic_distance(*lower, *upper, params.a) > 1e-3 * params.a &&
        std::abs(*lower - previous->lower.position) < 0.1 * params.h &&
        std::abs(*upper - previous->upper.position) < 0.1 * params.h) {
      accept(*lower, *upper);
      if (levels.lower.kind == StagnationKind::saddle && levels.upper.kind == StagnationKind::saddle) return levels;
    }
  }

  const double centre = 0.5 * params.b;
  StagnationSearchOptions search = options;
  search.check_refinement = false;
  auto points =
      find_stagnation_points(flow, {0.0, params.a, centre - 0.5 * params.h, centre + 0.5 * params.h},
                             {params.a, params.h}, search);
  std::erase_if(points, [](const StagnationPoint& p) { return p.kind != StagnationKind::saddle; });
  if (points.size() != 2)
    throw ConvergenceError("expected two saddles per street cell, found " + std::to_string(points.size()));
  if (previous &&
      periodic_distance(points[0].position, previous->upper.position, params.a) <
          periodic_distance(points[0].position, previous->lower.position, params.a))
    std::swap(points[0], points[1]);
  levels.lower = points[0];
  levels.upper = points[1];
  return levels;
}

int level_class(const SaddleLevels& levels, double degenerate_tol) {
  if (std::abs(levels.drift) < degenerate_tol)
    throw DegenerateError("saddle levels of all streets coincide (zero level drift)");
  const double r = std::abs(levels.ratio());
  const double nearest = std::round(r);
  if (std::abs(std::abs(levels.upper.psi - levels.lower.psi) - nearest * std::abs(levels.drift)) < degenerate_tol)
    throw DegenerateError("two saddle levels coincide: parameters sit on a bifurcation");
  return static_cast<int>(std::floor(r)) + 1;
}

std::string region_label(int k) {
  if (k < 1) throw ValidationError("topology class must be positive");
  if (k <= 26) return std::string(1, static_cast<char>('A' + k - 1));
  return "k" + std::to_string(k);
}

TopologyClass topology_class(const StreetParams& params) {
  TopologyClass result;
  result.levels = saddle_levels(params);
  result.level_k = level_class(result.levels);
  const double budget = 40.0 * (result.level_k + 1) * std::max(1.0, params.h / params.a);
  int k = 0;
  for (const auto* s : {&result.levels.lower, &result.levels.upper}) {
    auto path = trace_separatrix(*s, params, result.levels.u_frame, budget);
    k = std::max(k, static_cast<int>(path.streets_visited.size()));
    result.separatrices.push_back(std::move(path));
  }
  result.k = std::max(k, 1);
  result.region_label = region_label(result.k);
  return result;
}

}  // namespace vlab
