#include "vlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "vlab/errors.hpp"
#include "vlab/field.hpp"
#include "vlab/parallel.hpp"

namespace vlab {

namespace {

namespace odeint = boost::numeric::odeint;
using std::numbers::pi;
using State = std::vector<double>;

constexpr Complex kI{0.0, 1.0};
constexpr std::size_t kParallelThreshold = 1024;

void velocities_into(const std::vector<Complex>& z, const std::vector<double>& strength, double floor,
                     std::vector<Complex>& out) {
  const std::size_t n = z.size();
  out.assign(n, Complex{0.0, 0.0});
  auto one = [&](std::size_t k) {
    Complex sum{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      const Complex d = z[k] - z[j];
      if (std::abs(d) < floor)
        throw CollisionError("near collision: vortices " + std::to_string(k) + " and " + std::to_string(j) +
                             " closer than the separation floor");
      sum += strength[j] / d;
    }
    out[k] = std::conj(sum / (2.0 * pi * kI));
  };
  if (n >= kParallelThreshold)
    parallel_for(n, one);
  else
    for (std::size_t k = 0; k < n; ++k) one(k);
}

State pack(const VortexSet& v) {
  State x(2 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    x[2 * i] = v.positions[i].real();
    x[2 * i + 1] = v.positions[i].imag();
  }
  return x;
}

SimState unpack(const State& x, double t, const VortexSet& like) {
  SimState s{t, like};
  for (std::size_t i = 0; i < like.size(); ++i) s.vortices.positions[i] = {x[2 * i], x[2 * i + 1]};
  return s;
}

struct VortexSystem {
  const std::vector<double>* strength;
  double floor;
  std::vector<Complex> z;
  std::vector<Complex> v;

  void operator()(const State& x, State& dxdt, double /*t*/) {
    const std::size_t n = strength->size();
    z.resize(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = {x[2 * i], x[2 * i + 1]};
    velocities_into(z, *strength, floor, v);
    dxdt.resize(x.size());
    for (std::size_t i = 0; i < n; ++i) {
      dxdt[2 * i] = v[i].real();
      dxdt[2 * i + 1] = v[i].imag();
    }
  }
};

std::vector<double> snapshot_schedule(double t0, double t_end, std::vector<double> times) {
  if (times.empty()) times = {t0, t_end};
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double t : times)
    if (t < t0 || t > t_end) throw ValidationError("snapshot times must lie within [t_start, t_end]");
  return times;
}

}  // namespace

ConservedQuantities conserved_quantities(const VortexSet& v) {
  ConservedQuantities q;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = v.strengths[i];
    const Complex z = v.positions[i];
    q.total_circulation += g;
    q.impulse += g * z;
    q.angular_impulse += g * std::norm(z);
    for (std::size_t j = i + 1; j < n; ++j)
      q.hamiltonian += g * v.strengths[j] * std::log(std::abs(z - v.positions[j]));
  }
  q.hamiltonian *= -1.0 / (2.0 * pi);
  return q;
}

std::vector<Complex> vortex_velocities(const VortexSet& vortices, double length_scale) {
  vortices.validate();
  std::vector<Complex> out;
  velocities_into(vortices.positions, vortices.strengths, kCollisionFloor * length_scale, out);
  return out;
}

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4-fixed" || name == "rk4") return Scheme::rk4_fixed;
  if (name == "rk45-adaptive" || name == "rk45") return Scheme::rk45_adaptive;
  throw ValidationError("unknown scheme '" + name + "' (expected rk4-fixed or rk45-adaptive)");
}

std::string to_string(Scheme scheme) { return scheme == Scheme::rk4_fixed ? "rk4-fixed" : "rk45-adaptive"; }

Trajectory integrate(const SimState& start, double t_end, const IntegrateOptions& options) {
  start.vortices.validate();
  if (!(options.dt > 0.0)) throw ValidationError("time step must be positive");
  if (!(t_end >= start.time)) throw ValidationError("t_end must not precede the start time");
  if (!(options.abs_tol > 0.0) || options.rel_tol < 0.0) throw ValidationError("tolerances must be positive");
  const auto schedule = snapshot_schedule(start.time, t_end, options.snapshot_times);

  VortexSystem system{&start.vortices.strengths, kCollisionFloor * options.length_scale, {}, {}};
  State x = pack(start.vortices);
  double t = start.time;

  Trajectory traj;
  auto record = [&](double when) {
    auto s = unpack(x, when, start.vortices);
    traj.conserved.push_back(conserved_quantities(s.vortices));
    traj.snapshots.push_back(std::move(s));
  };

  odeint::runge_kutta4<State> rk4;
  auto controlled = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(
      options.abs_tol * options.length_scale, options.rel_tol);
  double dt_next = options.dt;
  const double dt_min = 1e-14 * std::max(1.0, std::abs(t_end));

  try {
    for (double target : schedule) {
      while (t < target) {
        const double remaining = target - t;
        if (options.scheme == Scheme::rk4_fixed) {
          const double step = std::min(options.dt, remaining);
          State trial = x;
          rk4.do_step(system, trial, t, step);
          x = std::move(trial);
          t = remaining <= options.dt ? target : t + step;
          ++traj.steps;
          continue;
        }
        const bool truncated = dt_next >= remaining;
        double step = truncated ? remaining : dt_next;
        State trial = x;
        double t_trial = t;
        odeint::controlled_step_result result;
        try {
          result = controlled.try_step(system, trial, t_trial, step);
        } catch (const CollisionError&) {
          // Trial stages of an over-long step may pass through a close
          // encounter the true trajectory avoids; retry shorter.
          if (step * 0.25 < dt_min) throw;
          dt_next = step * 0.25;
          ++traj.rejected_steps;
          continue;
        }
        if (result == odeint::fail) {
          ++traj.rejected_steps;
          dt_next = step;
          if (dt_next < dt_min) throw ConvergenceError("adaptive step size underflow");
          continue;
        }
        x = std::move(trial);
        t = truncated ? target : t_trial;
        if (!truncated) dt_next = step;
        else dt_next = std::max(dt_next, step);
        ++traj.steps;
      }
      record(target);
    }
  } catch (const NumericalError& e) {
    // Near collisions, and step-size collapse as vortices close in.
    traj.completed = false;
    traj.message = std::string(e.what()) + " at t = " + std::to_string(t);
  }
  traj.last_state = unpack(x, t, start.vortices);
  return traj;
}

FlowModel comoving_flow(const VortexSet& vortices, const VortexLabel& reference, double length_scale,
                        double circulation_scale) {
  vortices.validate();
  const std::size_t ref = vortices.find(reference);
  const Complex frame = vortex_velocities(vortices, length_scale)[ref];
  FlowModel flow;
  flow.conj_velocity = [vortices, frame](Complex z) { return set_velocity(z, vortices) - std::conj(frame); };
  flow.conj_velocity_derivative = [vortices](Complex z) { return set_velocity_derivative(z, vortices); };
  flow.stream_function = [vortices, frame](Complex z) { return set_relative_stream_function(z, vortices, frame); };
  flow.vortex_distance = [vortices](Complex z) { return distance_to_set(z, vortices); };
  flow.length_scale = length_scale;
  flow.circulation_scale = circulation_scale;
  return flow;
}

FieldGrid comoving_snapshot(const SimState& state, const VortexLabel& reference, const Window& window, int nx,
                            int ny, double length_scale) {
  const auto flow = comoving_flow(state.vortices, reference, length_scale);
  return sample_grid(window, nx, ny, flow.stream_function, set_mask(state.vortices, length_scale));
}

std::vector<SaddleGap> saddle_splitting_report(const SimState& state, const StreetParams& params,
                                               const VortexLabel& reference, int cells) {
  params.validate();
  if (cells < 1) throw ValidationError("cells must be positive");
  const auto infinite = saddle_levels(params);
  const auto flow = comoving_flow(state.vortices, reference, params.a, std::abs(params.gamma));
  const Complex origin = state.vortices.positions[state.vortices.find(reference)];

  struct Found {
    int m;
    Complex z;
    double psi;
  };
  std::vector<SaddleGap> report;
  for (const auto& [family, base] : {std::pair{'L', infinite.lower.position}, std::pair{'U', infinite.upper.position}}) {
    std::vector<Found> found;
    for (int m = -cells; m <= cells; ++m) {
      const Complex seed = origin + base + static_cast<double>(m) * params.a;
      const auto z = refine_stagnation_point(flow, seed);
      if (!z || std::abs(*z - seed) > 0.25 * params.a) continue;
      const auto point = classify_stagnation_point(flow, *z);
      if (point.kind != StagnationKind::saddle) continue;
      found.push_back({m, point.position, point.psi});
    }
    for (std::size_t i = 1; i < found.size(); ++i) {
      const auto& l = found[i - 1];
      const auto& r = found[i];
      if (r.m != l.m + 1) continue;
      report.push_back({family, l.m, r.m, l.z, r.z, l.psi, r.psi, std::abs(r.psi - l.psi)});
    }
  }
  return report;
}

ClusterReport cluster_diagnostic(const VortexSet& vortices, double max_separation, double coherence,
                                 double length_scale) {
  const auto v = vortex_velocities(vortices, length_scale);
  const std::size_t n = vortices.size();
  std::vector<std::size_t> nearest(n, n);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = std::abs(vortices.positions[i] - vortices.positions[j]);
      if (d < dist[i]) {
        dist[i] = d;
        nearest[i] = j;
      }
    }

  ClusterReport report;
  std::vector<bool> paired(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = nearest[i];
    if (j >= n || j < i || nearest[j] != i || dist[i] >= max_separation * length_scale) continue;
    const double mean_speed = 0.5 * (std::abs(v[i]) + std::abs(v[j]));
    VortexPair pair{i, j, dist[i], mean_speed > 0.0 ? std::abs(v[i] - v[j]) / mean_speed : 0.0};
    const bool opposite = vortices.strengths[i] * vortices.strengths[j] < 0.0;
    if (opposite) {
      if (pair.velocity_mismatch >= coherence) continue;
      report.dipoles.push_back(pair);
    } else {
      report.corotating.push_back(pair);
    }
    paired[i] = paired[j] = true;
  }
  report.isolated = static_cast<int>(std::count(paired.begin(), paired.end(), false));
  return report;
}

}  // namespace vlab
