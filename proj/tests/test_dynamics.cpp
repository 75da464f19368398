#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vlab/dynamics.hpp"
#include "vlab/equilibrium.hpp"
#include "vlab/errors.hpp"
#include "vlab/field.hpp"

using namespace vlab;
using std::numbers::pi;

namespace {

constexpr Complex kI{0.0, 1.0};

VortexSet make_set(std::vector<Complex> z, std::vector<double> g) {
  VortexSet s;
  for (std::size_t k = 0; k < z.size(); ++k) {
    s.positions.push_back(z[k]);
    s.strengths.push_back(g[k]);
    s.labels.push_back({static_cast<int>(2 * k), 0});
  }
  return s;
}

VortexSet dipole(double d) { return make_set({{-0.5 * d, 0.0}, {0.5 * d, 0.0}}, {1.0, -1.0}); }
VortexSet corotating(double d) { return make_set({{-0.5 * d, 0.0}, {0.5 * d, 0.0}}, {1.0, 1.0}); }

StreetParams reference_params() { return {1.0, 0.2805, 1.2, 1.0, 5}; }

double max_distance(const VortexSet& a, const VortexSet& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a.positions[k] - b.positions[k]));
  return worst;
}

}  // namespace

TEST_CASE("dipole translates perpendicular to its axis") {
  const double d = 0.4;
  const auto v = vortex_velocities(dipole(d));
  const Complex expected = kI * (1.0 / (2.0 * pi * d));
  CHECK(std::abs(v[0] - expected) < 1e-15);
  CHECK(std::abs(v[1] - expected) < 1e-15);
}

TEST_CASE("co-rotating pair turns counter-clockwise") {
  const double d = 0.4;
  const auto v = vortex_velocities(corotating(d));
  const double speed = 1.0 / (2.0 * pi * d);
  CHECK(std::abs(v[0] - (-kI * speed)) < 1e-15);
  CHECK(std::abs(v[1] - kI * speed) < 1e-15);
}

TEST_CASE("vortex velocities agree with the induced field of the others") {
  const auto set = build_finite_array(reference_params(), {3, 4});
  const auto v = vortex_velocities(set);
  for (std::size_t k = 0; k < set.size(); ++k) {
    VortexSet others = set;
    others.positions.erase(others.positions.begin() + static_cast<long>(k));
    others.strengths.erase(others.strengths.begin() + static_cast<long>(k));
    others.labels.erase(others.labels.begin() + static_cast<long>(k));
    CHECK(std::abs(v[k] - velocity_from_conjugate(set_velocity(set.positions[k], others))) < 1e-13);
  }
}

TEST_CASE("middle vortex of a finite array approaches the array speed") {
  const auto p = reference_params();
  const double u = array_speed(p).u;
  std::vector<double> err;
  for (int per_row : {10, 40, 160, 640}) {
    const auto set = build_finite_array(p, {11, per_row});
    const auto v = vortex_velocities(set);
    err.push_back(std::abs(v[set.find({1, 0})] - u));
  }
  for (std::size_t k = 1; k < err.size(); ++k) CHECK(err[k] < err[k - 1]);
  // Row truncation error falls off like 1 / vortices_per_row.
  CHECK(err[3] / err[2] == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("dipole integration is exact translation") {
  const double d = 0.4;
  IntegrateOptions opts;
  const auto traj = integrate({0.0, dipole(d)}, 10.0, opts);
  REQUIRE(traj.completed);
  const Complex shift = kI * (10.0 / (2.0 * pi * d));
  CHECK(std::abs(traj.last_state.vortices.positions[0] - (Complex{-0.5 * d, 0.0} + shift)) < 1e-8);
  CHECK(std::abs(traj.last_state.vortices.positions[1] - (Complex{0.5 * d, 0.0} + shift)) < 1e-8);
  CHECK(traj.last_state.time == 10.0);
}

TEST_CASE("co-rotating pair returns after one period") {
  const double d = 0.4;
  const double period = 2.0 * pi * pi * d * d;
  const auto start = corotating(d);
  const auto traj = integrate({0.0, start}, period);
  REQUIRE(traj.completed);
  CHECK(max_distance(traj.last_state.vortices, start) < 1e-6 * d);
}

TEST_CASE("fixed-step RK4 converges at fourth order") {
  const double d = 0.4;
  const double period = 2.0 * pi * pi * d * d;
  const auto start = corotating(d);
  const auto error_with = [&](int steps) {
    IntegrateOptions opts;
    opts.scheme = Scheme::rk4_fixed;
    opts.dt = period / steps;
    return max_distance(integrate({0.0, start}, period, opts).last_state.vortices, start);
  };
  const double e1 = error_with(40);
  const double e2 = error_with(80);
  const double e3 = error_with(160);
  const double order1 = std::log2(e1 / e2);
  const double order2 = std::log2(e2 / e3);
  CHECK(order1 > 3.8);
  CHECK(order1 < 4.2);
  CHECK(order2 > 3.8);
  CHECK(order2 < 4.2);
}

TEST_CASE("conserved quantities") {
  const double d = 0.4;
  const auto q = conserved_quantities(dipole(d));
  CHECK(q.total_circulation == 0.0);
  CHECK(std::abs(q.impulse - Complex{-d, 0.0}) < 1e-15);
  CHECK(q.hamiltonian == doctest::Approx(std::log(d) / (2.0 * pi)));
  CHECK(q.angular_impulse == doctest::Approx(0.0));

  const auto single = conserved_quantities(make_set({{0.3, 0.1}}, {2.0}));
  CHECK(single.hamiltonian == 0.0);
  CHECK(single.total_circulation == 2.0);
  CHECK(single.angular_impulse == doctest::Approx(2.0 * 0.1));

  const auto array = build_finite_array(reference_params(), {11, 10});
  CHECK(conserved_quantities(array).total_circulation == 0.0);
}

TEST_CASE("short run of the 220-vortex array keeps its first integrals") {
  const auto set = build_finite_array(reference_params(), {11, 10});
  REQUIRE(set.size() == 220);
  IntegrateOptions opts;
  opts.snapshot_times = {0.0, 1.0, 2.0};
  const auto traj = integrate({0.0, set}, 2.0, opts);
  REQUIRE(traj.completed);
  REQUIRE(traj.snapshots.size() == 3);
  REQUIRE(traj.conserved.size() == 3);
  const auto& q0 = traj.conserved.front();
  for (const auto& q : traj.conserved) {
    CHECK(std::abs(q.hamiltonian - q0.hamiltonian) < 1e-6 * std::abs(q0.hamiltonian));
    CHECK(std::abs(q.impulse - q0.impulse) < 1e-8);
    CHECK(std::abs(q.angular_impulse - q0.angular_impulse) < 1e-6 * std::abs(q0.angular_impulse));
    CHECK(q.total_circulation == 0.0);
  }
  CHECK(traj.snapshots[1].time == 1.0);
  CHECK(traj.snapshots[1].vortices.strengths == set.strengths);
}

TEST_CASE("reversing the circulations retraces the motion") {
  const auto set = build_finite_array(reference_params(), {3, 4});
  const auto forward = integrate({0.0, set}, 3.0);
  REQUIRE(forward.completed);
  SimState back = forward.last_state;
  for (double& g : back.vortices.strengths) g = -g;
  const auto backward = integrate(back, 6.0);
  REQUIRE(backward.completed);
  CHECK(max_distance(backward.last_state.vortices, set) < 1e-5);
}

TEST_CASE("translating the initial state translates the trajectory") {
  const auto set = build_finite_array(reference_params(), {3, 4});
  auto shifted = set;
  const Complex c{0.25, -0.5};
  for (Complex& z : shifted.positions) z += c;
  IntegrateOptions opts;
  opts.scheme = Scheme::rk4_fixed;
  opts.dt = 1e-2;
  const auto a = integrate({0.0, set}, 1.0, opts);
  const auto b = integrate({0.0, shifted}, 1.0, opts);
  for (std::size_t k = 0; k < set.size(); ++k)
    CHECK(std::abs(b.last_state.vortices.positions[k] - a.last_state.vortices.positions[k] - c) < 1e-12);
}

TEST_CASE("near collisions stop the run") {
  const auto set = make_set({{0.0, 0.0}, {1e-9, 0.0}}, {1.0, -1.0});
  CHECK_THROWS_AS(vortex_velocities(set), CollisionError);

  // Three vortices (2, 2, -1) with l23^2 + l31^2 = 2 l12^2 collapse
  // self-similarly in finite time for this orientation.
  const double l31 = 0.8;
  const double x = (l31 * l31 - 1.36 + 1.0) / 2.0;
  const auto triple = make_set({{0.0, 0.0}, {1.0, 0.0}, {x, -std::sqrt(l31 * l31 - x * x)}}, {2.0, 2.0, -1.0});
  IntegrateOptions opts;
  opts.length_scale = 100.0;
  const auto traj = integrate({0.0, triple}, 10.0, opts);
  CHECK(!traj.completed);
  CHECK(traj.message.find("collision") != std::string::npos);
  CHECK(traj.last_state.time < 10.0);
  CHECK(traj.last_state.vortices.min_separation() >= kCollisionFloor * opts.length_scale);
  CHECK(traj.last_state.vortices.min_separation() < 1e-3);

  // With the default floor the adaptive step gives out first; the run still
  // ends cleanly.
  const auto tight = integrate({0.0, triple}, 10.0);
  CHECK(!tight.completed);
  CHECK(tight.last_state.time < 10.0);
}

TEST_CASE("integration options are validated") {
  const auto set = dipole(0.4);
  IntegrateOptions opts;
  opts.dt = 0.0;
  CHECK_THROWS_AS(integrate({0.0, set}, 1.0, opts), ValidationError);
  CHECK_THROWS_AS(integrate({1.0, set}, 0.5), ValidationError);
  opts.dt = 0.1;
  opts.snapshot_times = {0.5, 2.0};
  CHECK_THROWS_AS(integrate({0.0, set}, 1.0, opts), ValidationError);
}

TEST_CASE("scheme names") {
  CHECK(parse_scheme("rk4-fixed") == Scheme::rk4_fixed);
  CHECK(parse_scheme("rk4") == Scheme::rk4_fixed);
  CHECK(parse_scheme("rk45-adaptive") == Scheme::rk45_adaptive);
  CHECK(parse_scheme("rk45") == Scheme::rk45_adaptive);
  CHECK(to_string(Scheme::rk4_fixed) == "rk4-fixed");
  CHECK_THROWS_AS(parse_scheme("euler"), ValidationError);
}

TEST_CASE("co-moving snapshot uses the reference vortex velocity") {
  const auto set = build_finite_array(reference_params(), {3, 4});
  const VortexLabel ref{1, 0};
  const Complex frame = vortex_velocities(set)[set.find(ref)];
  const auto grid = comoving_snapshot({0.0, set}, ref, {-0.5, 0.5, -0.5, 0.5}, 11, 11);
  CHECK(std::isnan(grid.at(5, 5)));
  const Complex z{grid.x(3), grid.y(7)};
  CHECK(grid.at(3, 7) == doctest::Approx(set_relative_stream_function(z, set, frame)).epsilon(1e-12));
  CHECK_THROWS_AS(comoving_snapshot({0.0, set}, {99, 0}, {-0.5, 0.5, -0.5, 0.5}, 11, 11), ValidationError);
}

TEST_CASE("finite arrays split the heteroclinic saddle levels") {
  const auto p = reference_params();
  double prev_max = 1e300;
  for (int per_row : {10, 20, 40}) {
    const auto set = build_finite_array(p, {11, per_row});
    const auto gaps = saddle_splitting_report({0.0, set}, p);
    REQUIRE(!gaps.empty());
    double worst = 0.0;
    for (const auto& g : gaps) {
      CHECK(g.gap > 1e-8);
      CHECK(std::abs(g.m_right - g.m_left) == 1);
      worst = std::max(worst, g.gap);
    }
    CHECK(worst < prev_max);
    prev_max = worst;
  }
}

TEST_CASE("cluster diagnostic on synthetic sets") {
  // An isolated dipole far from a co-rotating pair and a lone vortex.
  const auto set = make_set({{0.0, 0.0}, {0.2, 0.0}, {10.0, 0.0}, {10.2, 0.0}, {-10.0, 5.0}},
                            {1.0, -1.0, 1.0, 1.0, 1.0});
  const auto report = cluster_diagnostic(set);
  REQUIRE(report.dipoles.size() == 1);
  CHECK(report.dipoles[0].separation == doctest::Approx(0.2));
  CHECK(report.dipoles[0].velocity_mismatch < 0.05);
  CHECK(report.corotating.size() == 1);
  CHECK(report.isolated == 1);

  // A regular street at t = 0 contains no dipoles.
  const auto street = build_finite_array(reference_params(), {11, 10});
  CHECK(cluster_diagnostic(street).dipoles.empty());
}
