#include <doctest.h>

#include <cmath>
#include <map>

#include "vlab/bifurcation.hpp"
#include "vlab/errors.hpp"
#include "vlab/topology.hpp"

using namespace vlab;

namespace {

StreetParams at(double b, double h) { return {1.0, b, h, 1.0, 150}; }

const BifurcationSequence& long_sequence(double b) {
  static std::map<double, BifurcationSequence> cache;
  auto it = cache.find(b);
  if (it == cache.end()) it = cache.emplace(b, bifurcation_sequence(b, 100)).first;
  return it->second;
}

}  // namespace

TEST_CASE("first three critical separations") {
  const double expected[] = {0.9598, 0.8568, 0.8096};
  const std::pair<double, double> brackets[] = {{0.9, 1.0}, {0.83, 0.9}, {0.8, 0.83}};
  for (int k = 1; k <= 3; ++k) {
    const auto point = find_bifurcation(0.2805, k, brackets[k - 1]);
    CHECK(point.k == k);
    CHECK(std::abs(point.h - expected[k - 1]) < 5e-3);
    CHECK(point.tolerance <= 1e-8);
    CHECK(std::abs(point.gap) < 1e-12);
    CHECK(point.gap_converged);
  }
}

TEST_CASE("invalid brackets") {
  CHECK_THROWS_AS(find_bifurcation(0.2805, 1, {0.97, 1.0}), InvalidBracketError);
  CHECK_THROWS_AS(find_bifurcation(0.2805, 1, {0.8, 1.0}), InvalidBracketError);
  CHECK_THROWS_AS(find_bifurcation(0.2805, 2, {0.9, 1.0}), InvalidBracketError);
  CHECK_THROWS_AS(find_bifurcation(0.2805, 1, {1.0, 0.9}), ValidationError);
  CHECK_THROWS_AS(find_bifurcation(0.2805, 1, {0.2, 1.0}), ValidationError);
}

TEST_CASE("bracket consistency around each critical separation") {
  const auto seq = bifurcation_sequence(0.2805, 6);
  seq.validate();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const double off = 10.0 * std::max(seq.tolerances[i], 1e-16);
    CHECK(level_class(saddle_levels(at(0.2805, seq.h_values[i] + off)), 1e-15) == k);
    CHECK(level_class(saddle_levels(at(0.2805, seq.h_values[i] - off)), 1e-15) == k + 1);
    // Separatrix tracing cannot resolve offsets that small; it is checked a little further out.
    CHECK(topology_class(at(0.2805, seq.h_values[i] + 1e-7)).k == k);
    CHECK(topology_class(at(0.2805, seq.h_values[i] - 1e-7)).k == k + 1);
  }
}

TEST_CASE("sequence decreases with shrinking gaps") {
  const auto& seq = long_sequence(0.2805);
  REQUIRE(seq.size() == 100);
  CHECK_NOTHROW(seq.validate());
  for (std::size_t i = 2; i < seq.size(); ++i) {
    CHECK(seq.h_values[i] < seq.h_values[i - 1]);
    CHECK(seq.h_values[i - 1] - seq.h_values[i] < seq.h_values[i - 2] - seq.h_values[i - 1]);
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq.tolerances[i] <= 1e-8);
    CHECK(std::abs(seq.gaps[i]) < (i < 50 ? 1e-12 : 1e-13));
  }
  // Successive gap ratios settle near 1 / delta.
  const double r = (seq.h_values[60] - seq.h_values[61]) / (seq.h_values[59] - seq.h_values[60]);
  CHECK(r < 1.0);
  CHECK(r > 0.95);
}

TEST_CASE("hundredth critical separation and scaling fits") {
  struct Row {
    double b, h100, c, delta;
  };
  const Row rows[] = {{0.1, 0.4852, 0.2291, 1.0323},
                      {0.2, 0.5110, 0.1766, 1.0326},
                      {0.2805, 0.5963, 0.1206, 1.0336},
                      {0.3, 0.6267, 0.1074, 1.0362},
                      {0.4, 0.8051, 0.0346, 1.0406}};
  for (const auto& row : rows) {
    const auto& seq = long_sequence(row.b);
    CHECK_MESSAGE(std::abs(seq.h_values.back() - row.h100) < 1e-2, "b = " << row.b);
    const auto fit = fit_scaling(seq);
    CHECK(fit.h_inf_proxy == seq.h_values.back());
    CHECK_MESSAGE(std::abs(fit.delta - row.delta) < 5e-3, "b = " << row.b);
    CHECK_MESSAGE(std::abs(fit.c - row.c) < 0.15 * row.c, "b = " << row.b);
    CHECK(fit.delta > 1.0);
    CHECK(fit.c > 0.0);
    CHECK(fit.rms_residual < 0.05);
  }
}

TEST_CASE("fit window sensitivity") {
  const auto& seq = long_sequence(0.2805);
  const double base = fit_scaling(seq).delta;
  for (int shift : {-5, 5}) {
    const std::pair<int, int> w{kDefaultFitWindow.first + shift, kDefaultFitWindow.second + shift};
    CHECK(std::abs(fit_scaling(seq, w).delta - base) < 3e-3);
  }
}

TEST_CASE("synthetic geometric sequence is recovered exactly") {
  const double big_h = 0.6, big_c = 0.13, big_d = 1.037;
  std::vector<double> hs;
  for (int k = 1; k <= 100; ++k) hs.push_back(big_h + big_c / std::pow(big_d, k));
  const auto fit = fit_scaling(hs, big_h, {10, 90});
  CHECK(std::abs(fit.c - big_c) < 1e-10);
  CHECK(std::abs(fit.delta - big_d) < 1e-10);
  CHECK(fit.rms_residual < 1e-10);
  CHECK(fit.fit_window == std::pair<int, int>{10, 90});
}

TEST_CASE("fit validation") {
  std::vector<double> hs;
  for (int k = 1; k <= 100; ++k) hs.push_back(0.6 + 0.1 / std::pow(1.03, k));
  CHECK_THROWS_AS(fit_scaling(hs, 0.7, {10, 60}), DegenerateError);
  CHECK_THROWS_AS(fit_scaling(hs, 0.6, {60, 10}), ValidationError);
  CHECK_THROWS_AS(fit_scaling(hs, 0.6, {0, 10}), ValidationError);
  CHECK_THROWS_AS(fit_scaling(hs, 0.6, {10, 101}), ValidationError);
  std::vector<double> growing;
  for (int k = 1; k <= 100; ++k) growing.push_back(0.6 + 0.1 * std::pow(1.03, k));
  CHECK_THROWS_AS(fit_scaling(growing, 0.6, {10, 60}), DegenerateError);
}

TEST_CASE("sequence argument validation") {
  CHECK_THROWS_AS(bifurcation_sequence(0.5, 3), DegenerateError);
  CHECK_THROWS_AS(bifurcation_sequence(0.2805, 101), ValidationError);
  CHECK_THROWS_AS(bifurcation_sequence(0.2805, 0), ValidationError);
  CHECK_THROWS_AS(bifurcation_sequence(0.6, 3), ValidationError);
  CHECK_THROWS_AS(bifurcation_sequence(-0.1, 3), ValidationError);
  BifurcationSequence bad{0.2, {0.9, 0.95}, {0.0, 0.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("bifurcation curves") {
  const auto grid = b_grid();
  REQUIRE(grid.size() == 23);
  CHECK(grid.front() == doctest::Approx(0.05));
  CHECK(grid.back() == 0.5);
  const auto curves = bifurcation_curves(grid, 5);
  REQUIRE(curves.points.size() == grid.size());
  CHECK(curves.points.back().status == "degenerate");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const auto& pt = curves.points[i];
    CHECK_MESSAGE(pt.status == "ok", "b = " << pt.b);
    for (int k = 1; k < 5; ++k) CHECK(*pt.h[k - 1] > *pt.h[k]);
  }
  for (int k = 1; k <= 5; ++k) {
    const auto c = curves.curve(k);
    CHECK(c.size() == grid.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].first > c[i - 1].first);
    CHECK(std::abs(extrapolate_to_square_lattice(curves, k) - 1.0) < 1e-2);
  }

  // Soft check: h_k(b) increasing in b over [0.1, 0.4].
  int dips = 0;
  for (int k = 1; k <= 5; ++k) {
    const auto c = curves.curve(k);
    for (std::size_t i = 1; i < c.size(); ++i)
      if (c[i - 1].first >= 0.1 - 1e-12 && c[i].first <= 0.4 + 1e-12 && c[i].second < c[i - 1].second) ++dips;
  }
  if (dips > 0) MESSAGE("h_k(b) decreases on " << dips << " grid steps within b in [0.1, 0.4]");
}

TEST_CASE("curve failures are recorded per point") {
  const auto curves = bifurcation_curves({0.2805, 0.5, 1e-6}, 2);
  CHECK(curves.points[0].status == "ok");
  CHECK(curves.points[0].h[1].has_value());
  CHECK(curves.points[1].status == "degenerate");
  CHECK(!curves.points[1].h[0].has_value());
  CHECK(curves.points[2].status != "ok");
  CHECK(!curves.points[2].h[0].has_value());
  CHECK(curves.curve(1).size() == 1);
  CHECK_THROWS_AS(extrapolate_to_square_lattice(curves, 1, 2), ValidationError);
  CHECK_THROWS_AS(bifurcation_curves({0.2805, 0.75}, 2), ValidationError);
}
