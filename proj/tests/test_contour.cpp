#include <doctest.h>

#include <cmath>
#include <regex>

#include "vlab/contour.hpp"
#include "vlab/errors.hpp"

using namespace vlab;

namespace {

std::size_t count_of(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("constant grid has no contours") {
  const auto grid = sample_grid({0.0, 1.0, 0.0, 1.0}, 5, 5, [](Complex) { return 1.0; });
  CHECK(contour_lines(grid, 0.5).empty());
  CHECK(contour_lines(grid, 1.5).empty());
  CHECK(even_levels(grid, 4).empty());
}

TEST_CASE("linear ramp gives one straight line") {
  const auto grid = sample_grid({0.0, 1.0, 0.0, 2.0}, 11, 21, [](Complex z) { return z.real() + 0.5 * z.imag(); });
  const auto lines = contour_lines(grid, 0.7);
  REQUIRE(lines.size() == 1);
  const auto& line = lines[0];
  CHECK(line.size() >= 2);
  for (Complex z : line) CHECK(std::abs(z.real() + 0.5 * z.imag() - 0.7) < 1e-12);
  CHECK(std::abs(line.front() - line.back()) > 0.5);
}

TEST_CASE("circle is a closed curve") {
  const auto grid = sample_grid({-1.0, 1.0, -1.0, 1.0}, 81, 81, [](Complex z) { return std::norm(z); });
  const auto lines = contour_lines(grid, 0.25);
  REQUIRE(lines.size() == 1);
  const auto& circle = lines[0];
  CHECK(circle.front() == circle.back());
  for (Complex z : circle) CHECK(std::abs(std::abs(z) - 0.5) < 2e-3);
  double area = 0.0;
  for (std::size_t k = 1; k < circle.size(); ++k)
    area += 0.5 * (circle[k - 1].real() * circle[k].imag() - circle[k].real() * circle[k - 1].imag());
  CHECK(std::abs(area) == doctest::Approx(3.14159265 * 0.25).epsilon(2e-3));
}

TEST_CASE("masked cells break contours") {
  const auto ramp = [](Complex z) { return z.real(); };
  const auto masked = sample_grid({0.0, 1.0, 0.0, 1.0}, 11, 11, ramp, [](Complex z) { return std::abs(z.imag() - 0.5) < 0.01; });
  const auto lines = contour_lines(masked, 0.45);
  CHECK(lines.size() == 2);
  for (const auto& line : lines)
    for (Complex z : line) CHECK(std::abs(z.imag() - 0.5) >= 0.1 - 1e-12);
}

TEST_CASE("even levels lie strictly inside the finite range") {
  auto grid = sample_grid({0.0, 1.0, 0.0, 1.0}, 3, 3, [](Complex z) { return z.real(); });
  grid.values[4] = std::nan("");
  const auto levels = even_levels(grid, 3);
  REQUIRE(levels.size() == 3);
  CHECK(levels[0] == doctest::Approx(0.25));
  CHECK(levels[1] == doctest::Approx(0.5));
  CHECK(levels[2] == doctest::Approx(0.75));
  CHECK_THROWS_AS(even_levels(grid, 0), ValidationError);
}

TEST_CASE("svg rendering") {
  const auto grid = sample_grid({-1.0, 1.0, -1.0, 1.0}, 41, 41, [](Complex z) { return std::norm(z); });
  RenderOptions opts;
  opts.title = "rings";
  opts.vortices = {{{0.0, 0.0}, 1.0}, {{0.3, 0.3}, -1.0}, {{5.0, 5.0}, 1.0}};
  const auto svg = render_contours(grid, {0.1, 0.4}, {0.25}, opts);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<title>rings</title>") != std::string::npos);
  CHECK(count_of(svg, "<path") == 3);
  CHECK(count_of(svg, "stroke-width=\"2.4\"") == 1);
  CHECK(count_of(svg, "<circle") == 2);
  CHECK(svg == render_contours(grid, {0.1, 0.4}, {0.25}, opts));

  // No number carries more than 6 significant digits.
  const std::regex long_number("[0-9]\\.?[0-9]{7,}");
  CHECK(!std::regex_search(svg, long_number));
}

TEST_CASE("anchors restrict the heavy stroke") {
  // Two separate rings at the same level; only the anchored one is drawn.
  const auto grid = sample_grid({-2.0, 2.0, -1.0, 1.0}, 161, 81, [](Complex z) {
    return std::min(std::norm(z - 1.0), std::norm(z + 1.0));
  });
  RenderOptions opts;
  opts.highlight_anchors = {{1.5, 0.0}};
  const auto svg = render_contours(grid, {}, {0.25}, opts);
  CHECK(count_of(svg, "<path") == 1);
  CHECK(count_of(svg, "stroke-width=\"2.4\"") == 1);
}
