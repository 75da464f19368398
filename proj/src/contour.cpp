#include "vlab/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "format.hpp"
#include "vlab/errors.hpp"

namespace vlab {

namespace {

// Grid edges are identified by 2 * node + direction (0: +x, 1: +y).
using EdgeId = std::size_t;

struct Segment {
  EdgeId from;
  EdgeId to;
  Complex p;
  Complex q;
};

Complex edge_point(const FieldGrid& g, EdgeId e, double level) {
  const auto node = e / 2;
  const int i = static_cast<int>(node % g.nx);
  const int j = static_cast<int>(node / g.nx);
  const bool vertical = e % 2 == 1;
  const int i2 = vertical ? i : i + 1;
  const int j2 = vertical ? j + 1 : j;
  const double v0 = g.at(i, j);
  const double v1 = g.at(i2, j2);
  const double t = v1 == v0 ? 0.5 : std::clamp((level - v0) / (v1 - v0), 0.0, 1.0);
  return {g.x(i) + t * (g.x(i2) - g.x(i)), g.y(j) + t * (g.y(j2) - g.y(j))};
}

std::vector<Segment> march(const FieldGrid& g, double level) {
  std::vector<Segment> segments;
  auto node = [&](int i, int j) { return static_cast<std::size_t>(j) * g.nx + i; };
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const std::array<double, 4> v{g.at(i, j), g.at(i + 1, j), g.at(i + 1, j + 1), g.at(i, j + 1)};
      if (std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); })) continue;
      int mask = 0;
      for (int c = 0; c < 4; ++c)
        if (v[c] >= level) mask |= 1 << c;
      if (mask == 0 || mask == 15) continue;

      // Cell edges in counter-clockwise order: bottom, right, top, left.
      const std::array<EdgeId, 4> edge{2 * node(i, j), 2 * node(i + 1, j) + 1, 2 * node(i, j + 1),
                                       2 * node(i, j) + 1};
      auto add = [&](int a, int b) {
        segments.push_back({edge[a], edge[b], edge_point(g, edge[a], level), edge_point(g, edge[b], level)});
      };
      const bool centre_high = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level;
      switch (mask) {
        case 1: case 14: add(3, 0); break;
        case 2: case 13: add(0, 1); break;
        case 3: case 12: add(3, 1); break;
        case 4: case 11: add(1, 2); break;
        case 6: case 9: add(0, 2); break;
        case 7: case 8: add(2, 3); break;
        case 5:
          if (centre_high) { add(0, 1); add(2, 3); } else { add(3, 0); add(1, 2); }
          break;
        case 10:
          if (centre_high) { add(3, 0); add(1, 2); } else { add(0, 1); add(2, 3); }
          break;
        default: break;
      }
    }
  }
  return segments;
}

std::string num(double v) { return detail::format_number(v, 6); }

}  // namespace

std::vector<Polyline> contour_lines(const FieldGrid& grid, double level) {
  grid.validate();
  const auto segments = march(grid, level);
  std::unordered_multimap<EdgeId, std::size_t> at_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    at_edge.emplace(segments[s].from, s);
    at_edge.emplace(segments[s].to, s);
  }
  std::vector<bool> used(segments.size(), false);
  auto next_segment = [&](EdgeId e) -> std::size_t {
    auto [lo, hi] = at_edge.equal_range(e);
    for (auto it = lo; it != hi; ++it)
      if (!used[it->second]) return it->second;
    return segments.size();
  };

  std::vector<Polyline> lines;
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    std::vector<Complex> forward{segments[s0].p, segments[s0].q};
    std::vector<Complex> backward;
    // Extend from the `to` end, then from the `from` end.
    for (int side = 0; side < 2; ++side) {
      EdgeId tip = side == 0 ? segments[s0].to : segments[s0].from;
      auto& out = side == 0 ? forward : backward;
      for (std::size_t s = next_segment(tip); s < segments.size(); s = next_segment(tip)) {
        used[s] = true;
        const bool along = segments[s].from == tip;
        out.push_back(along ? segments[s].q : segments[s].p);
        tip = along ? segments[s].to : segments[s].from;
      }
    }
    Polyline line(backward.rbegin(), backward.rend());
    line.insert(line.end(), forward.begin(), forward.end());
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<double> even_levels(const FieldGrid& grid, int count) {
  if (count < 1) throw ValidationError("level count must be positive");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : grid.values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> levels;
  if (!(lo < hi)) return levels;
  for (int i = 1; i <= count; ++i) levels.push_back(lo + (hi - lo) * i / (count + 1));
  return levels;
}

std::string render_contours(const FieldGrid& grid, const std::vector<double>& levels,
                            const std::vector<double>& highlight_levels, const RenderOptions& options) {
  grid.validate();
  if (options.width < 16) throw ValidationError("SVG width must be at least 16 pixels");
  const auto& w = grid.window;
  const double scale = options.width / (w.x_max - w.x_min);
  const int height = std::max(16, static_cast<int>(std::lround((w.y_max - w.y_min) * scale)));
  auto px = [&](Complex z) { return num((z.real() - w.x_min) * scale) + "," + num((w.y_max - z.imag()) * scale); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << options.width << ' ' << height << "\">\n";
  if (!options.title.empty()) svg << "<title>" << options.title << "</title>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double reach = 2.0 * std::hypot((w.x_max - w.x_min) / (grid.nx - 1), (w.y_max - w.y_min) / (grid.ny - 1));
  auto anchored = [&](const Polyline& line) {
    if (options.highlight_anchors.empty()) return true;
    for (Complex z : line)
      for (Complex s : options.highlight_anchors)
        if (std::abs(z - s) < reach) return true;
    return false;
  };
  auto draw = [&](double level, bool heavy) {
    const double stroke = heavy ? options.highlight_stroke : options.stroke;
    const char* colour = heavy ? "black" : "#4a4a4a";
    for (const auto& line : contour_lines(grid, level)) {
      if (line.size() < 2 || (heavy && !anchored(line))) continue;
      svg << "<path fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << num(stroke) << "\" d=\"M"
          << px(line.front());
      for (std::size_t k = 1; k < line.size(); ++k) svg << " L" << px(line[k]);
      svg << "\"/>\n";
    }
  };
  svg << "<g class=\"levels\">\n";
  for (double level : levels) draw(level, false);
  svg << "</g>\n<g class=\"highlight\">\n";
  for (double level : highlight_levels) draw(level, true);
  svg << "</g>\n<g class=\"vortices\">\n";
  for (const auto& v : options.vortices) {
    const Complex z = v.position;
    if (z.real() < w.x_min || z.real() > w.x_max || z.imag() < w.y_min || z.imag() > w.y_max) continue;
    const auto x = num((z.real() - w.x_min) * scale);
    const auto y = num((w.y_max - z.imag()) * scale);
    const char* fill = v.strength > 0.0 ? "#c0392b" : "#2c5aa0";
    svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << fill << "\"/>";
    svg << "<text x=\"" << x << "\" y=\"" << y << "\" dy=\"3\" font-size=\"8\" text-anchor=\"middle\" fill=\"white\">"
        << (v.strength > 0.0 ? "+" : "&#8722;") << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace vlab
