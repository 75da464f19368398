#include "vlab/grid.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "format.hpp"
#include "vlab/errors.hpp"
#include "vlab/parallel.hpp"

namespace vlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_resolution(int nx, int ny) {
  if (nx < 2 || ny < 2) throw ValidationError("grid resolution must be at least 2x2");
}

nlohmann::json json_values(const std::vector<double>& v) {
  auto out = nlohmann::json::array();
  for (double x : v) {
    if (std::isnan(x))
      out.push_back(nullptr);
    else
      out.push_back(detail::round_significant(x));
  }
  return out;
}

}  // namespace

void Window::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) throw ValidationError("window must satisfy min < max");
}

double FieldGrid::x(int i) const { return window.x_min + (window.x_max - window.x_min) * i / (nx - 1); }
double FieldGrid::y(int j) const { return window.y_min + (window.y_max - window.y_min) * j / (ny - 1); }

double FieldGrid::interpolate(double px, double py) const {
  const double fx = (px - window.x_min) / (window.x_max - window.x_min) * (nx - 1);
  const double fy = (py - window.y_min) / (window.y_max - window.y_min) * (ny - 1);
  if (fx < 0.0 || fy < 0.0 || fx > nx - 1 || fy > ny - 1) throw ValidationError("interpolation point outside grid");
  const int i = std::min(static_cast<int>(fx), nx - 2);
  const int j = std::min(static_cast<int>(fy), ny - 2);
  const double tx = fx - i;
  const double ty = fy - j;
  return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) + (1 - tx) * ty * at(i, j + 1) +
         tx * ty * at(i + 1, j + 1);
}

void FieldGrid::validate() const {
  window.validate();
  check_resolution(nx, ny);
  const auto n = static_cast<std::size_t>(nx) * ny;
  if (values.size() != n) throw ValidationError("grid values do not match nx*ny");
  if (!vx.empty() && (vx.size() != n || vy.size() != n)) throw ValidationError("grid components do not match nx*ny");
}

FieldGrid sample_grid(const Window& window, int nx, int ny, const ScalarField& evaluator, const MaskPredicate& masked) {
  window.validate();
  check_resolution(nx, ny);
  FieldGrid grid{window, nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny), {}, {}};
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t j) {
    for (int i = 0; i < nx; ++i) {
      const Complex z{grid.x(i), grid.y(static_cast<int>(j))};
      grid.values[j * nx + i] = (masked && masked(z)) ? kNaN : evaluator(z);
    }
  });
  return grid;
}

FieldGrid sample_vector_grid(const Window& window, int nx, int ny, const VectorField& evaluator,
                             const MaskPredicate& masked) {
  window.validate();
  check_resolution(nx, ny);
  const auto n = static_cast<std::size_t>(nx) * ny;
  FieldGrid grid{window, nx, ny, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t j) {
    for (int i = 0; i < nx; ++i) {
      const Complex z{grid.x(i), grid.y(static_cast<int>(j))};
      const auto k = j * nx + i;
      if (masked && masked(z)) {
        grid.values[k] = grid.vx[k] = grid.vy[k] = kNaN;
        continue;
      }
      const Complex v = evaluator(z);
      grid.values[k] = std::abs(v);
      grid.vx[k] = v.real();
      grid.vy[k] = v.imag();
    }
  });
  return grid;
}

MaskPredicate lattice_mask(const StreetParams& params) {
  return [params](Complex z) { return distance_to_lattice(z, params) < kMaskRadius * params.a; };
}

MaskPredicate set_mask(const VortexSet& vortices, double length_scale) {
  return [vortices, length_scale](Complex z) { return distance_to_set(z, vortices) < kMaskRadius * length_scale; };
}

void write_csv(std::ostream& out, const FieldGrid& grid) {
  grid.validate();
  out << (grid.is_vector() ? "x,y,value,vx,vy\n" : "x,y,value\n");
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const auto k = static_cast<std::size_t>(j) * grid.nx + i;
      out << detail::format_number(grid.x(i)) << ',' << detail::format_number(grid.y(j)) << ','
          << detail::format_number(grid.values[k]);
      if (grid.is_vector()) out << ',' << detail::format_number(grid.vx[k]) << ',' << detail::format_number(grid.vy[k]);
      out << '\n';
    }
  }
}

void write_json(std::ostream& out, const FieldGrid& grid) {
  grid.validate();
  nlohmann::json doc;
  doc["window"] = {{"x_min", grid.window.x_min},
                   {"x_max", grid.window.x_max},
                   {"y_min", grid.window.y_min},
                   {"y_max", grid.window.y_max}};
  doc["nx"] = grid.nx;
  doc["ny"] = grid.ny;
  doc["layout"] = "row-major, x fastest; masked cells are null";
  doc["values"] = json_values(grid.values);
  if (grid.is_vector()) {
    doc["vx"] = json_values(grid.vx);
    doc["vy"] = json_values(grid.vy);
  }
  out << doc.dump() << '\n';
}

}  // namespace vlab
