#include "vlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vlab/errors.hpp"

namespace vlab {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

void StreetParams::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("invalid street parameters: " + what); };
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(h) || !std::isfinite(gamma))
    fail("non-finite value");
  if (a <= 0.0) fail("a must be positive");
  if (h <= 0.0) fail("h must be positive");
  if (gamma == 0.0) fail("gamma must be non-zero");
  if (big_n < 0) fail("big_n must be non-negative");
  if (b <= 0.0) fail("b must be positive");
  if (b >= h) fail("b must be smaller than h");
}

void FiniteArraySpec::validate() const {
  if (n_streets <= 0) throw ValidationError("n_streets must be positive");
  if (n_streets % 2 == 0) throw ValidationError("n_streets must be odd");
  if (vortices_per_row < 1) throw ValidationError("vortices_per_row must be positive");
}

int VortexLabel::row_index() const {
  // p = 2m + 1 (odd) or p = 2m (even); floor division handles negative p.
  const int q = p % 2 == 0 ? p : p - 1;
  return q / 2;
}

double VortexSet::total_circulation() const {
  double total = 0.0;
  for (double s : strengths) total += s;
  return total;
}

std::size_t VortexSet::find(const VortexLabel& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end())
    throw ValidationError("no vortex with label (" + std::to_string(label.p) + ", " +
                          std::to_string(label.n) + ")");
  return static_cast<std::size_t>(it - labels.begin());
}

double VortexSet::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      best = std::min(best, std::abs(positions[i] - positions[j]));
  return best;
}

void VortexSet::validate() const {
  if (strengths.size() != positions.size())
    throw ValidationError("vortex set: positions and strengths differ in length");
  if (!labels.empty() && labels.size() != positions.size())
    throw ValidationError("vortex set: labels and positions differ in length");
  if (positions.size() > 1 && min_separation() <= 0.0)
    throw ValidationError("vortex set: coincident positions");
}

int centered_window_start(int count) { return -(count / 2); }

VortexSet build_finite_array(const StreetParams& params, const FiniteArraySpec& spec) {
  params.validate();
  spec.validate();
  const int half_streets = (spec.n_streets - 1) / 2;
  const int m0 = centered_window_start(spec.vortices_per_row);

  VortexSet out;
  const auto total = static_cast<std::size_t>(spec.n_streets) * 2 * spec.vortices_per_row;
  out.positions.reserve(total);
  out.strengths.reserve(total);
  out.labels.reserve(total);
  for (int n = -half_streets; n <= half_streets; ++n) {
    for (int m = m0; m < m0 + spec.vortices_per_row; ++m) {
      out.positions.emplace_back(m * params.a, n * params.h);
      out.strengths.push_back(-params.gamma);
      out.labels.push_back({2 * m + 1, n});

      out.positions.emplace_back((m + 0.5) * params.a, params.b + n * params.h);
      out.strengths.push_back(params.gamma);
      out.labels.push_back({2 * m, n});
    }
  }
  return out;
}

Nondimensionalized nondimensionalize(const StreetParams& params) {
  params.validate();
  StreetParams scaled = params;
  scaled.a = 1.0;
  scaled.gamma = 1.0;
  scaled.b = params.b / params.a;
  scaled.h = params.h / params.a;
  return {scaled, params.a, params.a * params.a / params.gamma};
}

double distance_to_lattice(Complex z, const StreetParams& p) {
  auto nearest_in_rows = [&](double x0, double y0) {
    // Rows at y0 + n h (n in [-N, N]), vortices at x0 + m a.
    const double x = z.real() - x0;
    const double y = z.imag() - y0;
    const double m = std::round(x / p.a);
    double n = std::round(y / p.h);
    n = std::clamp(n, -static_cast<double>(p.big_n), static_cast<double>(p.big_n));
    return std::hypot(x - m * p.a, y - n * p.h);
  };
  return std::min(nearest_in_rows(0.0, 0.0), nearest_in_rows(0.5 * p.a, p.b));
}

double distance_to_set(Complex z, const VortexSet& vortices) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : vortices.positions) best = std::min(best, std::abs(z - v));
  return best;
}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("missing config key: " + key);
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const auto& s = values_.at(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": not a number: " + s);
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const auto& s = values_.at(key);
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": not an integer: " + s);
  }
}

StreetParams Config::street_params(StreetParams d) const {
  d.a = get_double("a", d.a);
  d.b = get_double("b", d.b);
  d.h = get_double("h", d.h);
  d.gamma = get_double("gamma", d.gamma);
  d.big_n = get_int("big_n", d.big_n);
  return d;
}

FiniteArraySpec Config::array_spec(FiniteArraySpec d) const {
  d.n_streets = get_int("n_streets", d.n_streets);
  d.vortices_per_row = get_int("vortices_per_row", d.vortices_per_row);
  return d;
}

}  // namespace vlab
