#ifndef VLAB_LATTICE_HPP
#define VLAB_LATTICE_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace vlab {

using Complex = std::complex<double>;

/// Geometry of an array of staggered streets.
///
/// Negative vortices sit at m*a + n*h*i, positive ones at
/// (m + 1/2)*a + (b + n*h)*i. Street index n runs over -big_n..big_n.
struct StreetParams {
  double a = 1.0;       ///< spacing along a row
  double b = 0.2805;    ///< row separation inside one street
  double h = 1.2;       ///< street-to-street separation
  double gamma = 1.0;   ///< circulation magnitude
  int big_n = 150;      ///< street truncation half-count

  /// Throws ValidationError unless a > 0, h > 0, gamma != 0, big_n >= 0
  /// and 0 < b < h.
  void validate() const;

  [[nodiscard]] int street_count() const { return 2 * big_n + 1; }
};

struct FiniteArraySpec {
  int n_streets = 11;
  int vortices_per_row = 10;

  void validate() const;
};

/// Index pair (p, n): p odd for the -Gamma row (p = 2m+1), even for the
/// +Gamma row (p = 2m); n is the street.
struct VortexLabel {
  int p = 0;
  int n = 0;

  [[nodiscard]] int row_index() const;  ///< m
  [[nodiscard]] bool positive() const { return p % 2 == 0; }
  friend bool operator==(const VortexLabel&, const VortexLabel&) = default;
};

struct VortexSet {
  std::vector<Complex> positions;
  std::vector<double> strengths;
  std::vector<VortexLabel> labels;

  [[nodiscard]] std::size_t size() const { return positions.size(); }
  [[nodiscard]] double total_circulation() const;
  /// Index of the vortex with the given label; throws ValidationError if absent.
  [[nodiscard]] std::size_t find(const VortexLabel& label) const;
  /// Smallest pairwise distance (infinity for fewer than two vortices).
  [[nodiscard]] double min_separation() const;
  /// Throws ValidationError when sizes disagree or two positions coincide.
  void validate() const;
};

/// First row index of the centred window of `count` vortices. The window is
/// {first, ..., first + count - 1} with first = -floor(count/2), so m = 0
/// (the -Gamma vortex at the origin) is always present.
int centered_window_start(int count);

/// Truncated array: n_streets streets of 2*vortices_per_row vortices each.
VortexSet build_finite_array(const StreetParams& params, const FiniteArraySpec& spec);

struct Nondimensionalized {
  StreetParams params;   ///< a = 1, gamma = 1
  double length_scale;   ///< a
  double time_scale;     ///< a^2 / gamma
};

Nondimensionalized nondimensionalize(const StreetParams& params);

/// Distance from z to the nearest vortex of the N-truncated infinite array.
double distance_to_lattice(Complex z, const StreetParams& params);

/// Distance from z to the nearest member of a vortex set.
double distance_to_set(Complex z, const VortexSet& vortices);

/// Plain-text `key = value` configuration. Blank lines and `#` comments
/// are ignored.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  [[nodiscard]] bool has(const std::string& key) const;
  [[nodiscard]] std::string get(const std::string& key) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] int get_int(const std::string& key, int fallback) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

  /// Street parameters from keys a, b, h, gamma, big_n (defaults where absent).
  [[nodiscard]] StreetParams street_params(StreetParams defaults = {}) const;
  /// Array layout from keys n_streets, vortices_per_row.
  [[nodiscard]] FiniteArraySpec array_spec(FiniteArraySpec defaults = {}) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace vlab

#endif  // VLAB_LATTICE_HPP
