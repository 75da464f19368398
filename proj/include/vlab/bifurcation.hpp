#ifndef VLAB_BIFURCATION_HPP
#define VLAB_BIFURCATION_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vlab/lattice.hpp"

namespace vlab {

struct BifurcationOptions {
  int big_n = 150;
  double class_width = 1e-4;    ///< bisection on the integer class stops here
  double h_tol = 1e-12;         ///< width of the final root bracket
  double gap_tol = 1e-12;       ///< target |g| (times gamma), k <= 50
  double deep_gap_tol = 1e-13;  ///< target |g| for k > 50
};

struct BifurcationPoint {
  int k = 0;
  double h = 0.0;
  double tolerance = 0.0;  ///< half-width of the final bracket
  double gap = 0.0;        ///< level gap g_k at h
  bool gap_converged = false;
};

/// k-th critical separation h_k for row separation b (a = gamma = 1).
/// The bracket must hold class k + 1 at its low end and class k at its high
/// end; otherwise InvalidBracketError.
BifurcationPoint find_bifurcation(double b, int k, std::pair<double, double> bracket,
                                  const BifurcationOptions& options = {});

struct BifurcationSequence {
  double b = 0.0;
  std::vector<double> h_values;    ///< h_1 > h_2 > ...
  std::vector<double> tolerances;
  std::vector<double> gaps;

  [[nodiscard]] std::size_t size() const { return h_values.size(); }
  /// Throws ValidationError unless h_values is strictly decreasing and the
  /// side vectors match in length.
  void validate() const;
};

/// First k_max critical separations, each bracketed from the previous one
/// and the extrapolated gap ratio. Requires 0 < b < 0.5 and k_max <= 100.
BifurcationSequence bifurcation_sequence(double b, int k_max, const BifurcationOptions& options = {});

struct CurvePoint {
  double b = 0.0;
  std::vector<std::optional<double>> h;  ///< h_1..h_kmax (missing on failure)
  std::string status;                    ///< "ok", "degenerate" or the error text
};

struct BifurcationCurves {
  int k_max = 0;
  std::vector<CurvePoint> points;

  /// h_k(b) samples of one curve, skipping missing values.
  [[nodiscard]] std::vector<std::pair<double, double>> curve(int k) const;
};

/// Evenly spaced b values from b_min to b_max with `increments` steps.
std::vector<double> b_grid(double b_min = 0.05, double b_max = 0.5, int increments = 22);

/// Bifurcation values over a b grid; b values run concurrently and failures
/// are recorded per point. b = 0.5 is the degenerate square-lattice end.
BifurcationCurves bifurcation_curves(const std::vector<double>& b_values, int k_max,
                                     const BifurcationOptions& options = {});

/// Value at b = 0.5 of the polynomial of degree `degree` through the last
/// degree + 1 regular samples of curve k.
double extrapolate_to_square_lattice(const BifurcationCurves& curves, int k, int degree = 2);

struct ScalingFit {
  double h_inf_proxy = 0.0;
  double c = 0.0;
  double delta = 0.0;
  std::pair<int, int> fit_window{20, 70};
  double rms_residual = 0.0;  ///< in log space
};

inline constexpr std::pair<int, int> kDefaultFitWindow{20, 70};

/// Least squares of log(h_k - h_inf) against k over the window (inclusive,
/// 1-based k): delta = exp(-slope), c = exp(intercept).
ScalingFit fit_scaling(const std::vector<double>& h_values, double h_inf,
                       std::pair<int, int> window = kDefaultFitWindow);

/// Same, with the last entry of the sequence as the h_inf proxy.
ScalingFit fit_scaling(const BifurcationSequence& seq, std::pair<int, int> window = kDefaultFitWindow);

}  // namespace vlab

#endif  // VLAB_BIFURCATION_HPP
