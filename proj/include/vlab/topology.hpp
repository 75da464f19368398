#ifndef VLAB_TOPOLOGY_HPP
#define VLAB_TOPOLOGY_HPP

#include <array>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vlab/lattice.hpp"

namespace vlab {

/// A steady flow seen in some translating frame. The conjugate velocity is
/// already relative to the frame, so stagnation points are its zeros.
struct FlowModel {
  std::function<Complex(Complex)> conj_velocity;
  std::function<Complex(Complex)> conj_velocity_derivative;
  std::function<double(Complex)> stream_function;
  std::function<double(Complex)> vortex_distance;
  double length_scale = 1.0;          ///< a
  double circulation_scale = 1.0;     ///< |gamma|
  std::optional<double> x_period;     ///< a for x-periodic flows
};

/// Co-moving flow of the N-truncated array in the frame moving at u_frame.
FlowModel lattice_flow(const StreetParams& params, double u_frame);

enum class StagnationKind { saddle, center };

std::string to_string(StagnationKind kind);

struct StagnationPoint {
  Complex position;
  StagnationKind kind = StagnationKind::saddle;
  double psi = 0.0;        ///< relative stream function at the point
  double residual = 0.0;   ///< |conjugate velocity| at the point
  double hessian_det = 0.0;
  Complex unstable_direction;  ///< unit vectors; saddles only
  Complex stable_direction;
};

struct SearchRegion {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

struct StagnationSearchOptions {
  int seeds_per_cell = 40;        ///< per a-by-h cell, in each direction
  bool check_refinement = true;   ///< repeat with doubled seeds and compare
  int max_iterations = 50;
  double converge_tol = 1e-12;    ///< relative to gamma/a
  double accept_tol = 1e-10;
  double dedup_radius = 1e-6;     ///< relative to a
  double hessian_step = 1e-5;     ///< relative to a
};

/// Newton polish of a single seed; nullopt if it does not reach accept_tol.
std::optional<Complex> refine_stagnation_point(const FlowModel& flow, Complex seed,
                                               const StagnationSearchOptions& options = {});

/// Classifies a zero of the relative velocity (Hessian of the stream
/// function by central differences, eigendirections from the analytic
/// derivative).
StagnationPoint classify_stagnation_point(const FlowModel& flow, Complex position,
                                          const StagnationSearchOptions& options = {});

/// All stagnation points in a region: Newton from a seed grid with `cell`
/// giving the seed-cell size (cells per unit length = seeds_per_cell / cell).
/// For x-periodic flows positions are reduced to [x_min, x_min + period).
/// Results are sorted by (y, x).
std::vector<StagnationPoint> find_stagnation_points(const FlowModel& flow, const SearchRegion& region,
                                                    Complex cell, const StagnationSearchOptions& options = {});

/// Stagnation points of the array, in the frame moving at U_N, with
/// representatives in x in [0, a) and y in [y_min, y_max]. Requires
/// |y| <= N h / 4.
std::vector<StagnationPoint> find_stagnation_points(const StreetParams& params, double y_min, double y_max,
                                                    const StagnationSearchOptions& options = {});

enum class TraceEnd { closed, vortex_approach, budget_exhausted };

std::string to_string(TraceEnd end);

struct TraceOptions {
  double arc_budget = 200.0;     ///< relative to a, per branch
  double offset = 1e-6;          ///< initial displacement, relative to a
  double closure_tol = 1e-5;     ///< relative to a
  double vortex_stop = 1e-3;     ///< relative to a
  double step_tol = 1e-9;        ///< local error tolerance of the integrator
  double max_step = 0.05;        ///< relative to a
  /// Extra points (besides the periodic copies of the origin) that end a
  /// branch when approached within closure_tol.
  std::vector<Complex> targets;
};

struct SeparatrixPath {
  StagnationPoint origin;
  /// Both unstable branches joined through the saddle: the negative branch
  /// reversed, the saddle, then the positive branch.
  std::vector<Complex> polyline;
  std::array<TraceEnd, 2> ends{TraceEnd::closed, TraceEnd::closed};
  std::set<int> streets_visited;
  double arc_length = 0.0;

  [[nodiscard]] bool budget_exhausted() const {
    return ends[0] == TraceEnd::budget_exhausted || ends[1] == TraceEnd::budget_exhausted;
  }
};

/// Follows both unstable branches of a saddle along the level set of the
/// stream function (arc-length parametrised, adaptive Dormand-Prince steps,
/// projection back onto the level after each step).
SeparatrixPath trace_separatrix(const FlowModel& flow, const StagnationPoint& saddle,
                                const TraceOptions& options = {});

/// Lattice version; fills streets_visited (see below).
SeparatrixPath trace_separatrix(const StagnationPoint& saddle, const StreetParams& params, double u_frame,
                                double arc_budget = 200.0);

/// Streets n whose row levels (y = n h or y = b + n h) the polyline reaches.
std::set<int> streets_visited(const std::vector<Complex>& polyline, const StreetParams& params);

// ---------------------------------------------------------------------------
// Saddle levels and topology classes.

/// The two saddles of the reference street (n = 0), their stream-function
/// levels and the level drift between neighbouring streets.
struct SaddleLevels {
  StagnationPoint lower;   ///< smaller y
  StagnationPoint upper;
  double drift = 0.0;      ///< psi(z + ih) - psi(z) = gamma b / a - U h
  double u_frame = 0.0;

  /// (psi_upper - psi_lower) / drift. The saddle of street n shares its level
  /// with the opposite-family saddle of street n + k exactly when ratio = k.
  [[nodiscard]] double ratio() const { return (upper.psi - lower.psi) / drift; }
  /// psi_upper - psi_lower - k * drift; vanishes at the k-th bifurcation.
  [[nodiscard]] double level_gap(int k) const { return upper.psi - lower.psi - k * drift; }
};

/// Locates the two reference saddles. With `previous`, Newton restarts from
/// its positions (continuation in parameters) and falls back to a full seed
/// search matched by nearest neighbour.
SaddleLevels saddle_levels(const StreetParams& params, const SaddleLevels* previous = nullptr);

/// 1 + floor(ratio): number of streets linked by the transport region,
/// from saddle levels alone. Throws DegenerateError when two levels coincide
/// within `degenerate_tol` (times gamma).
int level_class(const SaddleLevels& levels, double degenerate_tol = 1e-10);

struct TopologyClass {
  int k = 1;               ///< from separatrix tracing
  int level_k = 1;         ///< from saddle-level ordering
  std::string region_label;
  SaddleLevels levels;
  std::vector<SeparatrixPath> separatrices;

  [[nodiscard]] bool consistent() const { return k == level_k; }
};

/// "A" for k = 1, "B" for k = 2, ...
std::string region_label(int k);

/// Traces the separatrices of both reference saddles; k is the largest
/// number of streets any of them visits. Throws DegenerateError on a
/// bifurcation.
TopologyClass topology_class(const StreetParams& params);

}  // namespace vlab

#endif  // VLAB_TOPOLOGY_HPP
