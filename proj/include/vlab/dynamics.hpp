#ifndef VLAB_DYNAMICS_HPP
#define VLAB_DYNAMICS_HPP

#include <string>
#include <vector>

#include "vlab/grid.hpp"
#include "vlab/lattice.hpp"
#include "vlab/topology.hpp"

namespace vlab {

/// Pairs closer than this (times the length scale) abort the evaluation.
inline constexpr double kCollisionFloor = 1e-8;

struct SimState {
  double time = 0.0;
  VortexSet vortices;
};

struct ConservedQuantities {
  double hamiltonian = 0.0;   ///< -(1/4 pi) sum_{i != j} G_i G_j log|z_i - z_j|
  Complex impulse;            ///< sum G_i x_i + i sum G_i y_i
  double angular_impulse = 0.0;
  double total_circulation = 0.0;
};

ConservedQuantities conserved_quantities(const VortexSet& vortices);

/// Planar velocity (u + i v) of every vortex induced by all the others:
/// conj(dz_k/dt) = (1 / 2 pi i) sum_{j != k} G_j / (z_k - z_j).
/// Throws CollisionError when two vortices are closer than the floor.
std::vector<Complex> vortex_velocities(const VortexSet& vortices, double length_scale = 1.0);

enum class Scheme { rk4_fixed, rk45_adaptive };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

struct IntegrateOptions {
  Scheme scheme = Scheme::rk45_adaptive;
  double dt = 1e-2;          ///< fixed step, or the initial step of the adaptive scheme
  double abs_tol = 1e-10;    ///< adaptive scheme, times the length scale
  double rel_tol = 0.0;
  double length_scale = 1.0;
  std::vector<double> snapshot_times;  ///< defaults to {t_start, t_end}
};

struct Trajectory {
  std::vector<SimState> snapshots;
  std::vector<ConservedQuantities> conserved;  ///< one per snapshot
  SimState last_state;
  bool completed = true;
  std::string message;  ///< collision report when !completed
  long steps = 0;
  long rejected_steps = 0;
};

/// Advances the state to t_end. On a near collision (or when the adaptive
/// step collapses as vortices close in) the run stops, completed is false
/// and last_state holds the last accepted state.
Trajectory integrate(const SimState& start, double t_end, const IntegrateOptions& options = {});

/// Relative stream function on a window, in the frame moving with the
/// current velocity of the reference vortex.
FieldGrid comoving_snapshot(const SimState& state, const VortexLabel& reference, const Window& window, int nx,
                            int ny, double length_scale = 1.0);

/// Flow of a vortex set in the frame of its reference vortex.
FlowModel comoving_flow(const VortexSet& vortices, const VortexLabel& reference, double length_scale = 1.0,
                        double circulation_scale = 1.0);

struct SaddleGap {
  char family = 'L';  ///< 'L' (lower) or 'U' (upper) saddle of the street cell
  int m_left = 0;     ///< cell indices of the two saddles
  int m_right = 0;
  Complex left;
  Complex right;
  double psi_left = 0.0;
  double psi_right = 0.0;
  double gap = 0.0;   ///< |psi_right - psi_left|
};

/// Saddles of the co-moving finite-set flow near the reference vortex,
/// matched to the infinite array's saddle families. Neighbouring saddles of
/// one family share a level in the infinite array; the report gives their
/// level gaps for the finite set.
std::vector<SaddleGap> saddle_splitting_report(const SimState& state, const StreetParams& params,
                                               const VortexLabel& reference = {1, 0}, int cells = 2);

struct VortexPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double separation = 0.0;
  double velocity_mismatch = 0.0;  ///< |v_i - v_j| / mean pair speed
};

struct ClusterReport {
  std::vector<VortexPair> dipoles;     ///< opposite signs, translating together
  std::vector<VortexPair> corotating;  ///< equal signs
  int isolated = 0;                    ///< vortices in no pair
};

/// Mutual nearest neighbours closer than max_separation (times a). Dipoles
/// must move coherently: |v_i - v_j| below `coherence` times their mean speed.
ClusterReport cluster_diagnostic(const VortexSet& vortices, double max_separation = 0.5, double coherence = 0.5,
                                 double length_scale = 1.0);

}  // namespace vlab

#endif  // VLAB_DYNAMICS_HPP
