#include "vlab/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/roots.hpp>

#include "vlab/errors.hpp"
#include "vlab/parallel.hpp"
#include "vlab/topology.hpp"

namespace vlab {

namespace {

constexpr double kSquareLatticeB = 0.5;

StreetParams street(double b, double h, int big_n) {
  StreetParams p;
  p.b = b;
  p.h = h;
  p.big_n = big_n;
  return p;
}

// Saddle levels with continuation from the previous evaluation.
class LevelTracker {
 public:
  LevelTracker(double b, int big_n) : b_(b), big_n_(big_n) {}

  const SaddleLevels& at(double h) {
    levels_ = saddle_levels(street(b_, h, big_n_), levels_ ? &*levels_ : nullptr);
    return *levels_;
  }

  // 1 + floor(|ratio|) without the degeneracy guard: the bracketing logic
  // only needs the side of h_k a point lies on.
  int raw_class(double h) {
    const auto& lv = at(h);
    if (std::abs(lv.drift) < 1e-14) throw DegenerateError("zero level drift at h = " + std::to_string(h));
    return static_cast<int>(std::floor(std::abs(lv.ratio()))) + 1;
  }

 private:
  double b_;
  int big_n_;
  std::optional<SaddleLevels> levels_;
};

BifurcationPoint locate(LevelTracker& tracker, int k, double lo, double hi, const BifurcationOptions& options) {
  const int class_lo = tracker.raw_class(lo);
  const int class_hi = tracker.raw_class(hi);
  if (class_lo != k + 1 || class_hi != k)
    throw InvalidBracketError("bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "] has classes " +
                              std::to_string(class_lo) + " and " + std::to_string(class_hi) + ", expected " +
                              std::to_string(k + 1) + " and " + std::to_string(k));

  while (hi - lo > options.class_width) {
    const double mid = 0.5 * (lo + hi);
    if (tracker.raw_class(mid) > k)
      lo = mid;
    else
      hi = mid;
  }

  auto g = [&](double h) { return tracker.at(h).level_gap(k); };
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_lo == 0.0) return {k, lo, 0.0, 0.0, true};
  if (g_hi == 0.0) return {k, hi, 0.0, 0.0, true};
  if ((g_lo > 0.0) == (g_hi > 0.0)) throw ConvergenceError("level gap does not change sign across the class bracket");

  std::uintmax_t max_iter = 200;
  const double h_tol = options.h_tol;
  auto done = [h_tol](double x, double y) { return std::abs(y - x) <= h_tol; };
  const auto root = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, done, max_iter);

  BifurcationPoint point;
  point.k = k;
  point.h = 0.5 * (root.first + root.second);
  point.tolerance = std::max(0.5 * (root.second - root.first), 0.0);
  point.gap = g(point.h);
  const double target = k > 50 ? options.deep_gap_tol : options.gap_tol;
  point.gap_converged = std::abs(point.gap) < target;
  return point;
}

void check_options(const BifurcationOptions& options) {
  if (options.big_n < 1) throw ValidationError("truncation N must be at least 1");
  if (!(options.class_width > 0.0) || !(options.h_tol > 0.0)) throw ValidationError("tolerances must be positive");
}

}  // namespace

BifurcationPoint find_bifurcation(double b, int k, std::pair<double, double> bracket,
                                  const BifurcationOptions& options) {
  check_options(options);
  if (k < 1) throw ValidationError("bifurcation index k must be positive");
  auto [lo, hi] = bracket;
  if (!(lo < hi)) throw ValidationError("bracket must satisfy h_lo < h_hi");
  if (!(b > 0.0) || !(b < lo)) throw ValidationError("bracket requires 0 < b < h_lo");
  LevelTracker tracker(b, options.big_n);
  return locate(tracker, k, lo, hi, options);
}

void BifurcationSequence::validate() const {
  if (tolerances.size() != h_values.size() || gaps.size() != h_values.size())
    throw ValidationError("bifurcation sequence vectors differ in length");
  for (std::size_t i = 1; i < h_values.size(); ++i)
    if (!(h_values[i] < h_values[i - 1])) throw ValidationError("bifurcation values must strictly decrease");
}

BifurcationSequence bifurcation_sequence(double b, int k_max, const BifurcationOptions& options) {
  check_options(options);
  if (b == kSquareLatticeB)
    throw DegenerateError("b = 0.5 is the square lattice: all bifurcations collapse to h = 1");
  if (!(b > 0.0) || !(b < kSquareLatticeB)) throw ValidationError("bifurcation sequences need 0 < b < 0.5");
  if (k_max < 1 || k_max > 100) throw ValidationError("k_max must lie in 1..100");

  LevelTracker tracker(b, options.big_n);
  double top = 1.5;
  while (tracker.raw_class(top) != 1) {
    top += 0.5;
    if (top > 10.0) throw ConvergenceError("no class-1 separation found below h = 10");
  }

  BifurcationSequence seq;
  seq.b = b;
  double gap_guess = 0.05;
  for (int k = 1; k <= k_max; ++k) {
    double hi = top;
    if (k > 1) {
      const double prev = seq.h_values.back();
      const std::size_t n = seq.h_values.size();
      if (n >= 2) {
        const double g1 = seq.h_values[n - 2] - prev;
        gap_guess = n >= 3 ? g1 * g1 / (seq.h_values[n - 3] - seq.h_values[n - 2]) : 0.5 * g1;
      }
      hi = prev - std::min(1e-6, 1e-3 * gap_guess);
    }

    double step = 0.6 * gap_guess;
    double lo = hi - step;
    for (int guard = 0;; ++guard) {
      if (guard > 10000) throw ConvergenceError("could not bracket h_" + std::to_string(k));
      if (lo <= b) throw ConvergenceError("bracket for h_" + std::to_string(k) + " reached h <= b");
      const int c = tracker.raw_class(lo);
      if (c == k + 1) break;
      if (c <= k) {
        hi = lo;
      } else {
        step *= 0.5;
      }
      lo = hi - step;
    }

    const auto point = locate(tracker, k, lo, hi, options);
    seq.h_values.push_back(point.h);
    seq.tolerances.push_back(point.tolerance);
    seq.gaps.push_back(point.gap);
  }
  seq.validate();
  return seq;
}

std::vector<std::pair<double, double>> BifurcationCurves::curve(int k) const {
  if (k < 1 || k > k_max) throw ValidationError("curve index out of range");
  std::vector<std::pair<double, double>> out;
  for (const auto& p : points)
    if (static_cast<int>(p.h.size()) >= k && p.h[k - 1]) out.emplace_back(p.b, *p.h[k - 1]);
  return out;
}

std::vector<double> b_grid(double b_min, double b_max, int increments) {
  if (increments < 1 || !(b_min < b_max)) throw ValidationError("b grid needs b_min < b_max and increments >= 1");
  std::vector<double> out;
  for (int i = 0; i <= increments; ++i) out.push_back(b_min + (b_max - b_min) * i / increments);
  out.back() = b_max;
  return out;
}

BifurcationCurves bifurcation_curves(const std::vector<double>& b_values, int k_max,
                                     const BifurcationOptions& options) {
  if (k_max < 1 || k_max > 100) throw ValidationError("k_max must lie in 1..100");
  for (double b : b_values)
    if (!(b > 0.0) || b > kSquareLatticeB) throw ValidationError("curve b values must lie in (0, 0.5]");

  BifurcationCurves curves;
  curves.k_max = k_max;
  curves.points.resize(b_values.size());
  parallel_for(b_values.size(), [&](std::size_t i) {
    auto& point = curves.points[i];
    point.b = b_values[i];
    point.h.assign(static_cast<std::size_t>(k_max), std::nullopt);
    if (point.b == kSquareLatticeB) {
      point.status = "degenerate";
      return;
    }
    try {
      const auto seq = bifurcation_sequence(point.b, k_max, options);
      for (std::size_t k = 0; k < seq.size(); ++k) point.h[k] = seq.h_values[k];
      point.status = "ok";
    } catch (const Error& e) {
      point.status = e.what();
    }
  });
  return curves;
}

double extrapolate_to_square_lattice(const BifurcationCurves& curves, int k, int degree) {
  if (degree < 0) throw ValidationError("degree must be non-negative");
  auto samples = curves.curve(k);
  std::erase_if(samples, [](const auto& s) { return s.first >= kSquareLatticeB; });
  if (static_cast<int>(samples.size()) < degree + 1) throw ValidationError("not enough curve samples to extrapolate");
  std::sort(samples.begin(), samples.end());
  const std::vector<std::pair<double, double>> tail(samples.end() - (degree + 1), samples.end());
  double value = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < tail.size(); ++j)
      if (j != i) w *= (kSquareLatticeB - tail[j].first) / (tail[i].first - tail[j].first);
    value += w * tail[i].second;
  }
  return value;
}

ScalingFit fit_scaling(const std::vector<double>& h_values, double h_inf, std::pair<int, int> window) {
  const auto [k_lo, k_hi] = window;
  if (k_lo < 1 || k_lo >= k_hi || k_hi > static_cast<int>(h_values.size()))
    throw ValidationError("fit window must satisfy 1 <= k_lo < k_hi <= sequence length");

  std::vector<double> ks;
  std::vector<double> ys;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double d = h_values[static_cast<std::size_t>(k - 1)] - h_inf;
    if (!(d > 0.0)) throw DegenerateError("h_k - h_inf must be positive inside the fit window (k = " +
                                          std::to_string(k) + ")");
    ks.push_back(k);
    ys.push_back(std::log(d));
  }
  const double n = static_cast<double>(ks.size());
  double mk = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    mk += ks[i];
    my += ys[i];
  }
  mk /= n;
  my /= n;
  double skk = 0.0;
  double sky = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    skk += (ks[i] - mk) * (ks[i] - mk);
    sky += (ks[i] - mk) * (ys[i] - my);
  }
  const double slope = sky / skk;
  const double intercept = my - slope * mk;
  double ss = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double r = ys[i] - (intercept + slope * ks[i]);
    ss += r * r;
  }

  ScalingFit fit;
  fit.h_inf_proxy = h_inf;
  fit.delta = std::exp(-slope);
  fit.c = std::exp(intercept);
  fit.fit_window = window;
  fit.rms_residual = std::sqrt(ss / n);
  if (!(fit.delta > 1.0)) throw DegenerateError("fitted ratio delta is not above 1");
  return fit;
}

ScalingFit fit_scaling(const BifurcationSequence& seq, std::pair<int, int> window) {
  seq.validate();
  if (window.second >= static_cast<int>(seq.size()))
    throw ValidationError("fit window must end before the last entry, which serves as the h_inf proxy");
  return fit_scaling(seq.h_values, seq.h_values.back(), window);
}

}  // namespace vlab
