#include "vlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "format.hpp"
#include "vlab/bifurcation.hpp"
#include "vlab/contour.hpp"
#include "vlab/dynamics.hpp"
#include "vlab/equilibrium.hpp"
#include "vlab/errors.hpp"
#include "vlab/field.hpp"
#include "vlab/grid.hpp"
#include "vlab/lattice.hpp"
#include "vlab/topology.hpp"

namespace vlab::cli {

namespace {

using nlohmann::json;
using detail::format_number;

json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return detail::round_significant(v);
}

json jpoint(Complex z) { return {{"x", jnum(z.real())}, {"y", jnum(z.imag())}}; }

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      if constexpr (std::is_same_v<T, int>)
        out.push_back(std::stoi(item, &used));
      else
        out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw ValidationError("cannot parse " + what + " entry '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw ValidationError("cannot parse " + what + " entry '" + item + "'");
  }
  if (out.empty()) throw ValidationError(what + " must not be empty");
  return out;
}

// Options shared by every subcommand.
struct Common {
  std::string config;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> h;
  std::optional<double> gamma;
  int n = 150;
  std::string out;
  std::string format;

  [[nodiscard]] StreetParams params() const {
    StreetParams p;
    if (a) p.a = *a;
    if (b) p.b = *b;
    if (h) p.h = *h;
    if (gamma) p.gamma = *gamma;
    p.big_n = n;
    p.validate();
    return p;
  }

  // Output format: explicit flag, else the --out extension, else `fallback`.
  [[nodiscard]] std::string resolved_format(const std::string& fallback) const {
    if (!format.empty()) return format;
    const auto ext = std::filesystem::path(out).extension().string();
    if (ext == ".json" || ext == ".csv" || ext == ".svg") return ext.substr(1);
    return fallback;
  }
};

void add_common(CLI::App* sub, Common& c, const std::vector<std::string>& formats) {
  sub->add_option("--config", c.config, "key=value configuration file (flags override it)");
  sub->add_option("--a", c.a, "row spacing a");
  sub->add_option("--b", c.b, "row separation b inside a street");
  sub->add_option("--h", c.h, "street separation h");
  sub->add_option("--gamma", c.gamma, "circulation magnitude");
  sub->add_option("--n", c.n, "street truncation half-count N")->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--out", c.out, "output file (default: standard output)");
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember(formats));
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ValidationError("cannot open output file '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  Output o(path, fallback);
  *o << text;
}

std::vector<VortexMarker> lattice_markers(const StreetParams& p, const Window& w, bool single_street) {
  std::vector<VortexMarker> out;
  const int n_lo = single_street ? 0 : std::max(-p.big_n, static_cast<int>(std::floor((w.y_min - p.b) / p.h)) - 1);
  const int n_hi = single_street ? 0 : std::min(p.big_n, static_cast<int>(std::ceil(w.y_max / p.h)) + 1);
  const int m_lo = static_cast<int>(std::floor(w.x_min / p.a)) - 1;
  const int m_hi = static_cast<int>(std::ceil(w.x_max / p.a)) + 1;
  for (int n = n_lo; n <= n_hi; ++n)
    for (int m = m_lo; m <= m_hi; ++m) {
      out.push_back({{m * p.a, n * p.h}, -p.gamma});
      out.push_back({{(m + 0.5) * p.a, p.b + n * p.h}, p.gamma});
    }
  return out;
}

std::vector<VortexMarker> set_markers(const VortexSet& v) {
  std::vector<VortexMarker> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back({v.positions[i], v.strengths[i]});
  return out;
}

Window parse_window(const std::string& text, const StreetParams& p) {
  if (text.empty()) return {-p.a, p.a, 0.5 * p.b - 1.5 * p.h, 0.5 * p.b + 1.5 * p.h};
  const auto v = parse_list<double>(text, "window");
  if (v.size() != 4) throw ValidationError("window needs four values x_min,x_max,y_min,y_max");
  Window w{v[0], v[1], v[2], v[3]};
  w.validate();
  return w;
}

json stagnation_json(const StagnationPoint& s) {
  json j{{"position", jpoint(s.position)},
         {"kind", to_string(s.kind)},
         {"psi", jnum(s.psi)},
         {"residual", jnum(s.residual)},
         {"hessian_det", jnum(s.hessian_det)}};
  if (s.kind == StagnationKind::saddle) {
    j["unstable_direction"] = jpoint(s.unstable_direction);
    j["stable_direction"] = jpoint(s.stable_direction);
  }
  return j;
}

json separatrix_json(const SeparatrixPath& path, bool with_polyline) {
  json j{{"origin", jpoint(path.origin.position)},
         {"ends", {to_string(path.ends[0]), to_string(path.ends[1])}},
         {"streets_visited", path.streets_visited},
         {"arc_length", jnum(path.arc_length)}};
  if (with_polyline) {
    auto pts = json::array();
    for (Complex z : path.polyline) pts.push_back({jnum(z.real()), jnum(z.imag())});
    j["polyline"] = pts;
  }
  return j;
}

json params_json(const StreetParams& p) {
  return {{"a", jnum(p.a)}, {"b", jnum(p.b)}, {"h", jnum(p.h)}, {"gamma", jnum(p.gamma)}, {"big_n", p.big_n}};
}

// ---------------------------------------------------------------------------

struct FieldArgs {
  Common common;
  std::string frame = "comoving";
  std::string source = "array";
  std::string quantity = "psi";
  std::string window;
  int nx = 241;
  int ny = 241;
  int levels = 40;
  std::optional<double> u;
  int n_streets = 11;
  int per_row = 10;
};

void run_field(const FieldArgs& args, std::ostream& out) {
  const auto p = args.common.params();
  const auto window = parse_window(args.window, p);
  const std::string format = args.common.resolved_format("csv");
  const bool comoving = args.frame == "comoving";
  if (format == "svg" && args.quantity != "psi") throw ValidationError("SVG output needs --quantity psi");

  FlowModel flow;
  MaskPredicate mask;
  std::vector<VortexMarker> markers;
  Complex frame{0.0, 0.0};
  if (args.source == "finite") {
    const auto vortices = build_finite_array(p, {args.n_streets, args.per_row});
    flow = comoving_flow(vortices, {1, 0}, p.a, std::abs(p.gamma));
    frame = vortex_velocities(vortices, p.a)[vortices.find({1, 0})];
    if (args.u) frame = *args.u;
    if (!comoving) frame = 0.0;
    flow.conj_velocity = [vortices, frame](Complex z) { return set_velocity(z, vortices) - std::conj(frame); };
    flow.stream_function = [vortices, frame](Complex z) { return set_relative_stream_function(z, vortices, frame); };
    mask = set_mask(vortices, p.a);
    markers = set_markers(vortices);
  } else {
    StreetParams q = p;
    if (args.source == "street") q.big_n = 0;
    const double speed = args.u ? *args.u : (args.source == "street" ? street_speed(q) : array_speed(q).u);
    frame = comoving ? speed : 0.0;
    flow = lattice_flow(q, frame.real());
    mask = lattice_mask(q);
    markers = lattice_markers(q, window, args.source == "street");
  }

  FieldGrid grid;
  if (args.quantity == "psi") {
    grid = sample_grid(window, args.nx, args.ny, flow.stream_function, mask);
  } else {
    const auto conj_velocity = flow.conj_velocity;
    grid = sample_vector_grid(
        window, args.nx, args.ny, [conj_velocity](Complex z) { return velocity_from_conjugate(conj_velocity(z)); },
        mask);
  }

  Output o(args.common.out, out);
  if (format == "csv") {
    write_csv(*o, grid);
  } else if (format == "json") {
    write_json(*o, grid);
  } else {
    std::vector<double> highlight;
    std::vector<Complex> anchors;
    if (comoving) {
      StagnationSearchOptions search;
      search.check_refinement = false;
      search.seeds_per_cell = 24;
      const double cell_h = std::min(p.h, window.y_max - window.y_min);
      for (const auto& s : find_stagnation_points(flow, {window.x_min, window.x_max, window.y_min, window.y_max},
                                                  {p.a, cell_h}, search))
        if (s.kind == StagnationKind::saddle) {
          highlight.push_back(s.psi);
          if (!flow.x_period) {
            anchors.push_back(s.position);
            continue;
          }
          const double period = *flow.x_period;
          for (double x = s.position.real(); x <= window.x_max + period; x += period)
            anchors.push_back({x, s.position.imag()});
        }
    }
    RenderOptions render;
    render.highlight_anchors = anchors;
    render.vortices = markers;
    render.title = args.source + " field, " + args.frame + " frame";
    *o << render_contours(grid, even_levels(grid, args.levels), highlight, render);
  }
}

struct StagnationArgs {
  Common common;
  std::optional<double> y_min;
  std::optional<double> y_max;
};

void run_stagnation(const StagnationArgs& args, std::ostream& out) {
  const auto p = args.common.params();
  const double y0 = args.y_min.value_or(0.5 * p.b - 0.5 * p.h);
  const double y1 = args.y_max.value_or(0.5 * p.b + 0.5 * p.h);
  const auto points = find_stagnation_points(p, y0, y1);
  const std::string format = args.common.resolved_format("json");
  Output o(args.common.out, out);
  if (format == "csv") {
    *o << "x,y,kind,psi,residual\n";
    for (const auto& s : points)
      *o << format_number(s.position.real()) << ',' << format_number(s.position.imag()) << ',' << to_string(s.kind)
         << ',' << format_number(s.psi) << ',' << format_number(s.residual) << '\n';
  } else {
    json doc{{"params", params_json(p)}, {"u_frame", jnum(array_speed(p).u)}, {"points", json::array()}};
    for (const auto& s : points) doc["points"].push_back(stagnation_json(s));
    *o << doc.dump(2) << '\n';
  }
}

struct SeparatrixArgs {
  Common common;
  double budget = 200.0;
};

void run_separatrix(const SeparatrixArgs& args, std::ostream& out) {
  const auto p = args.common.params();
  const auto levels = saddle_levels(p);
  std::vector<SeparatrixPath> paths;
  for (const auto* s : {&levels.lower, &levels.upper})
    paths.push_back(trace_separatrix(*s, p, levels.u_frame, args.budget));
  const std::string format = args.common.resolved_format("csv");
  Output o(args.common.out, out);
  if (format == "csv") {
    *o << "saddle,index,x,y\n";
    const char* names[] = {"lower", "upper"};
    for (std::size_t s = 0; s < paths.size(); ++s)
      for (std::size_t i = 0; i < paths[s].polyline.size(); ++i)
        *o << names[s] << ',' << i << ',' << format_number(paths[s].polyline[i].real()) << ','
           << format_number(paths[s].polyline[i].imag()) << '\n';
  } else {
    json doc{{"params", params_json(p)}, {"separatrices", json::array()}};
    for (const auto& path : paths) doc["separatrices"].push_back(separatrix_json(path, true));
    *o << doc.dump(2) << '\n';
  }
}

void run_topology(const Common& common, std::ostream& out) {
  const auto p = common.params();
  const auto t = topology_class(p);
  json doc{{"params", params_json(p)},
           {"u_frame", jnum(t.levels.u_frame)},
           {"level_drift", jnum(t.levels.drift)},
           {"stagnation_points", {stagnation_json(t.levels.lower), stagnation_json(t.levels.upper)}},
           {"k", t.k},
           {"level_k", t.level_k},
           {"consistent", t.consistent()},
           {"region_label", t.region_label},
           {"separatrices", json::array()}};
  for (const auto& path : t.separatrices) doc["separatrices"].push_back(separatrix_json(path, false));
  Output o(common.out, out);
  *o << doc.dump(2) << '\n';
}

struct EquilibriumArgs {
  Common common;
  std::string hs = "0.3,0.38,0.46,0.54,0.62,0.7";
  std::string n_list;
};

void run_equilibrium(const EquilibriumArgs& args, std::ostream& out) {
  const auto base = args.common.params();
  const auto hs = parse_list<double>(args.hs, "h list");
  std::vector<int> ns;
  if (args.n_list.empty()) {
    for (int n = 0; n <= std::min(base.big_n, 20); ++n) ns.push_back(n);
    for (int n = 25; n <= base.big_n; n += 25) ns.push_back(n);
    if (ns.back() != base.big_n) ns.push_back(base.big_n);
  } else {
    ns = parse_list<int>(args.n_list, "N list");
  }
  const std::string format = args.common.resolved_format("csv");
  Output o(args.common.out, out);
  json doc{{"rows", json::array()}, {"checks", json::array()}};
  if (format == "csv") *o << "h,two_n_plus_one,u_n\n";
  for (double h : hs) {
    StreetParams p = base;
    p.h = h;
    for (const auto& row : convergence_table(p, ns)) {
      if (format == "csv")
        *o << format_number(h) << ',' << row.streets << ',' << format_number(row.u) << '\n';
      else
        doc["rows"].push_back({{"h", jnum(h)}, {"two_n_plus_one", row.streets}, {"u_n", jnum(row.u)}});
    }
    if (format == "json") {
      const auto check = verify_equilibrium(p);
      doc["checks"].push_back({{"h", jnum(h)}, {"speed", jnum(check.speed)}, {"residual", jnum(check.residual)}});
    }
  }
  if (format == "json") *o << doc.dump(2) << '\n';
}

struct BifurcateArgs {
  Common common;
  int k_max = 3;
  double tol = 1e-12;
  std::string csv;
};

void write_sequence_csv(std::ostream& o, const BifurcationSequence& seq) {
  o << "k,h,tolerance,gap\n";
  for (std::size_t k = 0; k < seq.size(); ++k)
    o << k + 1 << ',' << format_number(seq.h_values[k]) << ',' << format_number(seq.tolerances[k]) << ','
      << format_number(seq.gaps[k]) << '\n';
}

void run_bifurcate(const BifurcateArgs& args, std::ostream& out) {
  const auto p = args.common.params();
  BifurcationOptions options;
  options.big_n = p.big_n;
  options.h_tol = args.tol;
  const auto seq = bifurcation_sequence(p.b, args.k_max, options);
  const std::string format = args.common.resolved_format("json");
  Output o(args.common.out, out);
  if (format == "csv") {
    write_sequence_csv(*o, seq);
  } else {
    json doc{{"b", jnum(seq.b)}, {"big_n", p.big_n}, {"k_max", args.k_max}, {"h_values", json::array()},
             {"tolerances", json::array()}, {"gaps", json::array()}};
    for (std::size_t k = 0; k < seq.size(); ++k) {
      doc["h_values"].push_back(jnum(seq.h_values[k]));
      doc["tolerances"].push_back(jnum(seq.tolerances[k]));
      doc["gaps"].push_back(jnum(seq.gaps[k]));
    }
    *o << doc.dump(2) << '\n';
  }
  if (!args.csv.empty()) {
    Output c(args.csv, out);
    write_sequence_csv(*c, seq);
  }
}

struct CurvesArgs {
  Common common;
  double b_min = 0.05;
  double b_max = 0.5;
  int increments = 22;
  int k_max = 5;
};

void run_curves(const CurvesArgs& args, std::ostream& out) {
  BifurcationOptions options;
  options.big_n = args.common.n;
  const auto curves = bifurcation_curves(b_grid(args.b_min, args.b_max, args.increments), args.k_max, options);
  const std::string format = args.common.resolved_format("csv");
  Output o(args.common.out, out);
  if (format == "csv") {
    *o << "b,k,h,status\n";
    for (const auto& pt : curves.points)
      for (int k = 1; k <= curves.k_max; ++k) {
        const auto& h = pt.h[static_cast<std::size_t>(k - 1)];
        *o << format_number(pt.b) << ',' << k << ',' << (h ? format_number(*h) : "NaN") << ",\"" << pt.status
           << "\"\n";
      }
    return;
  }
  json doc{{"k_max", curves.k_max}, {"points", json::array()}, {"square_lattice_extrapolation", json::array()}};
  for (const auto& pt : curves.points) {
    json h = json::array();
    for (const auto& v : pt.h) h.push_back(v ? jnum(*v) : json(nullptr));
    doc["points"].push_back({{"b", jnum(pt.b)}, {"status", pt.status}, {"h", h}});
  }
  for (int k = 1; k <= curves.k_max; ++k) {
    try {
      doc["square_lattice_extrapolation"].push_back(jnum(extrapolate_to_square_lattice(curves, k)));
    } catch (const ValidationError&) {
      doc["square_lattice_extrapolation"].push_back(nullptr);
    }
  }
  *o << doc.dump(2) << '\n';
}

struct ScalingArgs {
  Common common;
  int k_max = 100;
  std::string window = "20,70";
};

void run_scaling(const ScalingArgs& args, std::ostream& out) {
  const auto p = args.common.params();
  const auto w = parse_list<int>(args.window, "fit window");
  if (w.size() != 2) throw ValidationError("fit window needs two values k_lo,k_hi");
  BifurcationOptions options;
  options.big_n = p.big_n;
  const auto seq = bifurcation_sequence(p.b, args.k_max, options);
  const auto fit = fit_scaling(seq, {w[0], w[1]});
  const std::string format = args.common.resolved_format("json");
  Output o(args.common.out, out);
  auto fitted = [&](int k) { return std::log(fit.c) - k * std::log(fit.delta); };
  if (format == "csv") {
    *o << "k,h,log_gap,fitted\n";
    for (int k = 1; k < static_cast<int>(seq.size()); ++k) {
      const double h = seq.h_values[static_cast<std::size_t>(k - 1)];
      *o << k << ',' << format_number(h) << ',' << format_number(std::log(h - fit.h_inf_proxy)) << ','
         << format_number(fitted(k)) << '\n';
    }
    return;
  }
  json doc{{"b", jnum(p.b)},
           {"big_n", p.big_n},
           {"h_inf_proxy", jnum(fit.h_inf_proxy)},
           {"c", jnum(fit.c)},
           {"delta", jnum(fit.delta)},
           {"fit_window", {fit.fit_window.first, fit.fit_window.second}},
           {"rms_residual", jnum(fit.rms_residual)},
           {"data", json::array()}};
  for (int k = 1; k < static_cast<int>(seq.size()); ++k) {
    const double h = seq.h_values[static_cast<std::size_t>(k - 1)];
    doc["data"].push_back(
        {{"k", k}, {"h", jnum(h)}, {"log_gap", jnum(std::log(h - fit.h_inf_proxy))}, {"fitted", jnum(fitted(k))}});
  }
  *o << doc.dump(2) << '\n';
}

struct EvolveArgs {
  Common common;
  int n_streets = 11;
  int per_row = 10;
  double dt = 1e-2;
  double tol = 1e-10;
  double t_end = 12.0;
  std::string snapshots = "0,4,8,12";
  std::string scheme = "rk45-adaptive";
  std::string out_dir = "evolve_out";
  bool grid = false;
  std::string window;
  int nx = 161;
  int ny = 161;
};

int run_evolve(const EvolveArgs& args, std::ostream& out) {
  const auto p = args.common.params();
  const FiniteArraySpec spec{args.n_streets, args.per_row};
  const auto vortices = build_finite_array(p, spec);
  IntegrateOptions options;
  options.scheme = parse_scheme(args.scheme);
  options.dt = args.dt;
  options.abs_tol = args.tol;
  options.length_scale = p.a;
  options.snapshot_times = parse_list<double>(args.snapshots, "snapshot times");

  std::filesystem::create_directories(args.out_dir);
  const SimState start{0.0, vortices};
  const auto traj = integrate(start, args.t_end, options);

  const std::filesystem::path dir(args.out_dir);
  json log = json::array();
  json files = json::array();
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const auto& snap = traj.snapshots[s];
    const std::string stem = "snapshot_t" + format_number(snap.time, 6);
    {
      Output f((dir / (stem + ".csv")).string(), out);
      *f << "p,n,strength,x,y\n";
      const auto& v = snap.vortices;
      for (std::size_t i = 0; i < v.size(); ++i)
        *f << v.labels[i].p << ',' << v.labels[i].n << ',' << format_number(v.strengths[i]) << ','
           << format_number(v.positions[i].real()) << ',' << format_number(v.positions[i].imag()) << '\n';
    }
    files.push_back(stem + ".csv");
    if (args.grid) {
      const Complex ref = snap.vortices.positions[snap.vortices.find({1, 0})];
      Window w = parse_window(args.window, p);
      w = {w.x_min + ref.real(), w.x_max + ref.real(), w.y_min + ref.imag(), w.y_max + ref.imag()};
      const auto grid = comoving_snapshot(snap, {1, 0}, w, args.nx, args.ny, p.a);
      {
        Output f((dir / (stem + "_psi.json")).string(), out);
        write_json(*f, grid);
      }
      RenderOptions render;
      render.vortices = set_markers(snap.vortices);
      render.title = "t = " + format_number(snap.time, 6);
      write_text((dir / (stem + "_psi.svg")).string(), render_contours(grid, even_levels(grid, 40), {}, render), out);
    }
    const auto& q = traj.conserved[s];
    log.push_back({{"t", jnum(snap.time)},
                   {"hamiltonian", jnum(q.hamiltonian)},
                   {"impulse_x", jnum(q.impulse.real())},
                   {"impulse_y", jnum(q.impulse.imag())},
                   {"angular_impulse", jnum(q.angular_impulse)},
                   {"total_circulation", jnum(q.total_circulation)}});
  }
  write_text((dir / "conserved.json").string(), log.dump(2) + "\n", out);

  json summary{{"params", params_json(p)},
               {"n_streets", spec.n_streets},
               {"vortices_per_row", spec.vortices_per_row},
               {"scheme", to_string(options.scheme)},
               {"completed", traj.completed},
               {"final_time", jnum(traj.last_state.time)},
               {"steps", traj.steps},
               {"rejected_steps", traj.rejected_steps},
               {"snapshots", files},
               {"conserved_log", "conserved.json"}};
  if (!traj.completed) summary["message"] = traj.message;
  if (traj.conserved.size() >= 2) {
    const auto& q0 = traj.conserved.front();
    const auto& q1 = traj.conserved.back();
    summary["hamiltonian_relative_drift"] = jnum(std::abs(q1.hamiltonian - q0.hamiltonian) / std::abs(q0.hamiltonian));
    summary["impulse_drift"] = jnum(std::abs(q1.impulse - q0.impulse));
  }
  const auto clusters = cluster_diagnostic(traj.last_state.vortices, 0.5, 0.5, p.a);
  summary["clusters"] = {{"dipoles", clusters.dipoles.size()},
                         {"corotating", clusters.corotating.size()},
                         {"isolated", clusters.isolated}};
  json gaps = json::array();
  for (const auto& g : saddle_splitting_report(start, p))
    gaps.push_back({{"family", std::string(1, g.family)}, {"cells", {g.m_left, g.m_right}}, {"gap", jnum(g.gap)}});
  summary["initial_saddle_gaps"] = gaps;
  write_text(args.common.out, summary.dump(2) + "\n", out);
  return traj.completed ? kExitOk : kExitNumerical;
}

void run_report(const Common& common, std::ostream& out) {
  const auto p = common.params();
  const auto speed = array_speed(p);
  const auto check = verify_equilibrium(p);
  json doc{{"params", params_json(p)},
           {"street_speed", jnum(street_speed(p))},
           {"array_speed", jnum(speed.u)},
           {"array_speed_shifted", jnum(speed.shifted())},
           {"equilibrium_residual", jnum(check.residual)}};
  try {
    const auto t = topology_class(p);
    doc["topology"] = {{"k", t.k},
                       {"level_k", t.level_k},
                       {"region_label", t.region_label},
                       {"saddle_levels", {jnum(t.levels.lower.psi), jnum(t.levels.upper.psi)}},
                       {"level_drift", jnum(t.levels.drift)}};
  } catch (const NumericalError& e) {
    doc["topology"] = {{"error", e.what()}};
  }
  if (p.a == 1.0 && p.gamma == 1.0 && p.b < 0.5) {
    BifurcationOptions options;
    options.big_n = p.big_n;
    const auto seq = bifurcation_sequence(p.b, 3, options);
    json hs = json::array();
    for (double h : seq.h_values) hs.push_back(jnum(h));
    doc["first_bifurcations"] = hs;
  }
  Output o(common.out, out);
  *o << doc.dump(2) << '\n';
}

// Applies config-file values as defaults of the options they name; flags
// given on the command line still win.
void apply_config(CLI::App& app, const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  const auto config = Config::load(path);
  static const std::map<std::string, std::string> aliases{
      {"big_n", "n"}, {"vortices_per_row", "per-row"}, {"n_streets", "n-streets"}};
  for (auto* sub : app.get_subcommands({})) {
    for (const auto& [key, value] : config.values()) {
      std::string name = key;
      if (auto it = aliases.find(key); it != aliases.end()) name = it->second;
      std::replace(name.begin(), name.end(), '_', '-');
      for (auto* opt : sub->get_options()) {
        if (opt->check_lname(name)) opt->default_val(value);
      }
    }
  }
}

std::string error_json(const std::string& kind, const std::string& message) {
  return json{{"error", kind}, {"message", message}}.dump();
}

std::string numerical_kind(const NumericalError& e) {
  if (dynamic_cast<const DegenerateError*>(&e)) return "degenerate";
  if (dynamic_cast<const InvalidBracketError*>(&e)) return "invalid_bracket";
  if (dynamic_cast<const SingularPointError*>(&e)) return "singular_point";
  if (dynamic_cast<const CollisionError*>(&e)) return "collision";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  return "numerical";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vortex street laboratory: fields, equilibria, streamline topology, bifurcations and dynamics",
               "vlab"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  const std::vector<std::string> tabular{"csv", "json"};

  FieldArgs field;
  auto* field_cmd = app.add_subcommand("field", "sample the stream function or velocity on a grid");
  add_common(field_cmd, field.common, {"csv", "json", "svg"});
  field_cmd->add_option("--frame", field.frame, "lab or comoving")->check(CLI::IsMember({"lab", "comoving"}));
  field_cmd->add_option("--source", field.source, "array, street or finite")
      ->check(CLI::IsMember({"array", "street", "finite"}));
  field_cmd->add_option("--quantity", field.quantity, "psi or velocity")->check(CLI::IsMember({"psi", "velocity"}));
  field_cmd->add_option("--window", field.window, "x_min,x_max,y_min,y_max");
  field_cmd->add_option("--nx", field.nx, "grid points along x")->capture_default_str();
  field_cmd->add_option("--ny", field.ny, "grid points along y")->capture_default_str();
  field_cmd->add_option("--levels", field.levels, "contour levels in SVG output")->capture_default_str();
  field_cmd->add_option("--u", field.u, "frame speed override");
  field_cmd->add_option("--n-streets", field.n_streets, "streets of the finite array")->capture_default_str();
  field_cmd->add_option("--per-row", field.per_row, "vortices per row of the finite array")->capture_default_str();

  StagnationArgs stagnation;
  auto* stagnation_cmd = app.add_subcommand("stagnation", "stagnation points of the co-moving array flow");
  add_common(stagnation_cmd, stagnation.common, tabular);
  stagnation_cmd->add_option("--ymin", stagnation.y_min, "lower edge of the search band");
  stagnation_cmd->add_option("--ymax", stagnation.y_max, "upper edge of the search band");

  SeparatrixArgs separatrix;
  auto* separatrix_cmd = app.add_subcommand("separatrix", "trace the separatrices of the reference saddles");
  add_common(separatrix_cmd, separatrix.common, tabular);
  separatrix_cmd->add_option("--budget", separatrix.budget, "arc-length budget per branch")->capture_default_str();

  Common topology;
  auto* topology_cmd = app.add_subcommand("topology", "streamline topology class");
  add_common(topology_cmd, topology, {"json"});

  EquilibriumArgs equilibrium;
  auto* equilibrium_cmd = app.add_subcommand("equilibrium", "translation speed U_N versus the number of streets");
  add_common(equilibrium_cmd, equilibrium.common, tabular);
  equilibrium_cmd->add_option("--hs", equilibrium.hs, "comma-separated h values")->capture_default_str();
  equilibrium_cmd->add_option("--n-list", equilibrium.n_list, "comma-separated truncation half-counts");

  BifurcateArgs bifurcate;
  auto* bifurcate_cmd = app.add_subcommand("bifurcate", "critical separations h_1..h_kmax");
  add_common(bifurcate_cmd, bifurcate.common, tabular);
  bifurcate_cmd->add_option("--kmax", bifurcate.k_max, "number of bifurcations")->capture_default_str();
  bifurcate_cmd->add_option("--tol", bifurcate.tol, "width of the final root bracket")->capture_default_str();
  bifurcate_cmd->add_option("--csv", bifurcate.csv, "also write the sequence as CSV here");

  CurvesArgs curves;
  auto* curves_cmd = app.add_subcommand("curves", "bifurcation curves over a b grid");
  add_common(curves_cmd, curves.common, tabular);
  curves_cmd->add_option("--bmin", curves.b_min)->capture_default_str();
  curves_cmd->add_option("--bmax", curves.b_max)->capture_default_str();
  curves_cmd->add_option("--increments", curves.increments)->capture_default_str();
  curves_cmd->add_option("--kmax", curves.k_max)->capture_default_str();

  ScalingArgs scaling;
  auto* scaling_cmd = app.add_subcommand("scaling", "fit h_k = h_inf + c / delta^k");
  add_common(scaling_cmd, scaling.common, tabular);
  scaling_cmd->add_option("--kmax", scaling.k_max)->capture_default_str();
  scaling_cmd->add_option("--window", scaling.window, "k_lo,k_hi")->capture_default_str();

  EvolveArgs evolve;
  auto* evolve_cmd = app.add_subcommand("evolve", "integrate a finite array in time");
  add_common(evolve_cmd, evolve.common, {"json"});
  evolve_cmd->add_option("--n-streets", evolve.n_streets)->capture_default_str();
  evolve_cmd->add_option("--per-row", evolve.per_row)->capture_default_str();
  evolve_cmd->add_option("--dt", evolve.dt, "fixed or initial time step")->capture_default_str();
  evolve_cmd->add_option("--tol", evolve.tol, "absolute tolerance of the adaptive scheme")->capture_default_str();
  evolve_cmd->add_option("--t-end", evolve.t_end)->capture_default_str();
  evolve_cmd->add_option("--snapshots", evolve.snapshots, "comma-separated snapshot times")->capture_default_str();
  evolve_cmd->add_option("--scheme", evolve.scheme)
      ->check(CLI::IsMember({"rk4-fixed", "rk45-adaptive"}))
      ->capture_default_str();
  evolve_cmd->add_option("--out-dir", evolve.out_dir, "directory for snapshot files")->capture_default_str();
  evolve_cmd->add_flag("--grid", evolve.grid, "dump co-moving stream-function grids (JSON and SVG)");
  evolve_cmd->add_option("--window", evolve.window, "grid window relative to the reference vortex");
  evolve_cmd->add_option("--nx", evolve.nx)->capture_default_str();
  evolve_cmd->add_option("--ny", evolve.ny)->capture_default_str();

  Common report;
  auto* report_cmd = app.add_subcommand("report", "summary of speed, equilibrium, topology and first bifurcations");
  add_common(report_cmd, report, {"json"});

  try {
    apply_config(app, args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what()) << '\n';
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << error_json("validation", e.what()) << '\n';
    return kExitValidation;
  }

  try {
    if (field_cmd->parsed()) run_field(field, out);
    if (stagnation_cmd->parsed()) run_stagnation(stagnation, out);
    if (separatrix_cmd->parsed()) run_separatrix(separatrix, out);
    if (topology_cmd->parsed()) run_topology(topology, out);
    if (equilibrium_cmd->parsed()) run_equilibrium(equilibrium, out);
    if (bifurcate_cmd->parsed()) run_bifurcate(bifurcate, out);
    if (curves_cmd->parsed()) run_curves(curves, out);
    if (scaling_cmd->parsed()) run_scaling(scaling, out);
    if (evolve_cmd->parsed()) return run_evolve(evolve, out);
    if (report_cmd->parsed()) run_report(report, out);
  } catch (const ValidationError& e) {
    err << error_json("validation", e.what()) << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << error_json(numerical_kind(e), e.what()) << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << error_json("io", e.what()) << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace vlab::cli
