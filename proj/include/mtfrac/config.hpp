#pragma once

// Run configuration: a strict INI schema plus the built-in presets.
//
//   [preset]    name = thm21 | thm22 | thm23 | thm24 | rem36   (optional base)
//   [orders]    alphas = 0.9, 0.3      qs = 1, 1
//   [operator]  n_interior = 127
//               diffusion = constant 1 | linear l r | sinusoidal base amp k | tabulated v0 v1 ...
//               potential = (same forms, values <= 0)
//   [initial]   shape = zero | parabola | sine | mode | tabulated   mode = 1   amplitude = 1
//               samples = v0, v1, ...   (tabulated, interior nodes)
//   [source]    kind = none | constant | ramp   shape/mode/amplitude/samples as [initial]
//               dt = 0.01   horizon = 10   (ramp: F(x,t) = t * shape(x), sampled every dt)
//   [mml]       beta0 = 1   betas = 0.5   z = -1   z_imag = 0   z1_scan = lo, hi, n
//   [numerics]  see NumericsSpec
//   [output]    dir = mtfrac_out
//
// Unknown sections or keys are errors.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mtfrac/error.hpp"
#include "mtfrac/orders.hpp"
#include "mtfrac/solver.hpp"
#include "mtfrac/spectral.hpp"

namespace mtfrac {

/// Shortest decimal that round-trips to the same double.
inline std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

enum class Command { MmlEval, Eigen, Solve, Asymptotics, Stability, Counterexample, Verify };

inline const std::vector<std::pair<std::string, Command>>& command_names() {
  static const std::vector<std::pair<std::string, Command>> names{
      {"mml-eval", Command::MmlEval},     {"eigen", Command::Eigen},
      {"solve", Command::Solve},         {"asymptotics", Command::Asymptotics},
      {"stability", Command::Stability}, {"counterexample", Command::Counterexample},
      {"verify", Command::Verify}};
  return names;
}

inline Command parse_command(const std::string& s) {
  for (const auto& [name, c] : command_names()) {
    if (name == s) return c;
  }
  throw DomainError("unknown command '" + s + "'");
}

inline std::string to_string(Command c) {
  for (const auto& [name, v] : command_names()) {
    if (v == c) return name;
  }
  return "?";
}

enum class TolProfile { Strict, Fast };

inline TolProfile parse_tol_profile(const std::string& s) {
  if (s == "strict") return TolProfile::Strict;
  if (s == "fast") return TolProfile::Fast;
  throw DomainError("tol-profile must be strict or fast");
}

inline std::string to_string(TolProfile p) { return p == TolProfile::Strict ? "strict" : "fast"; }

/// A named spatial profile with numeric parameters, e.g. "sinusoidal 1 0.2 2".
struct ProfileSpec {
  std::string kind = "constant";
  std::vector<double> params{1.0};

  Profile to_profile() const {
    const auto need = [&](std::size_t n) {
      if (params.size() != n) {
        throw DomainError("profile '" + kind + "' needs " + std::to_string(n) + " parameters");
      }
    };
    if (kind == "constant") {
      need(1);
      return Profile::constant(params[0]);
    }
    if (kind == "linear") {
      need(2);
      return Profile::linear(params[0], params[1]);
    }
    if (kind == "sinusoidal") {
      need(3);
      return Profile::sinusoidal(params[0], params[1], params[2]);
    }
    if (kind == "tabulated") {
      if (params.size() < 2) throw DomainError("profile 'tabulated' needs at least 2 samples");
      return Profile::tabulated(params);
    }
    throw DomainError("unknown profile '" + kind + "' (constant, linear, sinusoidal, tabulated)");
  }

  std::string str() const {
    std::ostringstream os;
    os << kind;
    for (double p : params) os << ' ' << num(p);
    return os.str();
  }
};

/// Spatial shape of the initial value or the source.
struct ShapeSpec {
  std::string shape = "parabola";
  int mode = 1;
  double amplitude = 1.0;
  std::vector<double> samples;

  GridFunction sample(const Operator1D& op, const Spectrum& s) const {
    GridFunction g;
    if (shape == "zero") {
      g = GridFunction::Zero(op.n_interior());
    } else if (shape == "parabola") {
      g = op.sample([&](double x) {
        const double l = op.interval().left;
        const double r = op.interval().right;
        return (x - l) * (r - x);
      });
    } else if (shape == "sine") {
      g = op.sample([&](double x) {
        const double l = op.interval().left;
        return std::sin(std::numbers::pi * (x - l) / (op.interval().right - l));
      });
    } else if (shape == "mode") {
      if (mode < 1 || mode > s.n_modes()) throw DomainError("mode must lie in [1, n_interior]");
      g = s.mode(mode - 1);
    } else if (shape == "tabulated") {
      if (static_cast<int>(samples.size()) != op.n_interior()) {
        throw DomainError("tabulated shape needs n_interior samples");
      }
      g = Eigen::Map<const GridFunction>(samples.data(), static_cast<Eigen::Index>(samples.size()));
    } else {
      throw DomainError("unknown shape '" + shape + "' (zero, parabola, sine, mode, tabulated)");
    }
    return amplitude * g;
  }
};

struct SourceSpec {
  std::string kind = "none";  // none | constant | ramp
  ShapeSpec shape;
  double dt = 0.01;
  double horizon = 10.0;
};

struct MmlSpec {
  double beta0 = 1.0;
  std::vector<double> betas{0.5};
  std::vector<double> z{-1.0};
  std::vector<double> z_imag;
  std::optional<std::vector<double>> z1_scan;  // lo, hi, n: z_1 = -x on a log grid
};

struct NumericsSpec {
  // time grid for solve / asymptotics
  double t_min = 1e2;
  double t_max = 1e4;
  int n_times = 9;
  // eigen
  int n_modes_out = 20;
  // counterexample / L1
  double lambda = 10.0;
  double t_final = 5.0;
  int l1_steps = 2000;
  double l1_grading = 4.0;
  // quadrature
  int quad_panels = 16;
  double refine_tol = 1e-5;
  // short-time and stability
  double gamma = 1.0;
  double tau = 1.0;
  double horizon = 2.0;
  int time_steps = 40;
  int levels = 7;
  double d_alpha = 0.05;
  double d_q = 0.3;
  double d_diffusion = 0.1;
  // series
  double series_tol = 1e-14;
};

struct RunConfig {
  Command command = Command::Verify;
  TolProfile tol_profile = TolProfile::Strict;
  std::string preset;
  std::vector<double> alphas{0.5};
  std::vector<double> qs{1.0};
  int n_interior = 127;
  ProfileSpec diffusion;
  ProfileSpec potential{"constant", {0.0}};
  ShapeSpec initial;
  SourceSpec source;
  std::optional<MmlSpec> mml;
  NumericsSpec numerics;
  std::string output_dir = "mtfrac_out";
  int threads = 1;

  FracOrders orders() const { return FracOrders(alphas, qs); }

  Operator1D make_operator() const {
    return Operator1D::from_profiles(Interval{}, n_interior, diffusion.to_profile(), potential.to_profile());
  }

  /// Operator, spectrum, initial value and optional source.
  Problem make_problem() const {
    auto op = std::make_shared<const Operator1D>(make_operator());
    auto sp = std::make_shared<const Spectrum>(eigendecompose(*op));
    const GridFunction a = initial.sample(*op, *sp);
    std::optional<SourceSamples> src;
    if (source.kind == "constant") {
      src = SourceSamples::constant(source.shape.sample(*op, *sp), *sp);
    } else if (source.kind == "ramp") {
      const GridFunction f = source.shape.sample(*op, *sp);
      const int frames = static_cast<int>(std::ceil(source.horizon / source.dt)) + 1;
      std::vector<GridFunction> fr;
      for (int k = 0; k < frames; ++k) fr.push_back(source.dt * k * f);
      src = SourceSamples::from_grid(fr, source.dt, *sp);
    }
    return Problem(orders(), std::move(op), std::move(sp), a, std::move(src));
  }

  std::vector<double> times() const { return log_grid(numerics.t_min, numerics.t_max, numerics.n_times); }

  /// Throws DomainError naming the first violated constraint.
  void validate() const {
    FracOrders::validate(alphas, qs);
    if (n_interior < 3) throw DomainError("n_interior must be >= 3");
    if (source.kind != "none" && source.kind != "constant" && source.kind != "ramp") {
      throw DomainError("source kind must be none, constant or ramp");
    }
    if (threads < 1) throw DomainError("threads must be >= 1");
    const auto& n = numerics;
    const auto positive = [](double v, const char* key) {
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(key) + " must be positive");
    };
    positive(n.t_min, "t_min");
    positive(n.t_max, "t_max");
    if (!(n.t_max >= n.t_min)) throw DomainError("t_max must be >= t_min");
    if (n.n_times < 1) throw DomainError("n_times must be positive");
    if (n.n_modes_out < 1) throw DomainError("n_modes_out must be positive");
    positive(n.lambda, "lambda");
    positive(n.t_final, "t_final");
    if (n.l1_steps < 2) throw DomainError("l1_steps must be >= 2");
    if (!(n.l1_grading >= 1.0)) throw DomainError("l1_grading must be >= 1");
    if (n.quad_panels < 1) throw DomainError("quad_panels must be positive");
    positive(n.refine_tol, "refine_tol");
    if (!(n.gamma > 0.0 && n.gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
    if (!(n.tau > 0.0 && n.tau <= 1.0)) throw DomainError("tau must lie in (0, 1]");
    positive(n.horizon, "horizon");
    if (n.time_steps < 2) throw DomainError("time_steps must be >= 2");
    if (n.levels < 2) throw DomainError("levels must be >= 2");
    positive(n.d_alpha, "d_alpha");
    positive(n.d_q, "d_q");
    positive(n.d_diffusion, "d_diffusion");
    positive(n.series_tol, "series_tol");
    if (source.kind == "ramp") {
      positive(source.dt, "source dt");
      positive(source.horizon, "source horizon");
    }
    if (mml) {
      MLParams(mml->beta0, mml->betas);
      if (mml->z.size() != mml->betas.size()) throw DomainError("mml z must have one entry per beta");
      if (!mml->z_imag.empty() && mml->z_imag.size() != mml->z.size()) {
        throw DomainError("mml z_imag must match z in length");
      }
      if (mml->z1_scan) {
        const auto& s = *mml->z1_scan;
        if (s.size() != 3 || !(s[0] > 0.0) || !(s[1] >= s[0]) || !(s[2] >= 1.0) || s[2] != std::floor(s[2])) {
          throw DomainError("mml z1_scan must be lo, hi, n with 0 < lo <= hi and integer n >= 1");
        }
      }
    }
    // builds the operator, spectrum and data once so grid-level violations surface here
    make_problem();
  }
};

/// Numerics overrides for --tol-profile fast: coarser grids, same checks.
inline void apply_tol_profile(RunConfig& c, TolProfile p) {
  c.tol_profile = p;
  if (p == TolProfile::Fast) {
    c.numerics.l1_steps = std::max(200, c.numerics.l1_steps / 4);
    c.numerics.time_steps = std::max(10, c.numerics.time_steps / 2);
    c.numerics.levels = std::min(c.numerics.levels, 4);
    c.n_interior = std::min(c.n_interior, 63);
  }
}

// ---------------------------------------------------------------------------
// Presets

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"thm21", "thm22", "thm23", "thm24", "rem36"};
  return names;
}

/// thm21: short-time limit without source; thm22: with a constant source;
/// thm23: Lipschitz stability; thm24: long-time decay; rem36: negative weight.
inline RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "thm21") {
    c.command = Command::Solve;
    c.alphas = {0.7, 0.3};
    c.qs = {1.0, 1.0};
    c.numerics.t_min = 1e-8;
    c.numerics.t_max = 1e-1;
    c.numerics.n_times = 8;
    c.numerics.gamma = 0.5;
  } else if (name == "thm22") {
    c.command = Command::Solve;
    c.alphas = {0.7, 0.3};
    c.qs = {1.0, 1.0};
    c.initial.shape = "zero";
    c.source.kind = "constant";
    c.numerics.t_min = 1e-8;
    c.numerics.t_max = 1e-1;
    c.numerics.n_times = 8;
    c.numerics.gamma = 0.5;
    c.numerics.tau = 0.5;
  } else if (name == "thm23") {
    c.command = Command::Stability;
    c.alphas = {0.7, 0.3};
    c.qs = {1.0, 1.5};
    c.diffusion = {"sinusoidal", {1.0, 0.2, 2.0}};
  } else if (name == "thm24") {
    c.command = Command::Asymptotics;
    c.alphas = {0.9, 0.3};
    c.qs = {1.0, 1.0};
  } else if (name == "rem36") {
    c.command = Command::Counterexample;
    c.alphas = {0.5, 0.25};
    c.qs = {1.0, 1.0};
    c.numerics.lambda = 10.0;
    c.numerics.t_final = 5.0;
  } else {
    throw DomainError("unknown preset '" + name + "' (thm21, thm22, thm23, thm24, rem36)");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw DomainError(key + ": expected a number, got '" + raw + "'");
  }
  return v;
}

inline int parse_int(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw DomainError(key + ": expected an integer, got '" + raw + "'");
  }
  return v;
}

inline std::vector<double> parse_list(const std::string& raw, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, key));
  if (out.empty()) throw DomainError(key + ": expected a comma-separated list");
  return out;
}

/// "kind p1 p2 ..." separated by spaces.
inline ProfileSpec parse_profile(const std::string& raw, const std::string& key) {
  std::stringstream ss(raw);
  ProfileSpec p;
  p.params.clear();
  ss >> p.kind;
  std::string tok;
  while (ss >> tok) p.params.push_back(parse_double(tok, key));
  p.to_profile();
  return p;
}

using Section = boost::property_tree::ptree;

/// Applies `handlers` to every key of the section; unknown keys are errors.
template <class Handlers>
void each_key(const Section& sec, const std::string& name, const Handlers& handlers) {
  for (const auto& [key, node] : sec) {
    if (!node.empty()) throw DomainError("[" + name + "] " + key + ": nested values are not allowed");
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw DomainError("[" + name + "] unknown key '" + key + "'");
    it->second(node.data(), name + "." + key);
  }
}

using Handler = std::function<void(const std::string&, const std::string&)>;

inline std::map<std::string, Handler> shape_handlers(ShapeSpec& s) {
  return {{"shape", [&](const std::string& v, const std::string&) { s.shape = trim(v); }},
          {"mode", [&](const std::string& v, const std::string& k) { s.mode = parse_int(v, k); }},
          {"amplitude", [&](const std::string& v, const std::string& k) { s.amplitude = parse_double(v, k); }},
          {"samples", [&](const std::string& v, const std::string& k) { s.samples = parse_list(v, k); }}};
}

}  // namespace detail

/// Parses INI text. Presets are applied first, explicit keys override them.
inline RunConfig parse_config_text(const std::string& text, Command command) {
  using namespace detail;
  Section tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw DomainError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [name, sec] : tree) {
    if (sec.empty()) throw DomainError("config key '" + name + "' outside a section");
  }

  RunConfig c;
  if (const auto p = tree.get_child_optional("preset")) {
    for (const auto& [key, node] : *p) {
      if (key != "name") throw DomainError("[preset] unknown key '" + key + "'");
      c = preset_config(trim(node.data()));
    }
  }
  c.command = command;

  static const std::set<std::string> known{"preset", "orders", "operator", "initial", "source", "mml", "numerics", "output"};
  for (const auto& [name, sec] : tree) {
    if (!known.count(name)) throw DomainError("unknown section [" + name + "]");
  }

  if (const auto s = tree.get_child_optional("orders")) {
    each_key(*s, "orders", std::map<std::string, Handler>{
        {"alphas", [&](const std::string& v, const std::string& k) { c.alphas = parse_list(v, k); }},
        {"qs", [&](const std::string& v, const std::string& k) { c.qs = parse_list(v, k); }}});
  }
  if (const auto s = tree.get_child_optional("operator")) {
    each_key(*s, "operator", std::map<std::string, Handler>{
        {"n_interior", [&](const std::string& v, const std::string& k) { c.n_interior = parse_int(v, k); }},
        {"diffusion", [&](const std::string& v, const std::string& k) { c.diffusion = parse_profile(v, k); }},
        {"potential", [&](const std::string& v, const std::string& k) { c.potential = parse_profile(v, k); }}});
  }
  if (const auto s = tree.get_child_optional("initial")) each_key(*s, "initial", shape_handlers(c.initial));
  if (const auto s = tree.get_child_optional("source")) {
    auto h = shape_handlers(c.source.shape);
    h["kind"] = [&](const std::string& v, const std::string&) { c.source.kind = trim(v); };
    h["dt"] = [&](const std::string& v, const std::string& k) { c.source.dt = parse_double(v, k); };
    h["horizon"] = [&](const std::string& v, const std::string& k) { c.source.horizon = parse_double(v, k); };
    each_key(*s, "source", h);
  }
  if (const auto s = tree.get_child_optional("mml")) {
    MmlSpec m;
    each_key(*s, "mml", std::map<std::string, Handler>{
        {"beta0", [&](const std::string& v, const std::string& k) { m.beta0 = parse_double(v, k); }},
        {"betas", [&](const std::string& v, const std::string& k) { m.betas = parse_list(v, k); }},
        {"z", [&](const std::string& v, const std::string& k) { m.z = parse_list(v, k); }},
        {"z_imag", [&](const std::string& v, const std::string& k) { m.z_imag = parse_list(v, k); }},
        {"z1_scan", [&](const std::string& v, const std::string& k) { m.z1_scan = parse_list(v, k); }}});
    c.mml = m;
  }
  if (const auto s = tree.get_child_optional("numerics")) {
    auto& n = c.numerics;
    const auto dbl = [](double& field) {
      return Handler([&field](const std::string& v, const std::string& k) { field = parse_double(v, k); });
    };
    const auto integer = [](int& field) {
      return Handler([&field](const std::string& v, const std::string& k) { field = parse_int(v, k); });
    };
    each_key(*s, "numerics", std::map<std::string, Handler>{
        {"t_min", dbl(n.t_min)},           {"t_max", dbl(n.t_max)},
        {"n_times", integer(n.n_times)},   {"n_modes_out", integer(n.n_modes_out)},
        {"lambda", dbl(n.lambda)},         {"t_final", dbl(n.t_final)},
        {"l1_steps", integer(n.l1_steps)}, {"l1_grading", dbl(n.l1_grading)},
        {"quad_panels", integer(n.quad_panels)}, {"refine_tol", dbl(n.refine_tol)},
        {"gamma", dbl(n.gamma)},           {"tau", dbl(n.tau)},
        {"horizon", dbl(n.horizon)},       {"time_steps", integer(n.time_steps)},
        {"levels", integer(n.levels)},     {"d_alpha", dbl(n.d_alpha)},
        {"d_q", dbl(n.d_q)},               {"d_diffusion", dbl(n.d_diffusion)},
        {"series_tol", dbl(n.series_tol)}});
  }
  if (const auto s = tree.get_child_optional("output")) {
    each_key(*s, "output", std::map<std::string, Handler>{
        {"dir", [&](const std::string& v, const std::string&) { c.output_dir = trim(v); }}});
  }
  c.validate();
  return c;
}

inline RunConfig parse_config(const std::filesystem::path& path, Command command) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), command);
}

/// Config echo in the same INI layout.
inline std::string config_echo(const RunConfig& c) {
  std::ostringstream os;
  const auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
  };
  if (!c.preset.empty()) os << "[preset]\nname = " << c.preset << "\n\n";
  os << "[orders]\nalphas = " << list(c.alphas) << "\nqs = " << list(c.qs) << "\n\n";
  os << "[operator]\nn_interior = " << c.n_interior << "\ndiffusion = " << c.diffusion.str()
     << "\npotential = " << c.potential.str() << "\n\n";
  os << "[initial]\nshape = " << c.initial.shape << "\nmode = " << c.initial.mode << "\namplitude = " << num(c.initial.amplitude)
     << "\n\n";
  os << "[source]\nkind = " << c.source.kind << "\nshape = " << c.source.shape.shape << "\nmode = " << c.source.shape.mode
     << "\namplitude = " << num(c.source.shape.amplitude) << "\ndt = " << num(c.source.dt) << "\nhorizon = " << num(c.source.horizon)
     << "\n\n";
  if (c.mml) {
    os << "[mml]\nbeta0 = " << num(c.mml->beta0) << "\nbetas = " << list(c.mml->betas) << "\nz = " << list(c.mml->z) << "\n";
    if (!c.mml->z_imag.empty()) os << "z_imag = " << list(c.mml->z_imag) << "\n";
    if (c.mml->z1_scan) os << "z1_scan = " << list(*c.mml->z1_scan) << "\n";
    os << "\n";
  }
  const auto& n = c.numerics;
  os << "[numerics]\nt_min = " << num(n.t_min) << "\nt_max = " << num(n.t_max) << "\nn_times = " << n.n_times
     << "\nn_modes_out = " << n.n_modes_out << "\nlambda = " << num(n.lambda) << "\nt_final = " << num(n.t_final)
     << "\nl1_steps = " << n.l1_steps << "\nl1_grading = " << num(n.l1_grading) << "\nquad_panels = " << n.quad_panels
     << "\nrefine_tol = " << num(n.refine_tol) << "\ngamma = " << num(n.gamma) << "\ntau = " << num(n.tau) << "\nhorizon = " << num(n.horizon)
     << "\ntime_steps = " << n.time_steps << "\nlevels = " << n.levels << "\nd_alpha = " << num(n.d_alpha)
     << "\nd_q = " << num(n.d_q) << "\nd_diffusion = " << num(n.d_diffusion) << "\nseries_tol = " << num(n.series_tol) << "\n\n";
  os << "[output]\ndir = " << c.output_dir << "\n";
  return os.str();
}

}  // namespace mtfrac
