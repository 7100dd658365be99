// mtfrac <command> --config <path> [--out <dir>] [--threads N] [--tol-profile strict|fast]
//
// Each command writes <command>.csv (header row, %.17g floats) and manifest.ini
// into the output directory: --out, else $MTFRAC_OUT_DIR, else [output] dir.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtfrac/acceptance.hpp"
#include "mtfrac/mtfrac.hpp"
#include "mtfrac/oracle.hpp"

namespace fs = std::filesystem;
using namespace mtfrac;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Rows are assembled in memory and written once, in order.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row_strings(header); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    for (double v : values) s.push_back(g17(v));
    row_strings(s);
  }

  void row_strings(const std::vector<std::string>& values) {
    if (values.size() != cols_) throw Error("csv row has the wrong number of columns");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }

  void write(const fs::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << out_.str();
  }

 private:
  std::size_t cols_;
  std::ostringstream out_;
};

/// key = value lines appended to the manifest's [results] section.
struct Results {
  std::vector<std::pair<std::string, std::string>> items;
  void add(const std::string& k, double v) { items.emplace_back(k, g17(v)); }
  void add(const std::string& k, const std::string& v) { items.emplace_back(k, v); }
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_manifest(const fs::path& dir, const RunConfig& c, const fs::path& config_path, const Results& r) {
  std::ofstream f(dir / "manifest.ini", std::ios::binary);
  if (!f) throw Error("cannot write manifest");
  f << "[run]\ncommand = " << to_string(c.command) << "\nversion = " << kVersion << "\ntimestamp = " << timestamp()
    << "\nconfig = " << config_path.string() << "\ntol_profile = " << to_string(c.tol_profile) << "\nthreads = " << c.threads
    << "\n\n";
  f << "[constants]\nseries_max_shells = " << kMaxSeriesShells << "\nseries_peak_limit = " << num(kSeriesPeakLimit)
    << "\nseries_tol = " << num(tol::kSeriesDefault) << "\node_residual_tol = " << num(tol::kOdeResidual)
    << "\nasymptotic_min_time = " << num(kAsymptoticMinTime) << "\nshort_time_drop = " << num(kShortTimeDrop)
    << "\ngrowth_factor = " << num(oracle::kGrowthFactor) << "\n\n";
  f << "[results]\n";
  for (const auto& [k, v] : r.items) f << k << " = " << v << '\n';
  f << '\n' << config_echo(c);
}

// ---------------------------------------------------------------------------
// Commands. Each fills `csvs` (file stem -> table) and `results`.

using Tables = std::vector<std::pair<std::string, Csv>>;

void run_mml_eval(const RunConfig& c, Tables& out, Results& res) {
  if (!c.mml) throw DomainError("mml-eval needs an [mml] section");
  const auto& m = *c.mml;
  const MLParams params(m.beta0, m.betas);
  MLArgs base;
  for (std::size_t j = 0; j < m.z.size(); ++j) base.z.emplace_back(m.z[j], m.z_imag.empty() ? 0.0 : m.z_imag[j]);
  std::vector<MLArgs> points;
  if (m.z1_scan) {
    const auto& s = *m.z1_scan;
    for (double x : log_grid(s[0], s[1], static_cast<int>(s[2]))) {
      MLArgs a = base;
      a.z[0] = cplx(-x, 0.0);
      points.push_back(a);
    }
  } else {
    points.push_back(base);
  }
  Csv csv({"z1_re", "z1_im", "value_re", "value_im", "error_estimate", "method"});
  for (const auto& a : points) {
    const auto r = mml_eval(params, a);
    csv.row_strings({g17(a.z[0].real()), g17(a.z[0].imag()), g17(r.value.real()), g17(r.value.imag()),
                     g17(r.abs_error_estimate), to_string(r.method)});
  }
  res.add("points", static_cast<double>(points.size()));
  out.emplace_back("mml_eval", std::move(csv));
}

void run_eigen(const RunConfig& c, Tables& out, Results& res) {
  const auto op = c.make_operator();
  const auto s = eigendecompose(op);
  const int k = std::min<int>(c.numerics.n_modes_out, static_cast<int>(s.n_modes()));
  Csv vals({"n", "lambda"});
  for (int n = 0; n < k; ++n) vals.row({static_cast<double>(n + 1), s.lambdas(n)});
  std::vector<std::string> header{"x"};
  for (int n = 0; n < k; ++n) header.push_back("phi_" + std::to_string(n + 1));
  Csv vecs(header);
  for (int i = 0; i < op.n_interior(); ++i) {
    std::vector<double> row{op.x(i)};
    for (int n = 0; n < k; ++n) row.push_back(s.eigvecs(i, n));
    vecs.row(row);
  }
  res.add("lambda_1", s.lambdas(0));
  res.add("modes_written", static_cast<double>(k));
  out.emplace_back("eigen", std::move(vals));
  out.emplace_back("eigenvectors", std::move(vecs));
}

/// Norms of u(t) on the time grid; short_time_norm is ||u(t) - a|| in
/// D((-L)^gamma), with gamma + 1 - tau when a source is present.
void run_solve(const RunConfig& c, Tables& out, Results& res) {
  const Problem p = c.make_problem();
  const auto times = c.times();
  QuadConfig q;
  q.panels = c.numerics.quad_panels;
  q.refine_tol = c.numerics.refine_tol;
  q.threads = c.threads;
  const double order = p.homogeneous() ? c.numerics.gamma : c.numerics.gamma + 1.0 - c.numerics.tau;
  const Eigen::VectorXd a = p.initial_modal();
  Csv norms({"t", "l2_norm", "dl_norm", "short_time_norm"});
  std::vector<std::string> header{"x"};
  for (std::size_t i = 0; i < times.size(); ++i) header.push_back("u_t" + std::to_string(i));
  Csv profiles(header);
  std::vector<GridFunction> us;
  for (double t : times) {
    // a time-independent source has closed-form modal coefficients
    const GridFunction u = p.source && p.source->time_independent()
                               ? GridFunction(ModalSolution(p).homogeneous(t) +
                                              synthesize(constant_source_coefficients(p, t), *p.spectrum))
                               : solve(p, t, q);
    const Eigen::VectorXd cu = project(u, *p.spectrum);
    norms.row({t, l2_norm(u, p.op->h()), frac_norm_modal(cu, 1.0, *p.spectrum),
               frac_norm_modal(cu - a, order, *p.spectrum)});
    us.push_back(u);
  }
  for (int i = 0; i < p.op->n_interior(); ++i) {
    std::vector<double> row{p.op->x(i)};
    for (const auto& u : us) row.push_back(u(i));
    profiles.row(row);
  }
  res.add("short_time_norm_order", order);
  out.emplace_back("solve", std::move(norms));
  out.emplace_back("solution", std::move(profiles));
}

void run_asymptotics(const RunConfig& c, Tables& out, Results& res) {
  const Problem p = c.make_problem();
  if (!p.homogeneous()) throw DomainError("asymptotics needs [source] kind = none");
  const auto times = c.times();
  const auto rows = asymptotic_table(p, times);
  Csv csv({"t", "l2_norm", "dl_norm", "leading_norm", "scaled_residual"});
  std::vector<double> dl;
  for (const auto& r : rows) {
    csv.row({r.t, r.l2_norm, r.dl_norm, r.leading_norm, r.scaled_residual});
    dl.push_back(r.dl_norm);
  }
  if (times.size() >= 5) {
    const auto fit = decay_fit(times, dl);
    res.add("fitted_exponent", fit.exponent);
    res.add("fit_r_squared", fit.r_squared);
  }
  res.add("expected_exponent", -p.orders.alpha_min());
  res.add("residual_exponent", residual_exponent(p.orders));
  res.add("residual_exponent_substituted", residual_exponent_substituted(p.orders) ? "true" : "false");
  const auto band = decay_band(p, times);
  res.add("band_lower", band.lower);
  res.add("band_upper", band.upper);
  out.emplace_back("asymptotics", std::move(csv));
}

/// Channels alpha, q, D and combined, each halved `levels` times.
void run_stability(const RunConfig& c, Tables& out, Results& res) {
  const auto& n = c.numerics;
  const Problem base = c.make_problem();
  if (!base.homogeneous()) throw DomainError("stability needs [source] kind = none");
  const auto& op = *base.op;
  const auto perturbed = [&](double da, double dq, double dd) {
    std::vector<double> alphas = c.alphas, qs = c.qs;
    for (auto& a : alphas) a += da;
    if (qs.size() > 1) qs.back() += dq;
    std::vector<double> d = op.diffusion_nodes();
    // a nonnegative bump keeps D positive; node i sits at left + i h
    const double w = op.interval().right - op.interval().left;
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] += dd * std::sin(std::numbers::pi * op.h() * static_cast<double>(i) / w);
    }
    return Problem(FracOrders(alphas, qs), Operator1D(op.interval(), op.n_interior(), d, op.potential()), base.initial);
  };
  const char* names[] = {"alpha", "q", "D", "combined"};
  const int levels = n.levels;
  std::vector<LipschitzReport> reports(static_cast<std::size_t>(4 * levels));
  const LipschitzConfig lc{n.horizon, n.time_steps, 2.0};
  parallel_for(reports.size(), c.threads, [&](std::size_t k) {
    const int ch = static_cast<int>(k) / levels;
    const double e = std::pow(2.0, -static_cast<int>(k % static_cast<std::size_t>(levels)));
    const double da = ch == 0 || ch == 3 ? n.d_alpha * e : 0.0;
    const double dq = ch == 1 || ch == 3 ? n.d_q * e : 0.0;
    const double dd = ch == 2 || ch == 3 ? n.d_diffusion * e : 0.0;
    reports[k] = lipschitz_experiment(base, perturbed(da, dq, dd), n.gamma, n.tau, lc);
  });
  Csv csv({"channel", "level", "delta", "solution_diff", "ratio"});
  for (int ch = 0; ch < 4; ++ch) {
    double lo = INFINITY, hi = 0.0;
    for (int lv = 0; lv < levels; ++lv) {
      const auto& r = reports[static_cast<std::size_t>(ch * levels + lv)];
      csv.row_strings({names[ch], std::to_string(lv), g17(r.delta), g17(r.solution_diff), g17(r.ratio)});
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    res.add(std::string("ratio_spread_") + names[ch], hi / lo);
  }
  res.add("norm", reports.front().norm_name);
  out.emplace_back("stability", std::move(csv));
}

void run_counterexample(const RunConfig& c, Tables& out, Results& res) {
  const auto& n = c.numerics;
  const oracle::L1Config cfg{n.t_final, n.l1_steps, n.l1_grading};
  const auto neg = oracle::counterexample_run(n.lambda, cfg, -1.0);
  const auto pos = oracle::counterexample_run(n.lambda, cfg, +1.0);
  Csv csv({"t", "abs_u"});
  for (std::size_t i = 0; i < neg.series.t.size(); ++i) csv.row({neg.series.t[i], std::abs(neg.series.u[i])});
  Csv control({"t", "abs_u"});
  for (std::size_t i = 0; i < pos.series.t.size(); ++i) control.row({pos.series.t[i], std::abs(pos.series.u[i])});
  const std::string verdict = "verdict: " + neg.verdict() + " (peak " + g17(neg.max_abs) + "), control " + pos.verdict();
  std::cout << verdict << '\n';
  res.add("verdict", neg.verdict());
  res.add("control_verdict", pos.verdict());
  res.add("r_plus", neg.r_plus);
  res.add("r_minus", neg.r_minus);
  res.add("r_plus_newton", neg.r_plus_solved);
  res.add("r_minus_newton", neg.r_minus_solved);
  res.add("peak_abs_u", neg.max_abs);
  out.emplace_back("counterexample", std::move(csv));
  out.emplace_back("counterexample_control", std::move(control));
}

bool run_verify(const RunConfig& c, Tables& out, Results& res) {
  acceptance::Options opt;
  opt.threads = c.threads;
  opt.n_interior = c.n_interior;
  int failed = 0;
  Csv csv({"id", "name", "passed", "seconds", "detail"});
  acceptance::run_all(opt, [&](const acceptance::Criterion& cr) {
    std::cout << acceptance::line(cr) << std::endl;
    if (!cr.passed) ++failed;
    std::string detail = cr.detail;
    for (char& ch : detail) {
      if (ch == '"') ch = '\'';
    }
    csv.row_strings({std::to_string(cr.id), "\"" + cr.name + "\"", cr.passed ? "1" : "0", g17(cr.seconds),
                     "\"" + detail + "\""});
  });
  res.add("failed", static_cast<double>(failed));
  out.emplace_back("verify", std::move(csv));
  return failed == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-term time-fractional diffusion: evaluation, solvers and checks"};
  std::string command, config_path, out_dir, tol_profile = "strict";
  int threads = 1;
  std::vector<std::string> names;
  for (const auto& [name, _] : command_names()) names.push_back(name);
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "INI configuration file")->required();
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol-profile", tol_profile, "Tolerance profile")->check(CLI::IsMember({"strict", "fast"}));
  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig c = parse_config(config_path, parse_command(command));
    c.threads = threads;
    apply_tol_profile(c, parse_tol_profile(tol_profile));
    c.validate();

    fs::path dir = c.output_dir;
    if (const char* env = std::getenv("MTFRAC_OUT_DIR"); env && *env) dir = env;
    if (!out_dir.empty()) dir = out_dir;
    fs::create_directories(dir);

    Tables tables;
    Results results;
    bool ok = true;
    switch (c.command) {
      case Command::MmlEval: run_mml_eval(c, tables, results); break;
      case Command::Eigen: run_eigen(c, tables, results); break;
      case Command::Solve: run_solve(c, tables, results); break;
      case Command::Asymptotics: run_asymptotics(c, tables, results); break;
      case Command::Stability: run_stability(c, tables, results); break;
      case Command::Counterexample: run_counterexample(c, tables, results); break;
      case Command::Verify: ok = run_verify(c, tables, results); break;
    }
    for (const auto& [stem, csv] : tables) csv.write(dir / (stem + ".csv"));
    write_manifest(dir, c, config_path, results);
    std::cerr << "wrote " << dir.string() << '\n';
    return ok ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "mtfrac: error: " << e.what() << '\n';
    return 1;
  }
}
