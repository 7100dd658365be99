#pragma once

// Acceptance suite: thirteen checks, each a pure function returning a
// Criterion. Shared by the acceptance test binary and `mtfrac verify`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mtfrac/analysis.hpp"
#include "mtfrac/oracle.hpp"
#include "mtfrac/solver.hpp"
#include "mtfrac/specfun.hpp"

namespace mtfrac::acceptance {

struct Criterion {
  Criterion() = default;
  Criterion(int id_, std::string name_, double budget_) : id(id_), name(std::move(name_)), budget(budget_) {}

  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // wall-clock limit in seconds
};

struct Options {
  int threads = 1;
  int n_interior = 127;  // grid for the PDE-level checks
};

namespace detail {

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

inline GridFunction parabola(const Operator1D& op) {
  return op.sample([](double x) { return x * (std::numbers::pi - x); });
}

/// m terms with alpha_1 in [0.3, 0.95], strictly decreasing, weights in [0.2, 3].
inline FracOrders random_orders(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> a{0.3 + 0.65 * unit(rng)};
  std::vector<double> q{1.0};
  for (int j = 1; j < m; ++j) {
    a.push_back(a.back() * (0.2 + 0.7 * unit(rng)));
    q.push_back(0.2 + 2.8 * unit(rng));
  }
  return FracOrders(a, q);
}

inline double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace detail

// ---------------------------------------------------------------------------

inline Criterion recurrence(const Options&) {
  Criterion c(1, "multinomial recurrence exact for k <= 12, m <= 4", 1.0);
  long checked = 0;
  long bad = 0;
  for (int m = 1; m <= 4; ++m) {
    for (int k = 1; k <= 12; ++k) {
      std::vector<int> parts(static_cast<std::size_t>(m), 0);
      parts[0] = k;
      do {
        Uint128 sum = 0;
        for (std::size_t j = 0; j < parts.size(); ++j) {
          auto lowered = parts;
          lowered[j] -= 1;
          sum += multinomial_coefficient(k - 1, lowered);
        }
        ++checked;
        if (sum != multinomial_coefficient(k, parts)) ++bad;
      } while (next_composition(parts));
    }
  }
  c.passed = bad == 0;
  c.detail = detail::format("%ld compositions, %ld mismatches", checked, bad);
  return c;
}

/// Arguments come from the l1 ball sum_j |z_j| <= 2, so every |z_j| <= 2.
/// The full polydisc is out of double-precision reach for small beta_j.
inline Criterion identity(const Options& opt) {
  Criterion c(2, "relation between multinomial functions, 200 tuples", 10.0);
  constexpr int kTrials = 200;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<MLParams> params;
  std::vector<MLArgs> args;
  for (int trial = 0; trial < kTrials; ++trial) {
    const int m = 1 + static_cast<int>(unit(rng) * 3.999);
    std::vector<double> betas;
    std::vector<double> share;
    for (int j = 0; j < m; ++j) share.push_back(-std::log(1.0 - unit(rng)));
    double total = 0.0;
    for (double s : share) total += s;
    const double radius = 2.0 * unit(rng);
    MLArgs z;
    for (int j = 0; j < m; ++j) {
      betas.push_back(0.25 + 0.7 * unit(rng));
      z.z.push_back(std::polar(radius * share[static_cast<std::size_t>(j)] / total, 2.0 * std::numbers::pi * unit(rng)));
    }
    params.emplace_back(0.1 + 1.85 * unit(rng), betas);
    args.push_back(std::move(z));
  }
  std::vector<double> res(kTrials);
  parallel_for(kTrials, opt.threads, [&](std::size_t i) { res[i] = ml_identity_residual(params[i], args[i]); });
  const double worst = detail::max_of(res);
  c.passed = worst < 1e-10;
  c.detail = detail::format("max residual %.2e over sum|z_j| <= 2 (tol 1e-10)", worst);
  return c;
}

/// (1 + x)|E_{alpha', 1 + alpha_1}| with z_1 = -x, z_j = -q_j, on 30 and 59 log points.
inline Criterion contour_bound(const Options& opt) {
  Criterion c(3, "(1+|z_1|)|E| bounded for z_1 in -[1, 1e8]", 30.0);
  const std::vector<FracOrders> sets{
      FracOrders({0.5}, {1.0}),
      FracOrders({0.7, 0.3}, {1.0, 1.5}),
      FracOrders({0.9, 0.3}, {1.0, 1.0}),
      FracOrders({0.8, 0.5}, {1.0, 3.0}),
      FracOrders({0.6, 0.4, 0.2}, {1.0, 0.5, 2.0}),
  };
  const auto scaled_max = [](const FracOrders& o, int n) -> double {
    double worst = 0.0;
    for (double x : log_grid(1.0, 1e8, n)) {
      const double v = (1.0 + x) * std::abs(e_solver(x, o, 1.0 + o.alpha_max(), 1.0));
      if (!std::isfinite(v)) return INFINITY;
      worst = std::max(worst, v);
    }
    return worst;
  };
  std::vector<double> coarse(sets.size()), fine(sets.size());
  parallel_for(sets.size(), opt.threads, [&](std::size_t i) {
    coarse[i] = scaled_max(sets[i], 30);
    fine[i] = scaled_max(sets[i], 59);
  });
  double worst_ratio = 0.0;
  double worst_max = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    worst_ratio = std::max(worst_ratio, fine[i] / coarse[i]);
    worst_max = std::max(worst_max, coarse[i]);
  }
  c.passed = std::isfinite(worst_max) && worst_ratio <= 1.01;
  c.detail = detail::format("5 sets, largest sup %.4g, refined/coarse max ratio %.6f (limit 1.01)", worst_max, worst_ratio);
  return c;
}

/// d/dt [t^{alpha_1} E_{alpha',1+alpha_1}] against t^{alpha_1-1} E_{alpha',alpha_1}
/// by central differences at h and h/2.
inline Criterion derivative_identity(const Options& opt) {
  Criterion c(4, "derivative identity, central differences second order", 30.0);
  constexpr int kSamples = 20;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Sample {
    FracOrders o;
    double lambda;
    double t;
  };
  std::vector<Sample> samples;
  for (int s = 0; s < kSamples; ++s) {
    auto o = detail::random_orders(rng, 1 + s % 3);
    const double lambda = std::exp(std::log(0.1) + std::log(1e3) * unit(rng));
    const double t = 0.2 + 4.8 * unit(rng);
    samples.push_back({std::move(o), lambda, t});
  }
  std::vector<double> order(kSamples);
  parallel_for(kSamples, opt.threads, [&](std::size_t i) {
    const auto& [o, lambda, t] = samples[i];
    const double a1 = o.alpha_max();
    const auto f = [&](double s) { return std::pow(s, a1) * e_solver(lambda, o, 1.0 + a1, s); };
    const double rhs = std::pow(t, a1 - 1.0) * e_solver(lambda, o, a1, t);
    const auto err = [&](double h) { return std::abs((f(t + h) - f(t - h)) / (2.0 * h) - rhs); };
    const double h = 0.02 * t;
    order[i] = std::log2(err(h) / err(0.5 * h));
  });
  const auto [lo, hi] = std::minmax_element(order.begin(), order.end());
  c.passed = *lo >= 1.8 && *hi <= 2.2;
  c.detail = detail::format("observed orders in [%.3f, %.3f] over %d samples (want 2 +- 0.2)", *lo, *hi, kSamples);
  return c;
}

inline Criterion positivity(const Options& opt) {
  Criterion c(5, "t^{alpha_1-1} E_{alpha',alpha_1} > 0 at 100 tuples", 10.0);
  constexpr int kSamples = 100;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Sample {
    FracOrders o;
    double lambda;
    double t;
  };
  std::vector<Sample> samples;
  for (int s = 0; s < kSamples; ++s) {
    const double a1 = 0.2 + 0.75 * unit(rng);
    const double a2 = a1 * (0.1 + 0.8 * unit(rng));
    FracOrders o({a1, a2}, {1.0, 0.1 + 5.0 * unit(rng)});
    const double lambda = std::exp(std::log(1e4) * unit(rng));
    const double t = std::exp(std::log(1e-3) + std::log(1e6) * unit(rng));
    samples.push_back({std::move(o), lambda, t});
  }
  std::vector<double> v(kSamples);
  parallel_for(kSamples, opt.threads, [&](std::size_t i) {
    const auto& [o, lambda, t] = samples[i];
    v[i] = std::pow(t, o.alpha_max() - 1.0) * e_solver(lambda, o, o.alpha_max(), t);
  });
  const double smallest = *std::min_element(v.begin(), v.end());
  const auto negatives = std::count_if(v.begin(), v.end(), [](double x) { return !(x > 0.0); });
  c.passed = negatives == 0;
  c.detail = detail::format("%ld non-positive, smallest value %.3e", static_cast<long>(negatives), smallest);
  return c;
}

/// Series amplitude, L1 time stepping and Hankel quadrature, pairwise.
inline Criterion triple_agreement(const Options& opt) {
  Criterion c(6, "series, L1 and Hankel mode amplitudes agree", 300.0);
  constexpr int kSamples = 20;
  const std::vector<double> times{0.5, 2.0, 20.0};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(0.5, 30.0);
  std::vector<FracOrders> orders;
  std::vector<double> lambdas;
  for (int s = 0; s < kSamples; ++s) {
    orders.push_back(detail::random_orders(rng, 1 + s % 3));
    lambdas.push_back(lam(rng));
  }
  std::vector<double> sl(kSamples * times.size()), sh(sl.size()), lh(sl.size());
  parallel_for(sl.size(), opt.threads, [&](std::size_t k) {
    const std::size_t i = k / times.size();
    const double t = times[k % times.size()];
    const auto& o = orders[i];
    const double series = mode_amplitude(o, lambdas[i], t);
    const double l1 = oracle::l1_final(o, lambdas[i], 1.0, t, 4000, oracle::L1Config::optimal_grading(o.alpha_max()));
    const double hankel = oracle::laplace_mode_eval(lambdas[i], o, 1.0, t, oracle::HankelConfig::for_time(t)).value;
    const double scale = std::abs(series);
    sl[k] = std::abs(series - l1) / scale;
    sh[k] = std::abs(series - hankel) / scale;
    lh[k] = std::abs(l1 - hankel) / scale;
  });
  const double a = detail::max_of(sl), b = detail::max_of(sh), d = detail::max_of(lh);
  c.passed = std::max({a, b, d}) < 1e-3;
  c.detail = detail::format("max rel diff series-L1 %.2e, series-Hankel %.2e, L1-Hankel %.2e (tol 1e-3)", a, b, d);
  return c;
}

inline Criterion l1_order(const Options& opt) {
  Criterion c(7, "L1 scheme converges with order 2 - alpha", 120.0);
  const std::vector<double> alphas{0.3, 0.5, 0.8};
  std::vector<double> p(alphas.size());
  parallel_for(alphas.size(), opt.threads, [&](std::size_t i) {
    const FracOrders o({alphas[i]}, {1.0});
    p[i] = oracle::l1_richardson_order(o, 1.0, 1.0, 1.0, 200, oracle::L1Config::optimal_grading(alphas[i]));
  });
  c.passed = true;
  c.detail = "observed";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(std::abs(p[i] - (2.0 - alphas[i])) <= 0.2)) c.passed = false;
    c.detail += detail::format(" alpha=%.1f: %.3f (want %.1f)%s", alphas[i], p[i], 2.0 - alphas[i], i + 1 < alphas.size() ? "," : "");
  }
  return c;
}

inline Problem decay_problem(const Options& opt) {
  const auto op = Operator1D::laplacian(opt.n_interior);
  return Problem(FracOrders({0.9, 0.3}, {1.0, 1.0}), op, detail::parabola(op));
}

inline Criterion decay_exponent(const Options& opt) {
  Criterion c(8, "long-time decay t^{-alpha_m} with bounded residual", 120.0);
  const Problem p = decay_problem(opt);
  const auto t = log_grid(1e2, 1e4, 9);
  const auto rows = asymptotic_table(p, t);
  std::vector<double> norms;
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : rows) {
    norms.push_back(r.dl_norm);
    lo = std::min(lo, r.scaled_residual);
    hi = std::max(hi, r.scaled_residual);
  }
  const double exponent = decay_fit(t, norms).exponent;
  c.passed = std::abs(exponent + 0.3) <= 0.05 && lo > 0.0 && hi / lo < 10.0;
  c.detail = detail::format("fitted exponent %.4f (want -0.3 +- 0.05), scaled residual in [%.3g, %.3g], max/min %.2f", exponent,
                            lo, hi, hi / lo);
  return c;
}

inline Criterion decay_band_check(const Options& opt) {
  Criterion c(9, "t^{alpha_m} ||u||_{D(-L)} in a fixed positive band", 60.0);
  const Problem p = decay_problem(opt);
  const auto band = decay_band(p, log_grid(1e2, 1e4, 9));
  const auto fine = decay_band(p, log_grid(1e2, 1e4, 33));
  c.passed = band.lower > 0.0 && fine.lower >= 0.99 * band.lower && fine.upper <= 1.01 * band.upper;
  c.detail = detail::format("band [%.4f, %.4f] on 9 points, [%.4f, %.4f] on 33 points", band.lower, band.upper, fine.lower,
                            fine.upper);
  return c;
}

inline Criterion short_time(const Options& opt) {
  Criterion c(10, "short-time limits vanish monotonically to t = 1e-8", 120.0);
  const auto op = Operator1D::laplacian(opt.n_interior);
  const auto spec = eigendecompose(op);
  const auto grid = log_grid(1e-1, 1e-8, 8);
  const Problem hom(FracOrders({0.7, 0.3}, {1.0, 1.0}), op, detail::parabola(op));
  const auto a = short_time_checks(hom, 0.5, grid);
  const Problem forced(FracOrders({0.7, 0.3}, {1.0, 1.0}), op, GridFunction::Zero(opt.n_interior),
                       SourceSamples::constant(detail::parabola(op), spec));
  const auto b = short_time_checks(forced, 0.0, grid, 0.5);
  c.passed = a.vanishing && b.vanishing;
  c.detail = detail::format("no source: %.2e -> %.2e (%s); source: %.2e -> %.2e (%s)", a.norm.front(), a.norm.back(),
                            a.vanishing ? "vanishing" : "not vanishing", b.norm.front(), b.norm.back(),
                            b.vanishing ? "vanishing" : "not vanishing");
  return c;
}

/// Perturbation channels: alpha only, q only, D only, all three.
inline Criterion lipschitz(const Options& opt) {
  Criterion c(11, "Lipschitz ratio stable under 7 halvings", 600.0);
  constexpr int kLevels = 7;
  const int n = opt.n_interior;
  const auto base_op = Operator1D::laplacian(n);
  const GridFunction a = detail::parabola(base_op);
  const auto make = [&](double da, double dq, double dd) {
    auto op = Operator1D::from_profiles(Interval{}, n, Profile::sinusoidal(1.0, 0.2 + dd, 2.0), Profile::constant(0.0));
    return Problem(FracOrders({0.7 + da, 0.3 + da}, {1.0, 1.5 + dq}), op, a);
  };
  const Problem base = make(0.0, 0.0, 0.0);
  const char* names[] = {"alpha", "q", "D", "combined"};
  std::vector<double> ratio(4 * kLevels);
  parallel_for(ratio.size(), opt.threads, [&](std::size_t k) {
    const int channel = static_cast<int>(k) / kLevels;
    const double e = std::pow(2.0, -static_cast<int>(k % kLevels));
    const double da = channel == 0 || channel == 3 ? 0.05 * e : 0.0;
    const double dq = channel == 1 || channel == 3 ? 0.3 * e : 0.0;
    const double dd = channel == 2 || channel == 3 ? 0.1 * e : 0.0;
    ratio[k] = lipschitz_experiment(base, make(da, dq, dd), 1.0, 1.0).ratio;
  });
  c.passed = true;
  c.detail = "max/min";
  for (int ch = 0; ch < 4; ++ch) {
    const auto first = ratio.begin() + ch * kLevels;
    const auto [lo, hi] = std::minmax_element(first, first + kLevels);
    const double spread = *hi / *lo;
    if (!(*lo > 0.0 && spread < 5.0)) c.passed = false;
    c.detail += detail::format(" %s %.3f%s", names[ch], spread, ch < 3 ? "," : " (limit 5)");
  }
  return c;
}

inline Criterion counterexample(const Options&) {
  Criterion c(12, "negative weight: roots and growth versus decaying control", 60.0);
  const double lambda = 10.0;
  const oracle::L1Config cfg{5.0, 2000, 4.0};
  const auto neg = oracle::counterexample_run(lambda, cfg, -1.0);
  const auto pos = oracle::counterexample_run(lambda, cfg, +1.0);
  const double disc = std::sqrt(9.0 * lambda * lambda - 4.0 * lambda);
  const double rp = (3.0 * lambda + disc) / 2.0;
  const double rm = (3.0 * lambda - disc) / 2.0;
  const double root_err = std::max(std::abs(neg.r_plus_solved - rp) / rp, std::abs(neg.r_minus_solved - rm) / rm);
  const double u0 = std::abs(pos.series.u.front());
  const bool decays = !pos.grows && std::abs(pos.series.u.back()) < u0;
  c.passed = root_err < 1e-12 && neg.grows && decays;
  c.detail = detail::format("root rel err %.1e; negative weight peak %.3g x |u(0)|; control |u(T)| = %.3g", root_err,
                            neg.max_abs / std::abs(neg.series.u.front()), std::abs(pos.series.u.back()));
  return c;
}

/// sum_j q_j d_t^{alpha_j} u + (-L)u with the Caputo terms by product quadrature
/// and -L applied as the assembled matrix.
inline Criterion equation_residual(const Options& opt) {
  Criterion c(13, "solutions satisfy the equation under Caputo quadrature", 120.0);
  const auto op = Operator1D::laplacian(31);
  const auto a = op.sample([](double x) { return std::sin(x) + 0.5 * std::sin(2.0 * x) + 0.25 * std::sin(3.0 * x); });
  const std::vector<FracOrders> sets{FracOrders({0.5}, {1.0}), FracOrders({0.7, 0.3}, {1.0, 1.5}),
                                     FracOrders({0.9, 0.5, 0.2}, {1.0, 0.6, 1.4})};
  const std::vector<double> times{0.5, 1.0, 2.0};
  const auto matrix = assemble(op);
  std::vector<double> res(sets.size() * times.size());
  parallel_for(res.size(), opt.threads, [&](std::size_t k) {
    const Problem p(sets[k / times.size()], op, a);
    const double t = times[k % times.size()];
    const GridFunction u = solve_homogeneous(p, t);
    GridFunction sum = matrix.apply(u);
    double scale = sum.norm();
    for (std::size_t j = 0; j < p.orders.size(); ++j) {
      const GridFunction term = p.orders.q(j) * caputo_derivative(p, p.orders.alpha(j), t);
      sum += term;
      scale = std::max(scale, term.norm());
    }
    res[k] = sum.norm() / scale;
  });
  const double worst = detail::max_of(res);
  c.passed = worst < tol::kOdeResidual;
  c.detail = detail::format("max relative residual %.2e at t in {0.5, 1, 2} (tol 1e-3)", worst);
  return c;
}

// ---------------------------------------------------------------------------

using Check = std::function<Criterion(const Options&)>;

inline const std::vector<Check>& checks() {
  static const std::vector<Check> all{recurrence,       identity,         contour_bound,     derivative_identity,
                                      positivity,       triple_agreement, l1_order,          decay_exponent,
                                      decay_band_check, short_time,       lipschitz,         counterexample,
                                      equation_residual};
  return all;
}

/// Runs one check, timing it; errors count as failures with the message as detail.
inline Criterion run(const Check& check, int id, const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  Criterion c;
  try {
    c = check(opt);
  } catch (const std::exception& e) {
    c.id = id;
    c.name = "criterion " + std::to_string(id);
    c.passed = false;
    c.detail = std::string("error: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.budget > 0.0 && c.seconds > c.budget) {
    c.passed = false;
    c.detail += detail::format(" [over time budget %.0f s]", c.budget);
  }
  return c;
}

inline std::string line(const Criterion& c) {
  return detail::format("%s  %2d  %-58s %7.2fs  ", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str(), c.seconds) + c.detail;
}

/// Runs every check in order, calling `report` after each.
inline std::vector<Criterion> run_all(const Options& opt, const std::function<void(const Criterion&)>& report = {}) {
  std::vector<Criterion> out;
  for (std::size_t i = 0; i < checks().size(); ++i) {
    out.push_back(run(checks()[i], static_cast<int>(i) + 1, opt));
    if (report) report(out.back());
  }
  return out;
}

}  // namespace mtfrac::acceptance
