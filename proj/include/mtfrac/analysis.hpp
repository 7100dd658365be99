#pragma once

// Experiments on the solution: decay fits, long-time leading term, short-time
// limits and Lipschitz dependence on the coefficients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtfrac/error.hpp"
#include "mtfrac/gamma.hpp"
#include "mtfrac/orders.hpp"
#include "mtfrac/quadrature.hpp"
#include "mtfrac/solver.hpp"
#include "mtfrac/spectral.hpp"

namespace mtfrac {

/// Grid C^1 norm of the diffusion samples: sup|D| + sup of one-sided difference quotients.
inline double c1_norm(const Operator1D& op) {
  const auto& d = op.diffusion_nodes();
  double sup = 0.0;
  double dsup = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    sup = std::max(sup, std::abs(d[i]));
    if (i + 1 < d.size()) dsup = std::max(dsup, std::abs(d[i + 1] - d[i]) / op.h());
  }
  return sup + dsup;
}

/// Coefficient bounds for the stability theorem.
struct AdmissibleSets {
  double alpha_lower = 0.05;
  double alpha_upper = 0.95;
  double q_lower = 0.1;
  double q_upper = 10.0;
  double delta = 0.1;  // min D
  double M = 100.0;    // cap on the C^1 norm of D

  void validate() const {
    if (!(alpha_lower > 0.0 && alpha_upper < 1.0 && alpha_lower < alpha_upper)) {
      throw DomainError("admissible alpha bounds must satisfy 0 < lower < upper < 1");
    }
    if (!(q_lower > 0.0 && q_lower <= q_upper)) throw DomainError("admissible q bounds must satisfy 0 < lower <= upper");
    if (!(delta > 0.0) || !(M > 0.0)) throw DomainError("admissible delta and M must be positive");
  }

  bool contains(const FracOrders& o) const {
    if (o.alpha_max() > alpha_upper || o.alpha_min() < alpha_lower) return false;
    for (std::size_t j = 1; j < o.size(); ++j) {
      if (o.q(j) < q_lower || o.q(j) > q_upper) return false;
    }
    return true;
  }

  bool contains(const Operator1D& op) const {
    const auto& d = op.diffusion_nodes();
    return *std::min_element(d.begin(), d.end()) >= delta && c1_norm(op) <= M;
  }
};

// ---------------------------------------------------------------------------
// Decay

struct DecayFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (log t, log norm).
inline DecayFit decay_fit(std::span<const double> times, std::span<const double> norms) {
  if (times.size() != norms.size()) throw DomainError("decay_fit needs matching times and norms");
  if (times.size() < 5) throw DomainError("decay_fit needs at least 5 samples");
  const std::size_t n = times.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(times[i] > 0.0) || !(norms[i] > 0.0)) throw DomainError("decay_fit needs positive times and norms");
    if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("decay_fit needs increasing times");
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = std::log(times[i]);
    a(r, 1) = 1.0;
    y(r) = std::log(norms[i]);
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
  DecayFit fit;
  fit.exponent = c(0);
  fit.intercept = c(1);
  const double ss_res = (a * c - y).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

/// ||u(t)||_{D(-L)} for the source-free problem.
inline double graph_norm(const ModalSolution& sol, double t) {
  return frac_norm_modal(sol.homogeneous_coefficients(t), 1.0, *sol.problem().spectrum);
}

/// (-L)^{-1}(q_m a) / (Gamma(1 - alpha_m) t^{alpha_m}).
inline GridFunction asymptotic_leading_term(const Problem& p, double t) {
  if (!p.homogeneous()) throw DomainError("asymptotic_leading_term needs a problem without source");
  if (!(t > 0.0)) throw DomainError("asymptotic_leading_term needs t > 0");
  const double am = p.orders.alpha_min();
  return apply_inverse(p.orders.q_last() * p.initial, *p.spectrum) * (rgamma(1.0 - am) * std::pow(t, -am));
}

/// Exponent of the residual bound: alpha_{m-1}, or 2 alpha for a single term.
inline double residual_exponent(const FracOrders& o) {
  return o.size() >= 2 ? o.alpha(o.size() - 2) : 2.0 * o.alpha_max();
}

/// True when residual_exponent uses the single-term substitute.
inline bool residual_exponent_substituted(const FracOrders& o) { return o.size() < 2; }

/// Long-time regime starts here.
inline constexpr double kAsymptoticMinTime = 10.0;

/// t^{residual_exponent} ||u(t) - leading(t)||_{D(-L)} / ||a||_{L^2}.
inline double asymptotic_residual(const ModalSolution& sol, double t) {
  const Problem& p = sol.problem();
  if (!p.homogeneous()) throw DomainError("asymptotic_residual needs a problem without source");
  if (!(t >= kAsymptoticMinTime)) throw DomainError("asymptotic_residual needs t >= 10");
  const Eigen::VectorXd a = p.initial_modal();
  const double a_norm = a.norm();
  if (a_norm == 0.0) return 0.0;
  const double am = p.orders.alpha_min();
  const double lead = p.orders.q_last() * rgamma(1.0 - am) * std::pow(t, -am);
  const Eigen::VectorXd u = sol.homogeneous_coefficients(t);
  Eigen::VectorXd diff(a.size());
  for (Eigen::Index n = 0; n < a.size(); ++n) diff(n) = u(n) - lead * a(n) / p.spectrum->lambdas(n);
  return std::pow(t, residual_exponent(p.orders)) * frac_norm_modal(diff, 1.0, *p.spectrum) / a_norm;
}

inline double asymptotic_residual(const Problem& p, double t) { return asymptotic_residual(ModalSolution(p), t); }

struct AsymptoticRow {
  double t;
  double l2_norm;
  double dl_norm;
  double leading_norm;
  double scaled_residual;
};

/// One row per t; columns of the asymptotics report.
inline std::vector<AsymptoticRow> asymptotic_table(const Problem& p, std::span<const double> times) {
  const ModalSolution sol(p);
  const double am = p.orders.alpha_min();
  const Eigen::VectorXd a = p.initial_modal();
  std::vector<AsymptoticRow> rows;
  for (double t : times) {
    const Eigen::VectorXd u = sol.homogeneous_coefficients(t);
    // leading term in D(-L): ||q_m a|| / (Gamma(1 - alpha_m) t^alpha_m)
    const double lead = p.orders.q_last() * a.norm() * rgamma(1.0 - am) * std::pow(t, -am);
    rows.push_back({t, u.norm(), frac_norm_modal(u, 1.0, *p.spectrum), lead,
                    t >= kAsymptoticMinTime ? asymptotic_residual(sol, t) : NAN});
  }
  return rows;
}

/// min and max of ||u(t)||_{D(-L)} t^{alpha_m} over the grid.
struct DecayBand {
  double lower = INFINITY;
  double upper = 0.0;
};

inline DecayBand decay_band(const Problem& p, std::span<const double> times) {
  const ModalSolution sol(p);
  DecayBand b;
  for (double t : times) {
    const double v = graph_norm(sol, t) * std::pow(t, p.orders.alpha_min());
    b.lower = std::min(b.lower, v);
    b.upper = std::max(b.upper, v);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Short time

struct ShortTimeReport {
  bool forced = false;
  double norm_order = 0.0;  // gamma, or gamma + 1 - tau with a source
  std::vector<double> t;
  std::vector<double> norm;
  bool monotone = false;
  bool vanishing = false;
};

/// Last norm must fall below this fraction of the first.
inline constexpr double kShortTimeDrop = 1e-3;

/// Tabulates ||u(t) - a||_{D((-L)^gamma)} (no source) or ||u(t)||_{D((-L)^{gamma+1-tau})}
/// (time-independent source, a = 0) on a decreasing t grid.
inline ShortTimeReport short_time_checks(const Problem& p, double gamma, std::span<const double> t_grid,
                                         double tau = 1.0) {
  if (t_grid.size() < 2) throw DomainError("short_time_checks needs at least two times");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] < t_grid[i - 1]) || !(t_grid[i] > 0.0)) {
      throw DomainError("short_time_checks needs positive, decreasing times");
    }
  }
  ShortTimeReport r;
  r.forced = !p.homogeneous();
  r.norm_order = r.forced ? gamma + 1.0 - tau : gamma;
  const Eigen::VectorXd a = p.initial_modal();
  const ModalSolution sol(p);
  for (double t : t_grid) {
    Eigen::VectorXd c;
    if (r.forced) {
      if (a.norm() != 0.0) throw DomainError("short_time_checks with a source needs a = 0");
      c = constant_source_coefficients(p, t);
    } else {
      c = sol.homogeneous_coefficients(t) - a;
    }
    r.t.push_back(t);
    r.norm.push_back(frac_norm_modal(c, r.norm_order, *p.spectrum));
  }
  r.monotone = true;
  for (std::size_t i = 1; i < r.norm.size(); ++i) {
    if (r.norm[i] > r.norm[i - 1] * (1.0 + 1e-12)) r.monotone = false;
  }
  r.vanishing = r.monotone && r.norm.back() <= kShortTimeDrop * r.norm.front();
  return r;
}

// ---------------------------------------------------------------------------
// Lipschitz stability

struct LipschitzConfig {
  double horizon = 2.0;
  int time_steps = 40;
  double grading = 2.0;
};

struct LipschitzReport {
  double delta = 0.0;  // sum |alpha - alpha~| + sum_{j>=2} |q - q~| + ||D - D~||_{C^1}
  double solution_diff = 0.0;
  double ratio = 0.0;
  bool exact_match = false;
  std::string norm_name;
};

/// Coefficient distance between two problems with the same number of terms.
inline double coefficient_distance(const Problem& a, const Problem& b) {
  if (a.orders.size() != b.orders.size()) throw DomainError("problems need the same number of terms");
  double d = 0.0;
  for (std::size_t j = 0; j < a.orders.size(); ++j) d += std::abs(a.orders.alpha(j) - b.orders.alpha(j));
  for (std::size_t j = 1; j < a.orders.size(); ++j) d += std::abs(a.orders.q(j) - b.orders.q(j));
  return d + Operator1D::c1_distance(*a.op, *b.op);
}

/// ||u - u~|| in L^{1/(1-gamma)}(0,T; D((-L)^{1-tau})) for gamma < 1/2, else
/// L^2(0,T; D(-L)), by the trapezoid rule on a graded mesh. Fractional norms
/// use the eigensystem of the base operator.
inline LipschitzReport lipschitz_experiment(const Problem& base, const Problem& perturbed, double gamma, double tau,
                                            const LipschitzConfig& cfg = {}) {
  if (!base.homogeneous() || !perturbed.homogeneous()) throw DomainError("lipschitz_experiment needs source-free problems");
  if (!(gamma > 0.0 && gamma <= 1.0) || !(tau > 0.0 && tau <= 1.0)) {
    throw DomainError("lipschitz_experiment needs gamma and tau in (0, 1]");
  }
  if (base.initial.size() != perturbed.initial.size() || (base.initial - perturbed.initial).norm() != 0.0) {
    throw DomainError("lipschitz_experiment needs a shared initial value");
  }
  LipschitzReport r;
  r.delta = coefficient_distance(base, perturbed);
  const bool low = gamma < 0.5;
  const double power = low ? 1.0 / (1.0 - gamma) : 2.0;
  const double order = low ? 1.0 - tau : 1.0;
  r.norm_name = low ? "L^{1/(1-gamma)}(0,T;D((-L)^{1-tau}))" : "L^2(0,T;D(-L))";

  const auto mesh = graded_mesh(cfg.horizon, cfg.time_steps, cfg.grading);
  const std::vector<double> times(mesh.begin() + 1, mesh.end());
  const ModalSolution u(base);
  const ModalSolution v(perturbed);
  std::vector<double> vals(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const GridFunction d = u.homogeneous(times[i]) - v.homogeneous(times[i]);
    vals[i] = std::pow(frac_norm_modal(project(d, *base.spectrum), order, *base.spectrum), power);
  }
  r.solution_diff = std::pow(trapezoid(times, vals), 1.0 / power);
  r.exact_match = r.delta == 0.0;
  r.ratio = r.exact_match ? NAN : r.solution_diff / r.delta;
  return r;
}

}  // namespace mtfrac
