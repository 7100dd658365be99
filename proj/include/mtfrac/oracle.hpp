#pragma once

// Independent reference computations used to cross-check the main library:
// extended-precision series, an L1 time stepper, Hankel-path inversion and
// the negative-coefficient counterexample.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "mtfrac/error.hpp"
#include "mtfrac/gamma.hpp"
#include "mtfrac/orders.hpp"
#include "mtfrac/quadrature.hpp"
#include "mtfrac/specfun.hpp"

namespace mtfrac::oracle {

// ---------------------------------------------------------------------------
// Extended-precision series

using mpreal = boost::multiprecision::mpfr_float;

struct HighPrecResult {
  mpreal re;
  mpreal im;
  mpreal tail_bound;  // rigorous bound on the omitted shells
  int digits = 0;
  int shells = 0;

  cplx to_cplx() const { return {re.convert_to<double>(), im.convert_to<double>()}; }
};

namespace detail {

/// Sets the working precision for the lifetime of the guard.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits10) : saved_(mpreal::default_precision()) {
    mpreal::default_precision(digits10);
  }
  ~PrecisionGuard() { mpreal::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

}  // namespace detail

/// Shell-by-shell summation of the multinomial series in MPFR arithmetic
/// with `digits` decimal digits (plus guard digits). Stops once the majorant
/// tail is below 10^-digits relative to the partial sum.
inline HighPrecResult highprec_series(const MLParams& params, const MLArgs& args, int digits) {
  if (digits < 10 || digits > 1000) throw DomainError("highprec_series digits must lie in [10, 1000]");
  const std::size_t m = params.m();
  if (args.z.size() != m) throw DomainError("MLArgs length must match MLParams.m");
  const detail::PrecisionGuard guard(static_cast<unsigned>(digits + 10));

  const mpreal b0 = params.beta0;
  std::vector<mpreal> beta(m), zr(m), zi(m), rad(m);
  for (std::size_t j = 0; j < m; ++j) {
    beta[j] = params.betas[j];
    zr[j] = args.z[j].real();
    zi[j] = args.z[j].imag();
    rad[j] = sqrt(zr[j] * zr[j] + zi[j] * zi[j]);
  }
  const mpreal bmin = *std::min_element(beta.begin(), beta.end());
  const mpreal eps = pow(mpreal(10), -digits);

  // zpow[j][k] = z_j^k as (re, im)
  std::vector<std::vector<std::pair<mpreal, mpreal>>> zpow(m, {{mpreal(1), mpreal(0)}});
  std::vector<mpreal> lnfact{mpreal(0)};

  HighPrecResult out;
  out.digits = digits;
  mpreal sr = 0, si = 0;
  const int max_shells = 10 * digits;
  for (int k = 0; k <= max_shells; ++k) {
    if (k > 0) {
      lnfact.push_back(lnfact.back() + log(mpreal(k)));
      for (std::size_t j = 0; j < m; ++j) {
        const auto& p = zpow[j].back();
        zpow[j].emplace_back(p.first * zr[j] - p.second * zi[j], p.first * zi[j] + p.second * zr[j]);
      }
    }
    mpreal shell_abs = 0;
    std::vector<int> parts(m, 0);
    parts[0] = k;
    do {
      mpreal lnc = lnfact[static_cast<std::size_t>(k)];
      mpreal x = b0;
      mpreal pr = 1, pi = 0;
      mpreal mag = 1;
      for (std::size_t j = 0; j < m; ++j) {
        const auto kj = static_cast<std::size_t>(parts[j]);
        lnc -= lnfact[kj];
        x += beta[j] * parts[j];
        const auto& zp = zpow[j][kj];
        const mpreal nr = pr * zp.first - pi * zp.second;
        pi = pr * zp.second + pi * zp.first;
        pr = nr;
        mag *= pow(rad[j], parts[j]);
      }
      const mpreal coef = exp(lnc) / tgamma(x);
      sr += coef * pr;
      si += coef * pi;
      shell_abs += abs(coef) * mag;
    } while (next_composition(parts));

    // A_{k+1} <= rho_k A_k with rho_k decreasing in k
    const mpreal xk = b0 + bmin * k;
    mpreal rho = 0;
    for (std::size_t j = 0; j < m; ++j) rho += rad[j] * exp(lgamma(xk) - lgamma(xk + beta[j]));
    if (rho < 1) {
      const mpreal tail = shell_abs * rho / (1 - rho);
      const mpreal mod = sqrt(sr * sr + si * si);
      const mpreal scale = mod > 1e-300 ? mod : mpreal(1e-300);
      if (tail <= eps * scale) {
        out.re = sr;
        out.im = si;
        out.tail_bound = tail;
        out.shells = k + 1;
        return out;
      }
    }
  }
  throw ConvergenceError("highprec_series: tail bound not reached within " + std::to_string(max_shells) + " shells");
}

// ---------------------------------------------------------------------------
// L1 time stepping

struct L1Config {
  double t_final = 1.0;
  int n_steps = 1000;
  double grading = 1.0;
  /// Stop early once |u| exceeds this multiple of max(|u(0)|, 1); 0 disables.
  double stop_growth = 0.0;

  void validate() const {
    if (!(t_final > 0.0)) throw DomainError("L1 t_final must be positive");
    if (n_steps < 2) throw DomainError("L1 n_steps must be >= 2");
    if (!(grading >= 1.0)) throw DomainError("L1 grading must be >= 1");
  }

  /// Grading (2 - alpha) / alpha, which restores order 2 - alpha for t^alpha-type
  /// solutions, capped at 3 so the first steps stay well above round-off.
  static double optimal_grading(double alpha) { return std::clamp((2.0 - alpha) / alpha, 1.0, 3.0); }
};

/// Orders and weights for the stepper; unlike FracOrders the weights may be negative.
struct L1Terms {
  std::vector<double> alphas;
  std::vector<double> qs;

  static L1Terms from(const FracOrders& o) { return {o.alphas(), o.qs()}; }

  void validate() const {
    if (alphas.empty() || alphas.size() != qs.size()) throw DomainError("L1 terms need matching nonempty alphas and qs");
    for (double a : alphas) {
      if (!(a > 0.0 && a < 1.0)) throw DomainError("L1 orders must lie in (0,1)");
    }
  }
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> u;
};

namespace detail {

/// x^p - y^p for x > y >= 0 without cancellation.
inline double pow_diff(double x, double y, double p) {
  if (y <= 0.0) return std::pow(x, p);
  return std::pow(y, p) * std::expm1(p * std::log1p((x - y) / y));
}

}  // namespace detail

/// L1 discretization of sum_j q_j d_t^{alpha_j} u + lambda u = f, u(0) = a, on the
/// mesh t_k = T (k/N)^grading. Each step solves one scalar linear equation.
inline TimeSeries l1_solve(const L1Terms& terms, double lambda, double a,
                           const std::function<double(double)>& f, const L1Config& cfg) {
  terms.validate();
  cfg.validate();
  if (!std::isfinite(lambda)) throw DomainError("L1 lambda must be finite");
  const auto t = graded_mesh(cfg.t_final, cfg.n_steps, cfg.grading);
  const std::size_t n = t.size();
  const std::size_t m = terms.alphas.size();
  std::vector<double> coef(m);
  for (std::size_t j = 0; j < m; ++j) coef[j] = terms.qs[j] * rgamma(2.0 - terms.alphas[j]);

  TimeSeries out;
  out.t.reserve(n);
  out.u.reserve(n);
  out.t.push_back(0.0);
  out.u.push_back(a);
  std::vector<double> slope;  // (u_i - u_{i-1}) / tau_i
  slope.reserve(n);
  const double limit = cfg.stop_growth * std::max(std::abs(a), 1.0);

  for (std::size_t k = 1; k < n; ++k) {
    const double tk = t[k];
    const double tau = tk - t[k - 1];
    double history = 0.0;
    double diag = lambda;
    for (std::size_t j = 0; j < m; ++j) {
      const double p = 1.0 - terms.alphas[j];
      double h = 0.0;
      for (std::size_t i = 1; i < k; ++i) h += slope[i - 1] * detail::pow_diff(tk - t[i - 1], tk - t[i], p);
      history += coef[j] * h;
      diag += coef[j] * std::pow(tau, p) / tau;
    }
    const double rhs = (f ? f(tk) : 0.0) - history + (diag - lambda) * out.u.back();
    if (diag == 0.0) throw ConvergenceError("L1 step is singular at t = " + std::to_string(tk));
    const double uk = rhs / diag;
    if (!std::isfinite(uk)) throw ConvergenceError("L1 solution became non-finite at t = " + std::to_string(tk));
    slope.push_back((uk - out.u.back()) / tau);
    out.t.push_back(tk);
    out.u.push_back(uk);
    if (limit > 0.0 && std::abs(uk) > limit) break;
  }
  return out;
}

/// Per-mode problem with positive weights.
inline TimeSeries l1_solve_mode(double lambda, const FracOrders& orders, double a_n,
                                const std::function<double(double)>& f_n, const L1Config& cfg) {
  if (!(lambda >= 0.0)) throw DomainError("l1_solve_mode needs lambda >= 0");
  return l1_solve(L1Terms::from(orders), lambda, a_n, f_n, cfg);
}

/// Final value of an L1 run with N steps.
inline double l1_final(const FracOrders& orders, double lambda, double a, double t_final, int n, double grading) {
  return l1_solve_mode(lambda, orders, a, {}, {t_final, n, grading}).u.back();
}

/// Observed order log2(|u_N - u_2N| / |u_2N - u_4N|) at t_final.
inline double l1_richardson_order(const FracOrders& orders, double lambda, double a, double t_final, int n,
                                  double grading) {
  const double u1 = l1_final(orders, lambda, a, t_final, n, grading);
  const double u2 = l1_final(orders, lambda, a, t_final, 2 * n, grading);
  const double u4 = l1_final(orders, lambda, a, t_final, 4 * n, grading);
  return std::log2(std::abs(u1 - u2) / std::abs(u2 - u4));
}

// ---------------------------------------------------------------------------
// Hankel-path inversion

struct HankelConfig {
  double r_max = 80.0;
  int n_panels = 24;
  double eps0 = 0.1;
  double refine_tol = 1e-9;  // relative n vs 2n agreement

  /// Smallest r_max * t with exp(-r_max t) < 1e-16.
  static constexpr double kMinDecay = 36.85;

  void validate(double t) const {
    if (!(r_max > 0.0) || n_panels < 1 || !(eps0 > 0.0)) {
      throw DomainError("HankelConfig needs positive r_max, n_panels and eps0");
    }
    if (r_max * t < kMinDecay) {
      throw DomainError("HankelConfig r_max too small: exp(-r_max t) must be below 1e-16");
    }
  }

  static HankelConfig for_time(double t) {
    HankelConfig c;
    c.r_max = std::max(c.r_max, 1.05 * kMinDecay / t);
    return c;
  }
};

struct HankelResult {
  double value = 0.0;      // u_n(t)
  double leading = 0.0;    // q_m a_n / (lambda Gamma(1 - alpha_m) t^alpha_m)
  double integral = 0.0;   // a_n int_0^inf H e^{-rt} dr
  double error_estimate = 0.0;
  double min_abs_w = 0.0;  // over the quadrature nodes on the cut
};

/// w(s) = sum_j q_j s^alpha_j + lambda on the upper side of the cut, s = r e^{i pi}.
inline std::complex<double> hankel_w(double lambda, const FracOrders& o, double r) {
  std::complex<double> w = lambda;
  for (std::size_t j = 0; j < o.size(); ++j) w += o.q(j) * std::polar(std::pow(r, o.alpha(j)), std::numbers::pi * o.alpha(j));
  return w;
}

/// H(r, lambda) in the form with the lambda terms cancelled:
///   -(1/pi) Im{ [lambda sum_{j<m} q_j s^{a_j-1} - q_m sum_j q_j s^{a_j+a_m-1}] / (lambda w(s)) }.
inline double hankel_integrand(double lambda, const FracOrders& o, double r) {
  const std::size_t m = o.size();
  const double am = o.alpha_min();
  const double qm = o.q_last();
  const auto sp = [r](double e) { return std::polar(std::pow(r, e), std::numbers::pi * e); };
  std::complex<double> num = 0.0;
  for (std::size_t j = 0; j + 1 < m; ++j) num += lambda * o.q(j) * sp(o.alpha(j) - 1.0);
  for (std::size_t j = 0; j < m; ++j) num -= qm * o.q(j) * sp(o.alpha(j) + am - 1.0);
  return -std::imag(num / (lambda * hankel_w(lambda, o, r))) / std::numbers::pi;
}

namespace detail {

struct HankelSum {
  double value = 0.0;
  double min_abs_w = INFINITY;
};

/// int_0^{r_max} H e^{-rt} dr with n panels per piece.
inline HankelSum hankel_quadrature(double lambda, const FracOrders& o, double t, const HankelConfig& cfg, int n) {
  const auto& gl = gauss_legendre(16);
  // the v-substitution only spans r up to the e^{-rt} scale
  const double split = std::min({cfg.eps0 * lambda, 1.0 / t, cfg.r_max});
  // near 0, H ~ r^{g-1} with g = min(alpha_{m-1}, 2 alpha_m); r = split * v^{1/g}
  const double a_next = o.size() > 1 ? o.alpha(o.size() - 2) : 1.0;
  const double g = std::min(a_next, 2.0 * o.alpha_min());
  HankelSum s;
  const auto add = [&](double r, double wgt) {
    s.value += wgt * hankel_integrand(lambda, o, r) * std::exp(-r * t);
    s.min_abs_w = std::min(s.min_abs_w, std::abs(hankel_w(lambda, o, r)));
  };
  // geometric panels in v down to e^{-36}, then one panel to 0
  const double sigma = std::exp(-36.0 / n);
  const auto add_panel = [&](double lo, double hi) {
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double v = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[i];
      const double r = split * std::pow(v, 1.0 / g);
      // dr = split / g * v^{1/g - 1} dv
      add(r, 0.5 * (hi - lo) * gl.weights[i] * split / g * std::pow(v, 1.0 / g - 1.0));
    }
  };
  double hi = 1.0;
  for (int k = 0; k < n; ++k) {
    add_panel(hi * sigma, hi);
    hi *= sigma;
  }
  add_panel(0.0, hi);
  if (split < cfg.r_max) {
    // geometric panels in r beyond the split
    const double ratio = std::pow(cfg.r_max / split, 1.0 / n);
    double lo = split;
    for (int k = 0; k < n; ++k) {
      const double hi = k + 1 == n ? cfg.r_max : lo * ratio;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        add(0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[i], 0.5 * (hi - lo) * gl.weights[i]);
      }
      lo = hi;
    }
  }
  return s;
}

}  // namespace detail

/// u_n(t) from the leading term plus the Hankel-path integral.
inline HankelResult laplace_mode_eval(double lambda, const FracOrders& orders, double a_n, double t,
                                      const HankelConfig& cfg) {
  if (!(lambda > 0.0)) throw DomainError("laplace_mode_eval needs lambda > 0");
  if (!(t > 0.0)) throw DomainError("laplace_mode_eval needs t > 0");
  cfg.validate(t);
  const auto coarse = detail::hankel_quadrature(lambda, orders, t, cfg, cfg.n_panels);
  const auto fine = detail::hankel_quadrature(lambda, orders, t, cfg, 2 * cfg.n_panels);
  HankelResult res;
  res.leading = orders.q_last() * a_n / (lambda * gamma_fn(1.0 - orders.alpha_min()) * std::pow(t, orders.alpha_min()));
  res.integral = a_n * fine.value;
  res.value = res.leading + res.integral;
  res.error_estimate = std::abs(a_n) * std::abs(fine.value - coarse.value);
  res.min_abs_w = std::min(coarse.min_abs_w, fine.min_abs_w);
  const double scale = std::max(std::abs(res.value), std::abs(res.leading));
  if (res.error_estimate > cfg.refine_tol * scale && res.error_estimate > 1e-15) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", res.error_estimate);
    throw ConvergenceError(std::string("Hankel quadrature refinement disagreement ") + buf);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Negative-coefficient counterexample:
//   d_t^{1/2} u - 3 lambda d_t^{1/4} u + lambda u = 0,  u(0) = 1.

struct CounterexampleResult {
  double lambda = 0.0;
  double r_plus = 0.0;       // roots of y^2 - 3 lambda y + lambda, y = s^{1/4}, by formula
  double r_minus = 0.0;
  double r_plus_solved = 0.0;  // the same roots found by Newton on w(y^4)
  double r_minus_solved = 0.0;
  TimeSeries series;
  bool grows = false;
  double max_abs = 0.0;

  std::string verdict() const { return grows ? "grows" : "decays"; }
};

/// Growth threshold relative to |u(0)|.
inline constexpr double kGrowthFactor = 10.0;

namespace detail {

/// Root of w(y^4) = y^2 - 3 lambda y + lambda near y0 by Newton's method.
inline double newton_root(double lambda, double y0) {
  double y = y0;
  for (int it = 0; it < 100; ++it) {
    const double w = y * y - 3.0 * lambda * y + lambda;
    const double dw = 2.0 * y - 3.0 * lambda;
    const double dy = w / dw;
    y -= dy;
    if (std::abs(dy) <= 1e-16 * std::abs(y)) break;
  }
  return y;
}

}  // namespace detail

/// `sign` = -1 gives the negative-coefficient equation, +1 the all-positive control.
inline CounterexampleResult counterexample_run(double lambda, const L1Config& cfg, double sign = -1.0) {
  if (!(9.0 * lambda * lambda - 4.0 * lambda > 0.0)) throw DomainError("counterexample needs 9 lambda^2 - 4 lambda > 0");
  CounterexampleResult res;
  res.lambda = lambda;
  const double disc = std::sqrt(9.0 * lambda * lambda - 4.0 * lambda);
  res.r_plus = (3.0 * lambda + disc) / 2.0;
  res.r_minus = (3.0 * lambda - disc) / 2.0;
  // brackets: the vertex 3 lambda / 2 separates the roots
  res.r_plus_solved = detail::newton_root(lambda, 3.0 * lambda);
  res.r_minus_solved = detail::newton_root(lambda, 0.0);

  L1Config c = cfg;
  c.stop_growth = 1e3;
  res.series = l1_solve(L1Terms{{0.5, 0.25}, {1.0, sign * 3.0 * lambda}}, lambda, 1.0, {}, c);
  for (double u : res.series.u) res.max_abs = std::max(res.max_abs, std::abs(u));
  res.grows = res.max_abs > kGrowthFactor * std::abs(res.series.u.front());
  return res;
}

}  // namespace mtfrac::oracle
