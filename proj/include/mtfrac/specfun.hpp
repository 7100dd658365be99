#pragma once

// Multinomial Mittag-Leffler function
//
//   E_{(b_1..b_m), b_0}(z_1..z_m)
//     = sum_k sum_{k_1+..+k_m=k} (k; k_1..k_m) prod z_j^{k_j} / Gamma(b_0 + sum b_j k_j)
//
// evaluated by its power series for moderate arguments and, for the parameter
// family (alpha_1, alpha_1 - alpha_2, ..., alpha_1 - alpha_m) that appears in
// the solution formula, by a contour integral that stays accurate for large
// |z_1|.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtfrac/error.hpp"
#include "mtfrac/gamma.hpp"
#include "mtfrac/orders.hpp"
#include "mtfrac/quadrature.hpp"
#include "mtfrac/tolerances.hpp"

namespace mtfrac {

using cplx = std::complex<double>;
using Uint128 = unsigned __int128;

struct MLParams {
  double beta0;
  std::vector<double> betas;

  MLParams(double beta0_, std::vector<double> betas_) : beta0(beta0_), betas(std::move(betas_)) {
    if (betas.empty()) throw DomainError("MLParams needs m >= 1");
    if (!(beta0 > 0.0 && beta0 < 2.0)) throw DomainError("beta0 must lie in (0,2)");
    for (double b : betas) {
      if (!(b > 0.0 && b < 1.0)) throw DomainError("betas must lie in (0,1)");
    }
  }

  /// Parameters (alpha_1, alpha_1 - alpha_2, ...) with the given beta0.
  static MLParams solver_family(const FracOrders& orders, double beta0) {
    return MLParams(beta0, orders.ml_betas());
  }

  std::size_t m() const noexcept { return betas.size(); }
};

struct MLArgs {
  std::vector<cplx> z;

  MLArgs() = default;
  explicit MLArgs(std::vector<cplx> z_) : z(std::move(z_)) {}
  MLArgs(std::initializer_list<cplx> z_) : z(z_) {}

  std::size_t size() const noexcept { return z.size(); }
  double abs_sum() const {
    double s = 0.0;
    for (const auto& v : z) s += std::abs(v);
    return s;
  }
};

enum class EvalMethod { Series, Contour };

inline const char* to_string(EvalMethod m) {
  return m == EvalMethod::Series ? "series" : "contour";
}

struct EvalResult {
  cplx value;
  double abs_error_estimate = 0.0;
  EvalMethod method = EvalMethod::Series;
};

/// Hankel-type path gamma(R, theta): the arc |zeta| = R, |arg zeta| <= theta,
/// and the two rays arg zeta = +-theta beyond it.
struct ContourConfig {
  double radius = 1.0;
  double theta = 0.0;
  double mu = 0.0;
  int quad_points = 16;  // Gauss-Legendre order per panel
  double tail_cutoff = tol::kContourTailCutoff;

  /// mu = 3 alpha_1 pi / 4 and theta halfway between alpha_1 pi / 2 and mu.
  static ContourConfig defaults(double alpha1) {
    ContourConfig c;
    c.mu = 0.75 * alpha1 * std::numbers::pi;
    c.theta = 0.5 * (0.5 * alpha1 * std::numbers::pi + c.mu);
    return c;
  }

  void validate(double alpha1) const {
    const double lo = 0.5 * alpha1 * std::numbers::pi;
    const double hi = alpha1 * std::numbers::pi;
    if (!(lo < theta && theta < mu && mu < hi)) {
      throw DomainError("contour angles must satisfy alpha_1 pi/2 < theta < mu < alpha_1 pi");
    }
    if (!(radius > 0.0)) throw DomainError("contour radius must be positive");
    if (quad_points < 4) throw DomainError("contour quad_points must be at least 4");
    if (!(tail_cutoff > 0.0 && tail_cutoff < 1.0)) throw DomainError("tail_cutoff must lie in (0,1)");
  }
};

// ---------------------------------------------------------------------------
// Multinomial coefficients

/// k! / (k_1! ... k_m!) as an exact 128-bit integer. A part equal to -1 yields 0
/// (the convention that makes the recurrence degenerate gracefully).
inline Uint128 multinomial_coefficient(int k, std::span<const int> parts) {
  int total = 0;
  bool negative = false;
  for (int p : parts) {
    if (p < -1) throw DomainError("multinomial parts must be >= -1");
    if (p == -1) negative = true;
    total += p;
  }
  if (total != k) throw DomainError("multinomial parts must sum to k");
  if (negative) return 0;
  Uint128 result = 1;
  Uint128 n = 0;
  for (int p : parts) {
    Uint128 binom = 1;
    for (int i = 1; i <= p; ++i) {
      Uint128 prod;
      if (__builtin_mul_overflow(binom, n + static_cast<Uint128>(i), &prod)) {
        throw OverflowError("multinomial coefficient exceeds 128-bit capacity");
      }
      binom = prod / static_cast<Uint128>(i);
    }
    if (__builtin_mul_overflow(result, binom, &result)) {
      throw OverflowError("multinomial coefficient exceeds 128-bit capacity");
    }
    n += static_cast<Uint128>(p);
  }
  return result;
}

/// Advance to the next composition of sum(parts) into parts.size() parts.
/// Start from (k, 0, ..., 0); returns false after (0, ..., 0, k).
inline bool next_composition(std::vector<int>& parts) {
  const std::size_t m = parts.size();
  std::size_t i = 0;
  while (i + 1 < m && parts[i] == 0) ++i;
  if (i + 1 >= m) return false;
  const int v = parts[i];
  parts[i] = 0;
  parts[0] = v - 1;
  parts[i + 1] += 1;
  return true;
}

// ---------------------------------------------------------------------------
// Series

/// Dispatch constants; see tools/calibrate_crossover.cpp for how they were chosen.
inline constexpr int kMaxSeriesShells = 400;
inline constexpr double kSeriesPeakLimit = 1e3;
inline constexpr double kMaxSeriesTerms = 2e6;
/// Hard cap on terms summed by one series call before it gives up.
inline constexpr double kSeriesWorkLimit = 4e7;
/// Relative error of one computed series term (dominated by the Gamma routine).
inline constexpr double kSeriesTermRelError = 4e-15;

namespace detail {

/// Shell ratio bound. Every composition of k+1 arises from one of k by raising a
/// single part, and Gamma(x)/Gamma(x+b) decreases in x, so the absolute shell
/// sums satisfy A_{k+1} <= rho_k A_k with
///   rho_k = sum_j |z_j| Gamma(X_k) / Gamma(X_k + b_j),  X_k = b0 + k min_j b_j.
/// rho_k is non-increasing in k.
class ShellRatio {
 public:
  ShellRatio(double b0, std::span<const double> betas, std::span<const double> radii)
      : b0_(b0), bmin_(*std::min_element(betas.begin(), betas.end())) {
    for (std::size_t j = 0; j < betas.size(); ++j) {
      if (radii[j] > 0.0) terms_.push_back({betas[j], radii[j]});
    }
  }
  double operator()(int k) const {
    const double x = b0_ + bmin_ * k;
    const double lx = lgamma_fn(x);
    double rho = 0.0;
    for (const auto& [b, r] : terms_) rho += r * std::exp(lx - lgamma_fn(x + b));
    return rho;
  }

 private:
  double b0_;
  double bmin_;
  std::vector<std::pair<double, double>> terms_;
};

/// Tail bound sum_{i>k} A_i <= A_k rho_k / (1 - rho_k); infinite while rho_k >= 1.
inline double geometric_tail(double shell_abs, double rho) {
  if (shell_abs == 0.0) return 0.0;
  return rho < 1.0 ? shell_abs * rho / (1.0 - rho) : INFINITY;
}

inline constexpr int kConsecutiveShellsBelow = 3;

struct MajorantScan {
  bool converges = false;
  int shells = 0;
  double peak = 0.0;
  double terms = 0.0;
};

/// Walk the majorant B_0 = 1/Gamma(b0), B_{k+1} = rho_k B_k with the series'
/// stopping rule, without summing. Predicts shell count, work and cancellation.
inline MajorantScan scan_majorant(double b0, std::span<const double> betas,
                                  std::span<const double> radii, double tol, int max_k) {
  MajorantScan scan;
  const ShellRatio ratio(b0, betas, radii);
  const double m = static_cast<double>(betas.size());
  double shell_count = 1.0;  // C(k+m-1, m-1)
  double bound = std::abs(rgamma(b0));
  int below = 0;
  for (int k = 0; k <= max_k; ++k) {
    if (k > 0) shell_count *= (k + m - 1.0) / k;
    scan.terms += shell_count;
    scan.peak = std::max(scan.peak, bound);
    const double rho = ratio(k);
    below = geometric_tail(bound, rho) < tol ? below + 1 : 0;
    if (below >= kConsecutiveShellsBelow) {
      scan.converges = true;
      scan.shells = k + 1;
      return scan;
    }
    bound *= rho;
  }
  scan.shells = max_k + 1;
  return scan;
}

struct SeriesOutcome {
  cplx sum;
  double tail_bound = 0.0;
  double roundoff = 0.0;
  int shells = 0;
  bool converged = false;
};

/// Shell-by-shell summation for any b0 > 0 (the shift identity needs b0 + b_j up to 3).
inline SeriesOutcome series_sum(double b0, std::span<const double> betas, std::span<const cplx> z,
                                double tol, int max_k) {
  using lcplx = std::complex<long double>;
  const std::size_t m = betas.size();
  if (z.size() != m) throw DomainError("MLArgs length must match MLParams.m");
  if (!(tol > 0.0)) throw DomainError("series tolerance must be positive");
  if (max_k < 1) throw DomainError("series max_k must be >= 1");

  std::vector<double> radii(m);
  for (std::size_t j = 0; j < m; ++j) radii[j] = std::abs(z[j]);
  const ShellRatio ratio(b0, betas, radii);
  const bool all_zero = std::all_of(radii.begin(), radii.end(), [](double r) { return r == 0.0; });

  // Two power tables: z_j^k / k! with the multinomial factor k! applied once per
  // shell, and plain z_j^k for shells where k! overflows long double, whose
  // terms carry their own exp(log k! - sum log k_j!). Products are expanded by
  // hand so the inner loop avoids the library's checked complex multiply and hypot.
  std::vector<std::vector<lcplx>> zs(m, std::vector<lcplx>{lcplx(1.0L)});
  std::vector<std::vector<long double>> rs(m, std::vector<long double>{1.0L});
  std::vector<std::vector<lcplx>> zraw = zs;
  std::vector<std::vector<long double>> rraw = rs;
  constexpr long double kMaxLogShellFactor = 11000.0L;
  std::vector<long double> lnfact{0.0L};
  std::vector<int> parts(m, 0);

  lcplx sum = 0.0L;
  long double abs_total = 0.0L;
  double work = 0.0;
  int below = 0;
  SeriesOutcome out;
  for (int k = 0; k <= max_k && work <= kSeriesWorkLimit; ++k) {
    if (k > 0) {
      const long double kk = static_cast<long double>(k);
      lnfact.push_back(lnfact.back() + std::log(kk));
      for (std::size_t j = 0; j < m; ++j) {
        const lcplx zj(z[j].real(), z[j].imag());
        zs[j].push_back(zs[j].back() * (zj / kk));
        rs[j].push_back(rs[j].back() * (static_cast<long double>(radii[j]) / kk));
        zraw[j].push_back(zraw[j].back() * zj);
        rraw[j].push_back(rraw[j].back() * static_cast<long double>(radii[j]));
      }
    }
    std::fill(parts.begin(), parts.end(), 0);
    parts[0] = k;
    const long double log_kfact = lnfact[static_cast<std::size_t>(k)];
    const bool per_shell = log_kfact <= kMaxLogShellFactor;
    const auto& zt = per_shell ? zs : zraw;
    const auto& rt = per_shell ? rs : rraw;
    lcplx shell = 0.0L;
    long double shell_abs = 0.0L;
    if (k == 0 || !all_zero) {
      do {
        work += 1.0;
        double x = b0;
        long double lc = log_kfact;
        long double re = 1.0L, im = 0.0L, mag = 1.0L;
        bool zero = false;
        for (std::size_t j = 0; j < m; ++j) {
          const auto kj = static_cast<std::size_t>(parts[j]);
          if (kj > 0 && radii[j] == 0.0) {
            zero = true;
            break;
          }
          x += betas[j] * parts[j];
          lc -= lnfact[kj];
          const lcplx& w = zt[j][kj];
          const long double r = re * w.real() - im * w.imag();
          im = re * w.imag() + im * w.real();
          re = r;
          mag *= rt[j][kj];
        }
        if (zero) continue;
        const long double scale = per_shell ? rgamma_ld(x) : std::exp(lc) * rgamma_ld(x);
        shell += lcplx(re * scale, im * scale);
        shell_abs += mag * std::fabs(scale);
      } while (next_composition(parts));
    }
    if (per_shell) {
      const long double kfact = std::exp(log_kfact);
      shell *= kfact;
      shell_abs *= kfact;
    }
    sum += shell;
    abs_total += shell_abs;
    out.shells = k + 1;

    const double tail = geometric_tail(static_cast<double>(shell_abs), ratio(k));
    below = tail < tol ? below + 1 : 0;
    if (below >= kConsecutiveShellsBelow) {
      out.tail_bound = tail;
      out.converged = true;
      break;
    }
  }
  if (!std::isfinite(std::abs(sum)) || !std::isfinite(abs_total)) out.converged = false;
  out.sum = cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
  out.roundoff = kSeriesTermRelError * static_cast<double>(abs_total);
  return out;
}

}  // namespace detail

/// Power-series evaluation with a majorant tail bound.
inline EvalResult mml_series(const MLParams& params, const MLArgs& args,
                             double tol = tol::kSeriesDefault, int max_k = 2000) {
  if (args.size() != params.m()) throw DomainError("MLArgs length must match MLParams.m");
  const auto out = detail::series_sum(params.beta0, params.betas, args.z, tol, max_k);
  if (!out.converged) {
    throw SeriesNotConverged("multinomial series did not converge within " +
                                 std::to_string(max_k) + " shells",
                             out.sum, out.shells);
  }
  return {out.sum, out.tail_bound + out.roundoff, EvalMethod::Series};
}

// ---------------------------------------------------------------------------
// Contour integral

/// True when params has the form (alpha_1, alpha_1 - alpha_2, ..., alpha_1 - alpha_m)
/// for some 1 > alpha_1 > ... > alpha_m > 0.
inline bool is_solver_family(const MLParams& params) {
  const double a1 = params.betas[0];
  for (std::size_t j = 1; j < params.m(); ++j) {
    const double aj = a1 - params.betas[j];
    const double prev = j == 1 ? a1 : a1 - params.betas[j - 1];
    if (!(aj > 0.0 && aj < prev)) return false;
  }
  return true;
}

/// Quadrature of the contour representation with the pole-free part of the
/// integrand precomputed, so that many z_1 values (one per eigenmode) share
/// one set of exponentials and powers.
class ContourKernel {
 public:
  ContourKernel(const MLParams& params, std::span<const cplx> tail_args, const ContourConfig& cfg)
      : cfg_(cfg), alpha1_(params.betas[0]) {
    if (!is_solver_family(params)) {
      throw DomainError("contour evaluation needs the solver parameter family");
    }
    if (tail_args.size() + 1 != params.m()) throw DomainError("MLArgs length must match MLParams.m");
    for (const auto& zj : tail_args) {
      if (zj.imag() != 0.0 || zj.real() > 0.0) {
        throw DomainError("contour evaluation needs z_j real and <= 0 for j >= 2");
      }
    }
    cfg_.validate(alpha1_);
    beta0_ = params.beta0;
    for (std::size_t j = 1; j < params.m(); ++j) {
      ratios_.push_back((alpha1_ - params.betas[j]) / alpha1_);
      tail_.push_back(tail_args[j - 1].real());
    }
    build(cfg_.quad_points, fine_);
    build(std::max(4, cfg_.quad_points - 4), coarse_);
  }

  const ContourConfig& config() const noexcept { return cfg_; }

  /// True when z_1 lies in the sector mu <= |arg z_1| <= pi (or is zero).
  bool covers(cplx z1) const noexcept {
    return z1 == cplx(0.0) || std::abs(std::arg(z1)) >= cfg_.mu;
  }

  EvalResult evaluate(cplx z1) const {
    if (!covers(z1)) {
      throw DomainError("contour evaluation needs mu <= |arg z_1| <= pi");
    }
    double mass = 0.0;
    double min_gap = INFINITY;
    const cplx fine = sum(fine_, z1, &mass, &min_gap);
    const cplx coarse = sum(coarse_, z1, nullptr, nullptr);
    if (!(min_gap > 1e-12 * (1.0 + std::abs(z1)))) {
      throw ConvergenceError("contour passes through a pole of the integrand");
    }
    const double err = std::abs(fine - coarse) + 64.0 * 2.2e-16 * mass;
    if (!(err <= 1e-6 * (std::abs(fine) + mass)) || !std::isfinite(std::abs(fine))) {
      throw ConvergenceError("contour quadrature did not converge (refinement disagreement " +
                             std::to_string(err) + ")");
    }
    return {fine, err, EvalMethod::Contour};
  }

 private:
  struct Node {
    cplx shift;   // zeta - sum_j z_j zeta^{alpha_j/alpha_1}
    cplx weight;  // quadrature weight * dzeta * exp(zeta^{1/alpha_1}) zeta^{(1-beta0)/alpha_1} / (2 alpha_1 pi i)
  };

  static cplx sum(const std::vector<Node>& nodes, cplx z1, double* mass, double* min_gap) {
    cplx s = 0.0;
    double a = 0.0;
    double gap = INFINITY;
    for (const auto& n : nodes) {
      const cplx d = n.shift - z1;
      const cplx term = n.weight / d;
      s += term;
      a += std::abs(term);
      gap = std::min(gap, std::abs(d));
    }
    if (mass) *mass = a;
    if (min_gap) *min_gap = gap;
    return s;
  }

  /// zeta = rho e^{i phi} given log rho; returns shift and integrand factor.
  void add_node(std::vector<Node>& out, double rho_pow_inv /* rho^{1/alpha1} */, double phi,
                cplx dzeta, double w) const {
    const double inv = 1.0 / alpha1_;
    const double rho = std::pow(rho_pow_inv, alpha1_);
    const cplx zeta = std::polar(rho, phi);
    // exp(zeta^{1/alpha1}) with zeta^{1/alpha1} = rho^{1/alpha1} e^{i phi/alpha1}
    const cplx e = std::exp(std::polar(rho_pow_inv, phi * inv));
    const double p = (1.0 - beta0_) * inv;
    const cplx num = std::polar(std::pow(rho_pow_inv, 1.0 - beta0_), phi * p);
    cplx shift = zeta;
    for (std::size_t j = 0; j < ratios_.size(); ++j) {
      shift -= tail_[j] * std::polar(std::pow(rho, ratios_[j]), phi * ratios_[j]);
    }
    const cplx scale(0.0, -1.0 / (2.0 * alpha1_ * std::numbers::pi));  // 1/(2 alpha1 pi i)
    out.push_back({shift, w * dzeta * e * num * scale});
  }

  void build(int order, std::vector<Node>& out) const {
    const auto& gl = gauss_legendre(order);
    const double theta = cfg_.theta;
    const double R = cfg_.radius;
    const double u0 = std::pow(R, 1.0 / alpha1_);
    // arc: zeta = R e^{i phi}, phi in [-theta, theta]
    const int arc_panels = 8;
    for (int p = 0; p < arc_panels; ++p) {
      const double a = -theta + 2.0 * theta * p / arc_panels;
      const double b = -theta + 2.0 * theta * (p + 1) / arc_panels;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double phi = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
        const double w = 0.5 * (b - a) * gl.weights[i];
        const cplx dzeta = cplx(0.0, 1.0) * std::polar(R, phi);
        add_node(out, u0, phi, dzeta, w);
      }
    }
    // rays, parametrized by u = |zeta|^{1/alpha1}
    const double decay = std::cos(theta / alpha1_);  // negative
    const double u_max = std::max(u0, u0 + std::log(cfg_.tail_cutoff) / decay);
    std::vector<double> edges{u0};
    double width = 0.5 * std::min(u0, 1.0);
    while (edges.back() < u_max) {
      edges.push_back(std::min(u_max, edges.back() + width));
      width = std::min(4.0, width * 1.5);
    }
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double a = edges[p];
      const double b = edges[p + 1];
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double u = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
        const double w = 0.5 * (b - a) * gl.weights[i];
        const double jac = alpha1_ * std::pow(u, alpha1_ - 1.0);
        add_node(out, u, theta, jac * std::polar(1.0, theta), w);     // outward, upper
        add_node(out, u, -theta, -jac * std::polar(1.0, -theta), w);  // inward, lower
      }
    }
  }

  ContourConfig cfg_;
  double alpha1_;
  double beta0_ = 1.0;
  std::vector<double> ratios_;  // alpha_j / alpha_1, j >= 2
  std::vector<double> tail_;    // z_j, j >= 2 (real, <= 0)
  std::vector<Node> fine_;
  std::vector<Node> coarse_;
};

/// Contour-integral evaluation for the solver family.
inline EvalResult mml_contour(const MLParams& params, const MLArgs& args, const ContourConfig& cfg) {
  if (args.size() != params.m()) throw DomainError("MLArgs length must match MLParams.m");
  const ContourKernel kernel(params, std::span<const cplx>(args.z).subspan(1), cfg);
  return kernel.evaluate(args.z[0]);
}

// ---------------------------------------------------------------------------
// Dispatch

namespace detail {

inline bool series_preferred(double b0, std::span<const double> betas, std::span<const cplx> z) {
  std::vector<double> radii(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) radii[j] = std::abs(z[j]);
  const auto scan = scan_majorant(b0, betas, radii, tol::kSeriesDefault, kMaxSeriesShells);
  return scan.converges && scan.shells <= kMaxSeriesShells && scan.peak <= kSeriesPeakLimit &&
         scan.terms <= kMaxSeriesTerms;
}

inline bool contour_applicable(const MLParams& params, const MLArgs& args, const ContourConfig& cfg) {
  if (!is_solver_family(params)) return false;
  for (std::size_t j = 1; j < args.size(); ++j) {
    if (args.z[j].imag() != 0.0 || args.z[j].real() > 0.0) return false;
  }
  return args.z[0] == cplx(0.0) || std::abs(std::arg(args.z[0])) >= cfg.mu;
}

}  // namespace detail

/// Series for arguments within its accurate reach, contour integral otherwise.
inline EvalResult mml_eval(const MLParams& params, const MLArgs& args) {
  if (args.size() != params.m()) throw DomainError("MLArgs length must match MLParams.m");
  if (detail::series_preferred(params.beta0, params.betas, args.z)) {
    return mml_series(params, args, tol::kSeriesDefault, kMaxSeriesShells + 50);
  }
  const auto cfg = ContourConfig::defaults(params.betas[0]);
  if (detail::contour_applicable(params, args, cfg)) return mml_contour(params, args, cfg);
  throw DomainError(
      "arguments outside both validity regions: series out of reach and contour needs the solver "
      "family with mu <= |arg z_1| <= pi and real z_j <= 0 (j >= 2)");
}

namespace detail {

inline double checked_real(const EvalResult& r) {
  const double slack = 10.0 * r.abs_error_estimate + tol::kImaginaryResidue * std::max(1.0, std::abs(r.value.real()));
  if (std::abs(r.value.imag()) > slack) {
    throw ConvergenceError("real-valued evaluation left an imaginary residue of " +
                           std::to_string(r.value.imag()));
  }
  return r.value.real();
}

inline MLArgs solver_args(double lambda, const FracOrders& orders, double t) {
  MLArgs args;
  const double a1 = orders.alpha_max();
  args.z.emplace_back(-lambda * std::pow(t, a1), 0.0);
  for (std::size_t j = 1; j < orders.size(); ++j) {
    args.z.emplace_back(-orders.q(j) * std::pow(t, a1 - orders.alpha(j)), 0.0);
  }
  return args;
}

}  // namespace detail

/// E^{(n)}_{alpha', beta0}(t) with z_1 = -lambda t^{alpha_1}, z_j = -q_j t^{alpha_1 - alpha_j}.
inline double e_solver(double lambda, const FracOrders& orders, double beta0, double t) {
  if (!(t > 0.0)) throw DomainError("e_solver needs t > 0");
  if (!(lambda >= 0.0)) throw DomainError("e_solver needs lambda >= 0");
  const auto params = MLParams::solver_family(orders, beta0);
  return detail::checked_real(mml_eval(params, detail::solver_args(lambda, orders, t)));
}

/// e_solver for many eigenvalues at one time; contour evaluations share one kernel.
inline std::vector<double> e_solver_batch(std::span<const double> lambdas, const FracOrders& orders,
                                          double beta0, double t) {
  if (!(t > 0.0)) throw DomainError("e_solver needs t > 0");
  const auto params = MLParams::solver_family(orders, beta0);
  const MLArgs base = detail::solver_args(0.0, orders, t);
  const double t_a1 = std::pow(t, orders.alpha_max());
  std::optional<ContourKernel> kernel;
  std::vector<double> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    if (!(lambda >= 0.0)) throw DomainError("e_solver needs lambda >= 0");
    const double z1 = -lambda * t_a1;
    MLArgs args = base;
    args.z[0] = cplx(z1, 0.0);
    if (detail::series_preferred(beta0, params.betas, args.z)) {
      out[i] = detail::checked_real(mml_series(params, args, tol::kSeriesDefault, kMaxSeriesShells + 50));
    } else {
      if (!kernel) {
        kernel.emplace(params, std::span<const cplx>(base.z).subspan(1),
                       ContourConfig::defaults(orders.alpha_max()));
      }
      out[i] = detail::checked_real(kernel->evaluate(cplx(z1, 0.0)));
    }
  }
  return out;
}

/// |1/Gamma(b0) + sum_j z_j E_{b0 + b_j}(z) - E_{b0}(z)|, every term by series.
inline double ml_identity_residual(const MLParams& params, const MLArgs& args,
                                   double tol = tol::kSeriesDefault, int max_k = 4000) {
  if (args.size() != params.m()) throw DomainError("MLArgs length must match MLParams.m");
  auto eval = [&](double b0) {
    const auto out = detail::series_sum(b0, params.betas, args.z, tol, max_k);
    if (!out.converged) {
      throw SeriesNotConverged("series did not converge in ml_identity_residual", out.sum, out.shells);
    }
    return out.sum;
  };
  cplx lhs = rgamma(params.beta0);
  for (std::size_t j = 0; j < params.m(); ++j) lhs += args.z[j] * eval(params.beta0 + params.betas[j]);
  return std::abs(lhs - eval(params.beta0));
}

}  // namespace mtfrac
