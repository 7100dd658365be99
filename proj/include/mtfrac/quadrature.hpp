#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "mtfrac/error.hpp"

namespace mtfrac {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre gl;
  gl.nodes.resize(static_cast<std::size_t>(n));
  gl.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    gl.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    gl.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

}  // namespace detail

/// Cached n-point rule (n >= 1); safe to call concurrently.
inline const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

/// Nodes t_k = t_final * (k/n)^grading, k = 0..n.
inline std::vector<double> graded_mesh(double t_final, int n, double grading) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    t[static_cast<std::size_t>(k)] =
        t_final * std::pow(static_cast<double>(k) / n, grading);
  }
  t.back() = t_final;
  return t;
}

/// n points spaced uniformly in log between lo and hi (inclusive).
inline std::vector<double> log_grid(double lo, double hi, int n) {
  if (n == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// Composite trapezoid over arbitrary (increasing) nodes.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

/// A product-integration rule: int f(s) K(s) ds ~= sum_i weights[i] * f(nodes[i]).
struct ProductRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double apply(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
  double apply_values(std::span<const double> values) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * values[i];
    return s;
  }
};

/// Gauss-Legendre points per panel in singular_product_rule.
inline constexpr int kProductRuleOrder = 8;

/// Rule for  int_0^t s^(a-1) (t-s)^(-b) h(s) ds  with h continuous on [0, t]
/// and smooth inside.
///
/// Both endpoint factors are removed by substitution: on [0, t/2] with
/// v = s^a (so s^(a-1) ds = dv/a), on [t/2, t] with w = (t-s)^(1-b). Each half
/// is split into `panels` panels graded toward the singular end, node
/// v_k = V (k/panels)^grading (the right half uses grading 2), with
/// kProductRuleOrder Gauss-Legendre points per panel. The remaining smooth
/// factors are evaluated at the nodes.
inline ProductRule singular_product_rule(double t, double a, double b, int panels, double grading) {
  if (!(t > 0.0)) throw DomainError("product rule needs t > 0");
  if (!(a > 0.0) || !(b < 1.0)) throw DomainError("product rule needs a > 0 and b < 1");
  if (panels < 1) throw DomainError("product rule needs at least one panel");
  if (!(grading >= 1.0)) throw DomainError("product rule grading must be >= 1");
  const auto& gl = gauss_legendre(kProductRuleOrder);
  const double c = 0.5 * t;
  ProductRule rule;
  rule.nodes.reserve(2 * static_cast<std::size_t>(panels) * gl.nodes.size());
  rule.weights.reserve(rule.nodes.capacity());

  // left: int_0^{c^a} (t - s)^(-b) h(s) dv / a,  s = v^(1/a)
  const auto left = graded_mesh(std::pow(c, a), panels, grading);
  for (int k = 0; k < panels; ++k) {
    const double lo = left[static_cast<std::size_t>(k)];
    const double hi = left[static_cast<std::size_t>(k) + 1];
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double v = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[i];
      const double s = std::pow(v, 1.0 / a);
      rule.nodes.push_back(s);
      rule.weights.push_back(0.5 * (hi - lo) * gl.weights[i] / a * std::pow(t - s, -b));
    }
  }
  // right: int_0^{c^(1-b)} s^(a-1) h(s) dw / (1 - b),  s = t - w^(1/(1-b))
  const double e = 1.0 - b;
  const auto right = graded_mesh(std::pow(c, e), panels, 2.0);
  for (int k = panels - 1; k >= 0; --k) {
    const double lo = right[static_cast<std::size_t>(k)];
    const double hi = right[static_cast<std::size_t>(k) + 1];
    for (std::size_t i = gl.nodes.size(); i-- > 0;) {
      const double w = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[i];
      const double s = t - std::pow(w, 1.0 / e);
      rule.nodes.push_back(s);
      rule.weights.push_back(0.5 * (hi - lo) * gl.weights[i] / e * std::pow(s, a - 1.0));
    }
  }
  return rule;
}

/// Deterministic parallel loop: fn(i) for i in [0, n) split into contiguous
/// blocks over `threads` workers. Results must be written to per-index slots.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mtfrac
