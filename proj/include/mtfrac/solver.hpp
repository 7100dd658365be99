#pragma once

// Modal solution of
//   sum_j q_j d_t^{alpha_j} u = -(-L) u + F,  u(0) = a,  Dirichlet boundary,
// with u = sum_n u_n(t) phi_n and
//   u_n(t) = (a, phi_n) (1 - lambda_n t^{alpha_1} E^{(n)}_{alpha', 1 + alpha_1}(t))
//          + int_0^t s^{alpha_1 - 1} E^{(n)}_{alpha', alpha_1}(s) F_n(t - s) ds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtfrac/error.hpp"
#include "mtfrac/gamma.hpp"
#include "mtfrac/orders.hpp"
#include "mtfrac/quadrature.hpp"
#include "mtfrac/specfun.hpp"
#include "mtfrac/spectral.hpp"
#include "mtfrac/tolerances.hpp"

namespace mtfrac {

/// Source F sampled on the uniform time grid t_k = k dt, stored by mode
/// (rows = modes, columns = frames). A single frame means constant in time.
class SourceSamples {
 public:
  SourceSamples(Eigen::MatrixXd modal, double dt) : modal_(std::move(modal)), dt_(dt) {
    if (modal_.cols() < 1) throw DomainError("source needs at least one time frame");
    if (modal_.cols() > 1 && !(dt_ > 0.0)) throw DomainError("source time step must be positive");
    if (!modal_.allFinite()) throw DomainError("source samples must be finite");
  }

  /// Grid-sampled frames F(., k dt), projected onto the spectrum.
  static SourceSamples from_grid(const std::vector<GridFunction>& frames, double dt, const Spectrum& s) {
    if (frames.empty()) throw DomainError("source needs at least one time frame");
    Eigen::MatrixXd modal(s.n_modes(), static_cast<Eigen::Index>(frames.size()));
    for (std::size_t k = 0; k < frames.size(); ++k) modal.col(static_cast<Eigen::Index>(k)) = project(frames[k], s);
    return SourceSamples(std::move(modal), dt);
  }

  /// Time-independent source f(x).
  static SourceSamples constant(const GridFunction& f, const Spectrum& s) {
    return SourceSamples(project(f, s), 0.0);
  }

  Eigen::Index n_modes() const noexcept { return modal_.rows(); }
  Eigen::Index n_frames() const noexcept { return modal_.cols(); }
  double dt() const noexcept { return dt_; }
  bool time_independent() const noexcept { return modal_.cols() == 1; }
  double horizon() const noexcept { return time_independent() ? INFINITY : dt_ * static_cast<double>(modal_.cols() - 1); }
  const Eigen::MatrixXd& modal() const noexcept { return modal_; }

  /// F_n(t) by linear interpolation between frames.
  double value(Eigen::Index n, double t) const {
    if (time_independent()) return modal_(n, 0);
    const double pos = std::clamp(t / dt_, 0.0, static_cast<double>(modal_.cols() - 1));
    const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), modal_.cols() - 2);
    const double w = pos - static_cast<double>(k);
    return (1.0 - w) * modal_(n, k) + w * modal_(n, k + 1);
  }

  /// All modes at time t.
  Eigen::VectorXd values(double t) const {
    Eigen::VectorXd v(modal_.rows());
    for (Eigen::Index n = 0; n < v.size(); ++n) v(n) = value(n, t);
    return v;
  }

  /// Throws unless the frames resolve [0, t]: the grid must reach t and hold at
  /// least two sample intervals inside it.
  void check_resolves(double t) const {
    if (time_independent()) return;
    if (horizon() < t * (1.0 - 1e-12)) {
      throw DomainError("source undersampled: time grid ends at " + std::to_string(horizon()) +
                        " before t = " + std::to_string(t));
    }
    if (t / dt_ < 2.0) {
      throw DomainError("source undersampled: fewer than two sample intervals in [0, t]");
    }
  }

 private:
  Eigen::MatrixXd modal_;
  double dt_;
};

/// Full initial-boundary value problem.
struct Problem {
  FracOrders orders;
  std::shared_ptr<const Operator1D> op;
  std::shared_ptr<const Spectrum> spectrum;
  GridFunction initial;
  std::optional<SourceSamples> source;

  Problem(FracOrders orders_, Operator1D op_, GridFunction initial_,
          std::optional<SourceSamples> source_ = std::nullopt)
      : orders(std::move(orders_)),
        op(std::make_shared<const Operator1D>(std::move(op_))),
        spectrum(std::make_shared<const Spectrum>(eigendecompose(*op))),
        initial(std::move(initial_)),
        source(std::move(source_)) {
    validate();
  }

  Problem(FracOrders orders_, std::shared_ptr<const Operator1D> op_, std::shared_ptr<const Spectrum> spectrum_,
          GridFunction initial_, std::optional<SourceSamples> source_ = std::nullopt)
      : orders(std::move(orders_)),
        op(std::move(op_)),
        spectrum(std::move(spectrum_)),
        initial(std::move(initial_)),
        source(std::move(source_)) {
    validate();
  }

  void validate() const {
    if (!op || !spectrum) throw DomainError("problem needs an operator and its spectrum");
    if (spectrum->n_points() != op->n_interior()) throw DomainError("spectrum does not match the operator grid");
    if (initial.size() != op->n_interior()) throw DomainError("initial value length does not match the grid");
    if (source && source->n_modes() != spectrum->n_modes()) throw DomainError("source modes do not match the spectrum");
  }

  bool homogeneous() const noexcept { return !source.has_value(); }
  Eigen::VectorXd initial_modal() const { return project(initial, *spectrum); }
  const std::vector<double> lambdas() const { return spectrum->lambda_list(); }
};

/// Quadrature resolution for convolution-type time integrals.
struct QuadConfig {
  int panels = 16;            // per half of [0, t]
  double grading = 0.0;       // <= 0 selects max(4, 2/alpha_1)
  double refine_tol = 1e-5;   // relative K vs 2K agreement required
  bool check_refinement = true;
  int threads = 1;

  double grading_for(const FracOrders& o) const { return grading > 0.0 ? grading : std::max(4.0, 2.0 / o.alpha_max()); }
};

// ---------------------------------------------------------------------------
// Per-mode kernels

/// 1 - lambda t^{alpha_1} E^{(n)}_{alpha', 1 + alpha_1}(t); exactly 1 at t = 0.
inline double mode_amplitude(const FracOrders& orders, double lambda, double t) {
  if (!(t >= 0.0)) throw DomainError("mode_amplitude needs t >= 0");
  if (t == 0.0) return 1.0;
  const double a1 = orders.alpha_max();
  return 1.0 - lambda * std::pow(t, a1) * e_solver(lambda, orders, 1.0 + a1, t);
}

/// mode_amplitude for every lambda at one t.
inline std::vector<double> mode_amplitudes(const FracOrders& orders, std::span<const double> lambdas, double t) {
  if (!(t >= 0.0)) throw DomainError("mode_amplitude needs t >= 0");
  if (t == 0.0) return std::vector<double>(lambdas.size(), 1.0);
  const double a1 = orders.alpha_max();
  const double ta = std::pow(t, a1);
  auto e = e_solver_batch(lambdas, orders, 1.0 + a1, t);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = 1.0 - lambdas[i] * ta * e[i];
  return e;
}

/// E^{(n)}_{alpha', alpha_1}(s) for every lambda, including s = 0.
inline std::vector<double> kernel_values(const FracOrders& orders, std::span<const double> lambdas, double s) {
  if (s == 0.0) return std::vector<double>(lambdas.size(), rgamma(orders.alpha_max()));
  return e_solver_batch(lambdas, orders, orders.alpha_max(), s);
}

/// d/dt of mode_amplitude: -lambda t^{alpha_1 - 1} E^{(n)}_{alpha', alpha_1}(t).
inline double mode_derivative(const FracOrders& orders, double lambda, double t) {
  if (!(t > 0.0)) throw DomainError("time derivative is unbounded at t = 0");
  const double a1 = orders.alpha_max();
  return -lambda * std::pow(t, a1 - 1.0) * e_solver(lambda, orders, a1, t);
}

// ---------------------------------------------------------------------------
// Solutions

/// Amplitude cache shared by all evaluations of one problem; safe for concurrent use.
class ModalSolution {
 public:
  explicit ModalSolution(const Problem& p) : problem_(&p), lambdas_(p.lambdas()), coeffs_(p.initial_modal()) {}

  const Problem& problem() const noexcept { return *problem_; }
  const Eigen::VectorXd& initial_coefficients() const noexcept { return coeffs_; }

  /// mode_amplitude(n, t) for all n (cached by t).
  std::shared_ptr<const std::vector<double>> amplitudes(double t) const {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(t); it != cache_.end()) return it->second;
    }
    auto v = std::make_shared<const std::vector<double>>(mode_amplitudes(problem_->orders, lambdas_, t));
    std::lock_guard lock(mutex_);
    return cache_.emplace(t, std::move(v)).first->second;
  }

  double amplitude(Eigen::Index n, double t) const { return (*amplitudes(t))[static_cast<std::size_t>(n)]; }

  /// Modal coefficients a_n u_n(t) of the homogeneous part.
  Eigen::VectorXd homogeneous_coefficients(double t) const {
    const auto amp = amplitudes(t);
    Eigen::VectorXd c(coeffs_.size());
    for (Eigen::Index n = 0; n < c.size(); ++n) c(n) = coeffs_(n) * (*amp)[static_cast<std::size_t>(n)];
    return c;
  }

  GridFunction homogeneous(double t) const { return synthesize(homogeneous_coefficients(t), *problem_->spectrum); }

  std::size_t cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
  }

 private:
  const Problem* problem_;
  std::vector<double> lambdas_;
  Eigen::VectorXd coeffs_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const std::vector<double>>> cache_;
};

/// Solution of the source-free problem at time t.
inline GridFunction solve_homogeneous(const Problem& p, double t) {
  if (!p.homogeneous()) throw DomainError("solve_homogeneous needs a problem without source");
  if (!(t >= 0.0)) throw DomainError("solve_homogeneous needs t >= 0");
  return ModalSolution(p).homogeneous(t);
}

namespace detail {

/// Evaluate fn(node_index) -> per-mode vector at every rule node (in parallel).
inline std::vector<std::vector<double>> per_node(const ProductRule& rule, int threads,
                                                 const std::function<std::vector<double>(double)>& fn) {
  std::vector<std::vector<double>> out(rule.nodes.size());
  parallel_for(rule.nodes.size(), threads, [&](std::size_t i) { out[i] = fn(rule.nodes[i]); });
  return out;
}

/// Apply a product rule whose node values are per-mode vectors.
inline Eigen::VectorXd apply_modal(const ProductRule& rule, const std::vector<std::vector<double>>& values,
                                   Eigen::Index n_modes) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_modes);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (Eigen::Index n = 0; n < n_modes; ++n) acc(n) += rule.weights[i] * values[i][static_cast<std::size_t>(n)];
  }
  return acc;
}

/// Run a modal product quadrature at K and 2K panels and enforce agreement.
inline Eigen::VectorXd refined_modal_integral(double t, double a, double b, const QuadConfig& q, double grading,
                                              Eigen::Index n_modes,
                                              const std::function<std::vector<double>(double)>& integrand,
                                              const char* what) {
  const auto fine_rule = singular_product_rule(t, a, b, 2 * q.panels, grading);
  const Eigen::VectorXd fine = apply_modal(fine_rule, per_node(fine_rule, q.threads, integrand), n_modes);
  if (!q.check_refinement) return fine;
  const auto coarse_rule = singular_product_rule(t, a, b, q.panels, grading);
  const Eigen::VectorXd coarse = apply_modal(coarse_rule, per_node(coarse_rule, q.threads, integrand), n_modes);
  const double scale = std::max(fine.norm(), 1e-300);
  const double diff = (fine - coarse).norm();
  if (diff > q.refine_tol * scale && diff > 1e-13) {
    throw ConvergenceError(std::string(what) + ": quadrature refinement disagreement " + std::to_string(diff / scale) +
                           " exceeds " + std::to_string(q.refine_tol));
  }
  return fine;
}

}  // namespace detail

/// Modal coefficients of the source contribution
///   T_n(t) = int_0^t s^{alpha_1 - 1} E^{(n)}_{alpha', alpha_1}(s) F_n(t - s) ds.
inline Eigen::VectorXd source_coefficients(const Problem& p, double t, const QuadConfig& q = {}) {
  if (!p.source) throw DomainError("problem has no source");
  if (!(t > 0.0)) throw DomainError("solve_source needs t > 0");
  const auto& src = *p.source;
  src.check_resolves(t);
  QuadConfig qq = q;
  if (!src.time_independent()) {
    // piecewise-linear samples: one panel per sample interval on each half of [0, t]
    qq.panels = std::max(q.panels, static_cast<int>(std::ceil(t / src.dt())));
  }
  const auto lambdas = p.lambdas();
  const auto& orders = p.orders;
  const Eigen::Index n_modes = p.spectrum->n_modes();
  auto integrand = [&](double s) {
    auto e = kernel_values(orders, lambdas, s);
    for (Eigen::Index n = 0; n < n_modes; ++n) e[static_cast<std::size_t>(n)] *= src.value(n, t - s);
    return e;
  };
  return detail::refined_modal_integral(t, orders.alpha_max(), 0.0, qq, qq.grading_for(orders), n_modes, integrand,
                                        "solve_source");
}

/// Source part for a time-independent source without quadrature:
/// int_0^t s^{alpha_1-1} E^{(n)}_{alpha',alpha_1}(s) ds = t^{alpha_1} E^{(n)}_{alpha',1+alpha_1}(t).
inline Eigen::VectorXd constant_source_coefficients(const Problem& p, double t) {
  if (!p.source || !p.source->time_independent()) throw DomainError("problem has no time-independent source");
  if (!(t >= 0.0)) throw DomainError("solve_source needs t >= 0");
  const Eigen::VectorXd f = p.source->modal().col(0);
  if (t == 0.0) return Eigen::VectorXd::Zero(f.size());
  const auto lambdas = p.lambdas();
  const double a1 = p.orders.alpha_max();
  const auto e = e_solver_batch(lambdas, p.orders, 1.0 + a1, t);
  const double ta = std::pow(t, a1);
  Eigen::VectorXd c(f.size());
  for (Eigen::Index n = 0; n < c.size(); ++n) c(n) = f(n) * ta * e[static_cast<std::size_t>(n)];
  return c;
}

/// Source contribution to the solution (the full solution when a = 0).
inline GridFunction solve_source(const Problem& p, double t, const QuadConfig& q = {}) {
  return synthesize(source_coefficients(p, t, q), *p.spectrum);
}

/// Homogeneous part plus source part.
inline GridFunction solve(const Problem& p, double t, const QuadConfig& q = {}) {
  GridFunction u = ModalSolution(p).homogeneous(t);
  if (p.source && t > 0.0) u += solve_source(p, t, q);
  return u;
}

/// d/dt u for the source-free problem: -t^{alpha_1 - 1} sum lambda_n E^{(n)}_{alpha', alpha_1}(t) a_n phi_n.
inline GridFunction time_derivative(const Problem& p, double t) {
  if (!p.homogeneous()) throw DomainError("time_derivative needs a problem without source");
  if (!(t > 0.0)) throw DomainError("time derivative is unbounded at t = 0");
  const auto lambdas = p.lambdas();
  const auto e = kernel_values(p.orders, lambdas, t);
  const Eigen::VectorXd a = p.initial_modal();
  const double ta = std::pow(t, p.orders.alpha_max() - 1.0);
  Eigen::VectorXd c(a.size());
  for (Eigen::Index n = 0; n < a.size(); ++n) c(n) = -ta * lambdas[static_cast<std::size_t>(n)] * e[static_cast<std::size_t>(n)] * a(n);
  return synthesize(c, *p.spectrum);
}

/// Caputo derivative d_t^beta of every mode amplitude (a_n = 1), from the
/// analytic time derivative:
///   (1/Gamma(1-beta)) int_0^t s^{alpha_1-1} (-lambda E^{(n)}_{alpha',alpha_1}(s)) (t-s)^{-beta} ds.
inline Eigen::VectorXd caputo_mode_amplitudes(const FracOrders& orders, std::span<const double> lambdas, double beta,
                                              double t, const QuadConfig& q = {}) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("Caputo order must lie in (0,1)");
  if (!(t > 0.0)) throw DomainError("caputo_derivative needs t > 0");
  const auto n_modes = static_cast<Eigen::Index>(lambdas.size());
  auto integrand = [&](double s) {
    auto e = kernel_values(orders, lambdas, s);
    for (std::size_t n = 0; n < e.size(); ++n) e[n] *= -lambdas[n];
    return e;
  };
  return detail::refined_modal_integral(t, orders.alpha_max(), beta, q, q.grading_for(orders), n_modes, integrand,
                                        "caputo_derivative") *
         rgamma(1.0 - beta);
}

/// d_t^beta u(., t) for the source-free problem.
inline GridFunction caputo_derivative(const Problem& p, double beta, double t, const QuadConfig& q = {}) {
  if (!p.homogeneous()) throw DomainError("caputo_derivative needs a problem without source");
  const auto lambdas = p.lambdas();
  const Eigen::VectorXd d = caputo_mode_amplitudes(p.orders, lambdas, beta, t, q);
  return synthesize(d.cwiseProduct(p.initial_modal()), *p.spectrum);
}

/// Caputo derivative of a scalar f with f'(s) = s^{a-1} g(s), g smooth, a > 0.
inline double caputo_scalar(const std::function<double(double)>& g, double a, double beta, double t, int panels = 16,
                            double grading = 4.0) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("Caputo order must lie in (0,1)");
  const auto rule = singular_product_rule(t, a, beta, panels, grading);
  return rule.apply(g) * rgamma(1.0 - beta);
}

/// Relative residual of sum_j q_j d_t^{alpha_j} u_n + lambda_n u_n = 0 at time t,
/// with every Caputo term evaluated by product quadrature.
inline std::vector<double> mode_equation_residuals(const FracOrders& orders, std::span<const double> lambdas, double t,
                                                   const QuadConfig& q = {}) {
  const auto amp = mode_amplitudes(orders, lambdas, t);
  std::vector<Eigen::VectorXd> terms;
  for (std::size_t j = 0; j < orders.size(); ++j) {
    terms.push_back(orders.q(j) * caputo_mode_amplitudes(orders, lambdas, orders.alpha(j), t, q));
  }
  std::vector<double> res(lambdas.size());
  for (std::size_t n = 0; n < lambdas.size(); ++n) {
    double sum = lambdas[n] * amp[n];
    double scale = std::abs(sum);
    for (const auto& term : terms) {
      sum += term(static_cast<Eigen::Index>(n));
      scale = std::max(scale, std::abs(term(static_cast<Eigen::Index>(n))));
    }
    res[n] = std::abs(sum) / scale;
  }
  return res;
}

}  // namespace mtfrac
