#pragma once

// Dirichlet eigensystem of -(d/dx(D d/dx) + c) on an interval, discretized by
// the conservative three-point scheme on a uniform grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtfrac/error.hpp"

namespace mtfrac {

/// Interior-node values; the Dirichlet boundary values are implicitly zero.
using GridFunction = Eigen::VectorXd;

struct Interval {
  double left = 0.0;
  double right = std::numbers::pi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A coefficient profile on the interval: the named built-ins plus tabulated samples.
struct Profile {
  enum class Kind { Constant, Linear, Sinusoidal, Tabulated };

  Kind kind = Kind::Constant;
  double value = 1.0;       // constant value; linear value at the left end; sinusoidal base
  double value_right = 1.0; // linear value at the right end
  double amplitude = 0.0;   // sinusoidal: base + amplitude sin(wavenumber pi (x - left)/(right - left))
  double wavenumber = 1.0;
  std::vector<double> samples;  // tabulated: equispaced over [left, right], linear interpolation

  static Profile constant(double v) {
    Profile p;
    p.value = v;
    return p;
  }
  static Profile linear(double left_value, double right_value) {
    Profile p;
    p.kind = Kind::Linear;
    p.value = left_value;
    p.value_right = right_value;
    return p;
  }
  static Profile sinusoidal(double base, double amplitude, double wavenumber) {
    Profile p;
    p.kind = Kind::Sinusoidal;
    p.value = base;
    p.amplitude = amplitude;
    p.wavenumber = wavenumber;
    return p;
  }
  static Profile tabulated(std::vector<double> samples) {
    if (samples.size() < 2) throw DomainError("tabulated profile needs at least 2 samples");
    Profile p;
    p.kind = Kind::Tabulated;
    p.samples = std::move(samples);
    return p;
  }

  double operator()(double x, const Interval& iv) const {
    const double s = (x - iv.left) / (iv.right - iv.left);  // in [0, 1]
    switch (kind) {
      case Kind::Constant:
        return value;
      case Kind::Linear:
        return value + (value_right - value) * s;
      case Kind::Sinusoidal:
        return value + amplitude * std::sin(wavenumber * std::numbers::pi * s);
      case Kind::Tabulated: {
        const double pos = std::clamp(s, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
        const auto i = std::min(static_cast<std::size_t>(pos), samples.size() - 2);
        const double w = pos - static_cast<double>(i);
        return (1.0 - w) * samples[i] + w * samples[i + 1];
      }
    }
    return value;
  }

  const char* name() const {
    switch (kind) {
      case Kind::Constant: return "constant";
      case Kind::Linear: return "linear";
      case Kind::Sinusoidal: return "sinusoidal";
      case Kind::Tabulated: return "tabulated";
    }
    return "constant";
  }
};

/// Symmetric operator -(d/dx(D d/dx) + c) with homogeneous Dirichlet conditions.
/// D is sampled at all N + 2 grid nodes (boundaries included), c at the N interior nodes.
class Operator1D {
 public:
  Operator1D(Interval interval, int n_interior, std::vector<double> diffusion_nodes,
             std::vector<double> potential)
      : interval_(interval),
        n_(n_interior),
        diffusion_(std::move(diffusion_nodes)),
        potential_(std::move(potential)) {
    if (!(interval_.right > interval_.left)) throw DomainError("interval must satisfy left < right");
    if (n_ < 1) throw DomainError("n_interior must be positive");
    if (diffusion_.size() != static_cast<std::size_t>(n_) + 2) {
      throw DomainError("diffusion needs n_interior + 2 node samples");
    }
    if (potential_.size() != static_cast<std::size_t>(n_)) {
      throw DomainError("potential needs n_interior samples");
    }
    for (double d : diffusion_) {
      if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("diffusion must be positive at every grid node");
    }
    for (double c : potential_) {
      if (!(c <= 0.0) || !std::isfinite(c)) throw DomainError("potential must be <= 0 at every grid node");
    }
  }

  static Operator1D from_profiles(Interval interval, int n_interior, const Profile& diffusion,
                                  const Profile& potential) {
    if (n_interior < 1) throw DomainError("n_interior must be positive");
    const double h = (interval.right - interval.left) / (n_interior + 1);
    std::vector<double> d(static_cast<std::size_t>(n_interior) + 2);
    std::vector<double> c(static_cast<std::size_t>(n_interior));
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = diffusion(interval.left + h * static_cast<double>(i), interval);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = potential(interval.left + h * static_cast<double>(i + 1), interval);
    return Operator1D(interval, n_interior, std::move(d), std::move(c));
  }

  /// -u'' on (0, pi).
  static Operator1D laplacian(int n_interior = 255) {
    return from_profiles(Interval{}, n_interior, Profile::constant(1.0), Profile::constant(0.0));
  }

  const Interval& interval() const noexcept { return interval_; }
  int n_interior() const noexcept { return n_; }
  double h() const noexcept { return (interval_.right - interval_.left) / (n_ + 1); }
  /// Interior node i (0-based) sits at left + (i + 1) h.
  double x(int i) const noexcept { return interval_.left + h() * (i + 1); }
  const std::vector<double>& diffusion_nodes() const noexcept { return diffusion_; }
  const std::vector<double>& potential() const noexcept { return potential_; }

  /// D_{i+1/2} = (D_i + D_{i+1})/2 for node index i = 0..N (N + 1 half nodes).
  double diffusion_half(std::size_t i) const { return 0.5 * (diffusion_[i] + diffusion_[i + 1]); }

  /// Grid version of the C^1 norm: sup|D| + sup of one-sided difference quotients.
  static double c1_distance(const Operator1D& a, const Operator1D& b) {
    if (a.diffusion_.size() != b.diffusion_.size()) throw DomainError("operators live on different grids");
    double sup = 0.0;
    double dsup = 0.0;
    const double h = a.h();
    for (std::size_t i = 0; i < a.diffusion_.size(); ++i) {
      const double e = a.diffusion_[i] - b.diffusion_[i];
      sup = std::max(sup, std::abs(e));
      if (i + 1 < a.diffusion_.size()) {
        const double e1 = a.diffusion_[i + 1] - b.diffusion_[i + 1];
        dsup = std::max(dsup, std::abs(e1 - e) / h);
      }
    }
    return sup + dsup;
  }

  /// Interior node coordinates.
  std::vector<double> grid() const {
    std::vector<double> g(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) g[static_cast<std::size_t>(i)] = x(i);
    return g;
  }

  /// Sample f at the interior nodes.
  GridFunction sample(const std::function<double(double)>& f) const {
    GridFunction v(n_);
    for (int i = 0; i < n_; ++i) v(i) = f(x(i));
    return v;
  }

 private:
  Interval interval_;
  int n_;
  std::vector<double> diffusion_;
  std::vector<double> potential_;
};

struct SymTridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;  // off(i) couples i and i + 1

  Eigen::Index size() const noexcept { return diag.size(); }

  GridFunction apply(const GridFunction& v) const {
    if (v.size() != diag.size()) throw DomainError("dimension mismatch in tridiagonal product");
    GridFunction out = diag.cwiseProduct(v);
    const Eigen::Index n = diag.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      out(i) += off(i) * v(i + 1);
      out(i + 1) += off(i) * v(i);
    }
    return out;
  }

  Eigen::MatrixXd dense() const {
    const Eigen::Index n = diag.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, i) = diag(i);
      if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = off(i);
    }
    return a;
  }
};

/// diag_i = (D_{i-1/2} + D_{i+1/2})/h^2 - c_i,  off_i = -D_{i+1/2}/h^2.
inline SymTridiagonal assemble(const Operator1D& op) {
  const int n = op.n_interior();
  const double h2 = op.h() * op.h();
  SymTridiagonal a;
  a.diag.resize(n);
  a.off.resize(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    // interior node i is grid node i + 1; its half nodes are k and k + 1
    a.diag(i) = (op.diffusion_half(k) + op.diffusion_half(k + 1)) / h2 - op.potential()[k];
    if (i + 1 < n) a.off(i) = -op.diffusion_half(k + 1) / h2;
  }
  return a;
}

/// Eigenpairs {lambda_n, phi_n}, orthonormal in (u, v)_h = h sum u_i v_i.
struct Spectrum {
  Eigen::VectorXd lambdas;  // ascending
  Eigen::MatrixXd eigvecs;  // column n is phi_n
  double h = 1.0;

  Eigen::Index n_modes() const noexcept { return lambdas.size(); }
  Eigen::Index n_points() const noexcept { return eigvecs.rows(); }
  GridFunction mode(Eigen::Index n) const { return eigvecs.col(n); }
  std::vector<double> lambda_list() const { return {lambdas.data(), lambdas.data() + lambdas.size()}; }
};

/// Full symmetric tridiagonal eigendecomposition (library: Eigen).
inline Spectrum eigendecompose(const SymTridiagonal& a, double h) {
  if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(a.diag, a.off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw ConvergenceError("tridiagonal eigensolver did not converge");
  Spectrum s;
  s.h = h;
  s.lambdas = solver.eigenvalues();
  s.eigvecs = solver.eigenvectors() / std::sqrt(h);
  for (Eigen::Index n = 0; n < s.eigvecs.cols(); ++n) {
    auto col = s.eigvecs.col(n);
    const double scale = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > 1e-8 * scale) {
        if (col(i) < 0.0) col *= -1.0;
        break;
      }
    }
  }
  return s;
}

inline Spectrum eigendecompose(const Operator1D& op) { return eigendecompose(assemble(op), op.h()); }

namespace detail {
inline void check_points(const GridFunction& f, const Spectrum& s) {
  if (f.size() != s.n_points()) throw DomainError("grid function length does not match the spectrum");
}
}  // namespace detail

/// a_n = (f, phi_n)_h.
inline Eigen::VectorXd project(const GridFunction& f, const Spectrum& s) {
  detail::check_points(f, s);
  return s.h * (s.eigvecs.transpose() * f);
}

/// sum_n a_n phi_n over the leading coeffs.size() modes.
inline GridFunction synthesize(const Eigen::VectorXd& coeffs, const Spectrum& s) {
  if (coeffs.size() > s.n_modes()) throw DomainError("more coefficients than modes");
  return s.eigvecs.leftCols(coeffs.size()) * coeffs;
}

/// (sum_n |lambda_n^gamma a_n|^2)^{1/2} from modal coefficients.
inline double frac_norm_modal(const Eigen::VectorXd& coeffs, double gamma, const Spectrum& s) {
  if (coeffs.size() > s.n_modes()) throw DomainError("more coefficients than modes");
  double sum = 0.0;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) {
    const double v = std::pow(s.lambdas(n), gamma) * coeffs(n);
    sum += v * v;
  }
  return std::sqrt(sum);
}

/// Norm of D((-L)^gamma), gamma in [-1, 1].
inline double frac_norm(const GridFunction& f, double gamma, const Spectrum& s) {
  if (!(gamma >= -1.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [-1, 1]");
  return frac_norm_modal(project(f, s), gamma, s);
}

/// Discrete L^2 norm sqrt(h sum f_i^2).
inline double l2_norm(const GridFunction& f, double h) { return std::sqrt(h * f.squaredNorm()); }

/// (-L)^{-1} f = sum (a_n / lambda_n) phi_n.
inline GridFunction apply_inverse(const GridFunction& f, const Spectrum& s) {
  const Eigen::VectorXd a = project(f, s);
  return synthesize(a.cwiseQuotient(s.lambdas), s);
}

/// sum D_{i+1/2} (f_{i+1} - f_i)^2 / h - h sum c_i f_i^2 with f = 0 at the boundary.
inline double dirichlet_energy(const Operator1D& op, const GridFunction& f) {
  const int n = op.n_interior();
  if (f.size() != n) throw DomainError("grid function length does not match the operator");
  const double h = op.h();
  double e = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double left = i == 0 ? 0.0 : f(i - 1);
    const double right = i == n ? 0.0 : f(i);
    e += op.diffusion_half(static_cast<std::size_t>(i)) * (right - left) * (right - left) / h;
  }
  for (int i = 0; i < n; ++i) e -= h * op.potential()[static_cast<std::size_t>(i)] * f(i) * f(i);
  return e;
}

}  // namespace mtfrac
