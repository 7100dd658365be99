#pragma once

#include <array>
#include <cstddef>
#include <cmath>
#include <limits>
#include <numbers>

namespace mtfrac {

namespace detail {

// Lanczos approximation with g = 7 and nine coefficients.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_sum(double xm1) {
  double a = kLanczosCoef[0];
  for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) {
    a += kLanczosCoef[i] / (xm1 + static_cast<double>(i));
  }
  return a;
}

}  // namespace detail

/// Location and value of the minimum of Gamma on the positive axis.
inline constexpr double kGammaArgMin = 1.4616321449683623;
inline constexpr double kGammaMin = 0.88560319441088870;

/// Gamma(x) for real x, accurate to about 1e-15 relative away from the poles.
inline double gamma_fn(double x) {
  if (x < 0.5) {
    const double s = std::sin(std::numbers::pi * x);
    if (s == 0.0) return std::numeric_limits<double>::infinity();
    return std::numbers::pi / (s * gamma_fn(1.0 - x));
  }
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  const double xm1 = x - 1.0;
  const double t = xm1 + detail::kLanczosG + 0.5;
  // t^(x-1/2) split in two factors so that x near 171 does not overflow early.
  const double half = std::pow(t, 0.5 * (xm1 + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) *
         detail::lanczos_sum(xm1);
}

/// log|Gamma(x)| for x > 0.
inline double lgamma_fn(double x) {
  if (x < 0.5) {
    return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) -
           lgamma_fn(1.0 - x);
  }
  const double xm1 = x - 1.0;
  const double t = xm1 + detail::kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t +
         std::log(detail::lanczos_sum(xm1));
}

/// 1/Gamma(x); exactly zero at the poles x = 0, -1, -2, ...
inline double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x > 170.0) return std::exp(-lgamma_fn(x));
  return 1.0 / gamma_fn(x);
}

/// 1/Gamma(x) in extended range: for x > 170 the result is far below the
/// smallest double, so the Lanczos form is evaluated in long double.
inline long double rgamma_ld(double x) {
  if (x <= 170.0) return rgamma(x);
  const long double xm1 = static_cast<long double>(x) - 1.0L;
  const long double t = xm1 + static_cast<long double>(detail::kLanczosG) + 0.5L;
  long double a = detail::kLanczosCoef[0];
  for (std::size_t i = 1; i < detail::kLanczosCoef.size(); ++i) {
    a += detail::kLanczosCoef[i] / (xm1 + static_cast<long double>(i));
  }
  const long double lg = 0.5L * std::log(2.0L * std::numbers::pi_v<long double>) +
                         (xm1 + 0.5L) * std::log(t) - t + std::log(a);
  return std::exp(-lg);
}

}  // namespace mtfrac
