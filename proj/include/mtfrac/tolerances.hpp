#pragma once

// Repo-wide numerical tolerances. Every equality threshold used by the
// library, the unit tests and the acceptance suite is defined here.

namespace mtfrac::tol {

/// Exact algebra in floating point (orthonormality, Parseval, round trips).
inline constexpr double kAlgebraic = 1e-10;

/// Cross-checks between two evaluation routes of a special function.
inline constexpr double kSpecialFunction = 1e-8;

/// Residual of the per-mode fractional ODE under quadrature.
inline constexpr double kOdeResidual = 1e-3;

/// Caputo quadrature of a known solution.
inline constexpr double kCaputoResidual = 1e-4;

/// Default absolute tolerance for the multinomial series.
inline constexpr double kSeriesDefault = 1e-14;

/// Relative agreement required between quadrature refinements.
inline constexpr double kQuadratureRefinement = 1e-6;

/// Ray truncation for contour integrals: |exp(zeta^{1/alpha_1})| below this is dropped.
inline constexpr double kContourTailCutoff = 1e-18;

/// Imaginary residue allowed in real-valued special-function results,
/// relative to max(1, |value|), on top of the method's own error estimate.
inline constexpr double kImaginaryResidue = 1e-12;

/// Relative agreement between independent per-mode solvers.
inline constexpr double kTripleAgreement = 1e-3;

}  // namespace mtfrac::tol
