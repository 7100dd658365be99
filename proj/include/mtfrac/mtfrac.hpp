#pragma once

// Umbrella header. oracle.hpp and acceptance.hpp need MPFR at link time and
// are included separately.

#include "mtfrac/analysis.hpp"
#include "mtfrac/config.hpp"
#include "mtfrac/error.hpp"
#include "mtfrac/gamma.hpp"
#include "mtfrac/orders.hpp"
#include "mtfrac/quadrature.hpp"
#include "mtfrac/solver.hpp"
#include "mtfrac/specfun.hpp"
#include "mtfrac/spectral.hpp"
#include "mtfrac/tolerances.hpp"

namespace mtfrac {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mtfrac
