#pragma once

#include <cmath>

#include <quadmath.h>

namespace finecalc {

/// IEEE binary128. Finite-difference checks of fifth-order stencils run in
/// this type; in double the roundoff term eps/h^5 swamps the O(h^2) signal.
using quad = __float128;

inline double sqrt_of(double x) { return std::sqrt(x); }
inline long double sqrt_of(long double x) { return std::sqrt(x); }
inline quad sqrt_of(quad x) { return sqrtq(x); }

inline double abs_of(double x) { return std::fabs(x); }
inline long double abs_of(long double x) { return std::fabs(x); }
inline quad abs_of(quad x) { return fabsq(x); }

}  // namespace finecalc
