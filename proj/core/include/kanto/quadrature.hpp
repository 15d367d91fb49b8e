#pragma once

#include <functional>

namespace kanto {

using Observable = std::function<double(double)>;

// n-point Gauss-Legendre rule on [a,b], n in [1,8]; exact for polynomials of
// degree <= 2n-1.
double gauss_legendre(const Observable& f, double a, double b, int n);

// Adaptive Simpson on [a,b] to absolute tolerance tol. Throws accuracy_error
// if the recursion bottoms out before the local error estimate meets tol.
double adaptive_simpson(const Observable& f, double a, double b, double tol);

} // namespace kanto
