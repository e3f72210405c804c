#pragma once

#include <functional>

namespace hco {

/// Adaptive Gauss-Kronrod (G7,K15) quadrature of f over [a, b] to the
/// requested absolute error. Subdivides the worst interval first; throws
/// std::runtime_error if the interval budget is exhausted before the error
/// target is met (smooth integrands here never get close).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_intervals = 4000);

} // namespace hco
