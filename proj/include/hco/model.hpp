#pragma once

#include <array>
#include <complex>
#include <optional>

#include "hco/angles.hpp"

namespace hco {

/// Model parameters of the two-rotator motif.
///
/// gamma sets the excitability of each element (excitable for gamma < 1),
/// d >= 0 is the coupling strength, k > 0 the sigmoid steepness of the
/// synaptic window, alpha the activation onset angle and delta the window
/// duration. alpha is stored reduced to [0, 2*pi); delta must be supplied
/// in [0, 2*pi) and is rejected otherwise.
struct Params {
    double gamma = 0.7;
    double d = 0.0;
    double k = 50.0;
    double alpha = 0.0;
    double delta = 0.0;

    /// Returns a copy with alpha reduced mod 2*pi. Throws
    /// std::invalid_argument on out-of-range delta, non-positive k,
    /// negative d, or non-finite fields.
    Params normalized() const;
};

/// A point on the 2-torus. Wrapped phases live in [0, 2*pi); the optional
/// lifts carry the unwrapped phases (lift mod 2*pi == phi when present).
struct TorusState {
    double phi1 = 0.0;
    double phi2 = 0.0;
    std::optional<double> lift1;
    std::optional<double> lift2;
};

struct FieldValue {
    double dphi1 = 0.0;
    double dphi2 = 0.0;
};

/// 2x2 real matrix, row major.
struct Jacobian2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;
};

enum class ParamAxis { alpha, delta, d };

/// Synaptic window function I(phi) = 1 / (1 + exp(k (cos(delta/2) -
/// cos(phi - alpha - delta/2)))). Overflow safe; the result is clamped to
/// the open interval (0, 1) so downstream sign arguments stay valid even
/// when the exponential saturates (k up to 1e4).
double eval_coupling(double phi, const Params& p);

/// dI/dphi = -k sin(phi - alpha - delta/2) I (1 - I).
double eval_coupling_derivative(double phi, const Params& p);

/// Evaluates I and dI/dphi together (one exp, one sincos).
void coupling_value_slope(double phi, const Params& p, double& value, double& slope);

FieldValue vector_field(const TorusState& s, const Params& p);

/// Analytic linearization [[-cos phi1, d I'(phi2)], [d I'(phi1), -cos phi2]].
Jacobian2 jacobian(const TorusState& s, const Params& p);

/// Eigenvalues of a 2x2 matrix, sorted by real part.
std::array<std::complex<double>, 2> eigenvalues(const Jacobian2& j);

/// The parameter image alpha -> (pi - alpha - delta) mod 2*pi under the
/// state/time mirror (phi -> pi - phi, t -> -t).
Params parameter_mirror(const Params& p);

/// Norm of DR F(R(s)) + F(s) with R(x, y) = (pi - y, pi - x). Vanishes for
/// all s exactly when the system is reversible (delta = pi - 2 alpha or
/// delta = 3 pi - 2 alpha, mod 2*pi).
double reversibility_defect(const TorusState& s, const Params& p);

inline TorusState swapped(const TorusState& s) {
    return TorusState{s.phi2, s.phi1, s.lift2, s.lift1};
}

inline double apply_axis(const Params& p, ParamAxis axis) {
    switch (axis) {
        case ParamAxis::alpha: return p.alpha;
        case ParamAxis::delta: return p.delta;
        default: return p.d;
    }
}

inline Params with_axis(Params p, ParamAxis axis, double value) {
    switch (axis) {
        case ParamAxis::alpha: p.alpha = reduce_angle(value); break;
        case ParamAxis::delta: p.delta = value; break;
        case ParamAxis::d: p.d = value; break;
    }
    return p;
}

} // namespace hco
