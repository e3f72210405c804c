#include "hco/model.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace hco {

namespace {

// 1/(1+e^x), branch-stable: k = 50 already produces exponents up to +-100.
double logistic_of_negative(double x) {
    if (x > 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

// Clamp to the open unit interval; the exponential saturates for large k.
double clamp_open01(double v) {
    if (v <= 0.0) return DBL_TRUE_MIN;
    if (v >= 1.0) return 1.0 - DBL_EPSILON / 2.0;
    return v;
}

} // namespace

Params Params::normalized() const {
    if (!std::isfinite(gamma) || !std::isfinite(d) || !std::isfinite(k) ||
        !std::isfinite(alpha) || !std::isfinite(delta))
        throw std::invalid_argument("params: all fields must be finite");
    if (!(k > 0.0))
        throw std::invalid_argument("params: k must be positive");
    if (d < 0.0)
        throw std::invalid_argument("params: d must be non-negative");
    if (!(delta >= 0.0 && delta < two_pi))
        throw std::invalid_argument("params: delta must lie in [0, 2*pi)");
    Params q = *this;
    q.alpha = reduce_angle(alpha);
    return q;
}

double eval_coupling(double phi, const Params& p) {
    const double x = p.k * (std::cos(0.5 * p.delta) - std::cos(phi - p.alpha - 0.5 * p.delta));
    return clamp_open01(logistic_of_negative(x));
}

void coupling_value_slope(double phi, const Params& p, double& value, double& slope) {
    const double u = phi - p.alpha - 0.5 * p.delta;
    const double cu = std::cos(u);
    const double su = std::sin(u);
    const double x = p.k * (std::cos(0.5 * p.delta) - cu);
    // value = 1/(1+e^x); value*(1-value) = e^-|x| / (1+e^-|x|)^2
    const double e = std::exp(-std::abs(x));
    const double q = e / ((1.0 + e) * (1.0 + e));
    value = clamp_open01(x > 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + std::exp(x)));
    slope = -p.k * su * q;
}

double eval_coupling_derivative(double phi, const Params& p) {
    double v, s;
    coupling_value_slope(phi, p, v, s);
    return s;
}

FieldValue vector_field(const TorusState& s, const Params& p) {
    return FieldValue{p.gamma - std::sin(s.phi1) + p.d * eval_coupling(s.phi2, p),
                      p.gamma - std::sin(s.phi2) + p.d * eval_coupling(s.phi1, p)};
}

Jacobian2 jacobian(const TorusState& s, const Params& p) {
    return Jacobian2{-std::cos(s.phi1), p.d * eval_coupling_derivative(s.phi2, p),
                     p.d * eval_coupling_derivative(s.phi1, p), -std::cos(s.phi2)};
}

std::array<std::complex<double>, 2> eigenvalues(const Jacobian2& j) {
    const double tr = j.a11 + j.a22;
    const double disc = (j.a11 - j.a22) * (j.a11 - j.a22) + 4.0 * j.a12 * j.a21;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return {std::complex<double>(0.5 * (tr - s), 0.0),
                std::complex<double>(0.5 * (tr + s), 0.0)};
    }
    const double s = std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, -0.5 * s), std::complex<double>(0.5 * tr, 0.5 * s)};
}

Params parameter_mirror(const Params& p) {
    Params q = p;
    q.alpha = reduce_angle(pi - p.alpha - p.delta);
    return q;
}

double reversibility_defect(const TorusState& s, const Params& p) {
    const TorusState rs{reduce_angle(pi - s.phi2), reduce_angle(pi - s.phi1), {}, {}};
    const FieldValue f = vector_field(s, p);
    const FieldValue fr = vector_field(rs, p);
    // DR = [[0,-1],[-1,0]], so DR F(R s) + F(s) = (f1 - fr2, f2 - fr1).
    return std::hypot(f.dphi1 - fr.dphi2, f.dphi2 - fr.dphi1);
}

} // namespace hco
