#include "hco/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "hco/errors.hpp"

namespace hco {

IntegratorSettings IntegratorSettings::defaults_for(const Params& p) {
    IntegratorSettings s;
    s.max_step = 0.2 / p.k;
    return s;
}

IntegratorSettings IntegratorSettings::sweep_fast(const Params& p) {
    IntegratorSettings s;
    s.rel_tol = 1e-7;
    s.abs_tol = 1e-7;
    s.max_step = 0.2 / p.k;
    s.t_transient = 40.0;
    s.t_max = 2000.0;
    s.wall_aware = true;
    return s;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Error coefficients b5 - b4.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output coefficients (Hairer, Norsett, Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

using Vec2 = std::array<double, 2>;

struct WallLimiter {
    bool active = false;
    double edges[2] = {0.0, 0.0}; // coupling edges alpha, alpha+delta (wrapped)
    double width = 0.0;           // angular half-width of the sigmoid wall
    double crawl = 0.0;           // dense step used inside a wall
    double plateau = 0.0;

    void init(const Params& p, const IntegratorSettings& set) {
        active = set.wall_aware && p.d > 0.0;
        if (!active) return;
        edges[0] = reduce_angle(p.alpha);
        edges[1] = reduce_angle(p.alpha + p.delta);
        const double steep = std::max(0.05, std::abs(std::sin(0.5 * p.delta)));
        width = std::min(0.8, 7.0 / (p.k * steep));
        crawl = 0.2 / p.k;
        plateau = set.max_step_plateau;
    }

    // Largest step that cannot jump past a wall for either phase.
    double allowed(const Vec2& y, const Vec2& f) const {
        double h = plateau;
        for (int i = 0; i < 2; ++i) {
            const double v = f[i];
            if (std::abs(v) < 1e-12) continue;
            const double phi = reduce_angle(y[i]);
            double dist = two_pi;
            for (double e : edges) {
                double fd = v > 0.0 ? reduce_angle(e - phi) : reduce_angle(phi - e);
                dist = std::min(dist, fd);
            }
            if (dist <= width) return crawl; // inside / entering a wall
            h = std::min(h, (dist - width) / std::abs(v));
        }
        return std::max(h, crawl);
    }
};

} // namespace

void integrate_steps(const TorusState& s0, const Params& p, const IntegratorSettings& set,
                     double t_end, const StepCallback& on_step, Direction dir) {
    const Params pp = p.normalized();
    const double sign = dir == Direction::forward ? 1.0 : -1.0;
    auto field = [&pp, sign](const Vec2& y, Vec2& f) {
        const FieldValue v = vector_field(TorusState{y[0], y[1], {}, {}}, pp);
        f[0] = sign * v.dphi1;
        f[1] = sign * v.dphi2;
    };

    WallLimiter wall;
    wall.init(pp, set);

    Vec2 y{s0.lift1.value_or(s0.phi1), s0.lift2.value_or(s0.phi2)};
    Vec2 k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    field(y, k1);

    double t = 0.0;
    double h = std::min(set.max_step, t_end);
    std::array<Vec2, 5> rcont;

    while (t < t_end) {
        double h_cap = set.max_step;
        if (wall.active) h_cap = std::max(set.max_step, wall.allowed(y, k1));
        h = std::min({h, h_cap, t_end - t});
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw StepSizeUnderflow("integrator: step size underflow at t=" + std::to_string(t));

        for (int i = 0; i < 2; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        field(ytmp, k2);
        for (int i = 0; i < 2; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        field(ytmp, k3);
        for (int i = 0; i < 2; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        field(ytmp, k4);
        for (int i = 0; i < 2; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        field(ytmp, k5);
        for (int i = 0; i < 2; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        field(ytmp, k6);
        for (int i = 0; i < 2; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        field(ynew, k7);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = set.abs_tol + set.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(0.5 * err);

        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }

        for (int i = 0; i < 2; ++i) {
            const double dy = ynew[i] - y[i];
            rcont[0][i] = y[i];
            rcont[1][i] = dy;
            rcont[2][i] = h * k1[i] - dy;
            rcont[3][i] = dy - h * k7[i] - rcont[2][i];
            rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                               d6 * k6[i] + d7 * k7[i]);
        }

        StepView view;
        view.t0 = t;
        view.h = h;
        view.y0 = y;
        view.y1 = ynew;
        view.f0 = k1;
        view.f1 = k7;
        view.rcont = &rcont;
        const bool keep_going = on_step(view);

        t += h;
        y = ynew;
        k1 = k7; // FSAL
        if (!keep_going) return;

        const double fac = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)))
                                     : 5.0;
        h *= fac;
    }
}

Trajectory integrate(const TorusState& s0, const Params& p, const IntegratorSettings& set,
                     double t_end, Direction dir) {
    Trajectory tr;
    tr.direction = dir;
    tr.times.push_back(0.0);
    tr.lifts.push_back({s0.lift1.value_or(s0.phi1), s0.lift2.value_or(s0.phi2)});
    {
        const double sign = dir == Direction::forward ? 1.0 : -1.0;
        const FieldValue f = vector_field(s0, p.normalized());
        tr.derivs.push_back({sign * f.dphi1, sign * f.dphi2});
    }
    integrate_steps(s0, p, set, t_end, [&tr](const StepView& v) {
        tr.times.push_back(v.t0 + v.h);
        tr.lifts.push_back(v.y1);
        tr.derivs.push_back(v.f1);
        return true;
    }, dir);

    for (EventKind kind : {EventKind::spike1, EventKind::spike2, EventKind::section}) {
        auto ev = detect_events(tr, kind);
        tr.events.insert(tr.events.end(), ev.begin(), ev.end());
    }
    std::sort(tr.events.begin(), tr.events.end(),
              [](const Event& a, const Event& b) { return a.t < b.t; });
    return tr;
}

TorusState Trajectory::state_at(std::size_t i) const {
    TorusState s;
    s.lift1 = lifts[i][0];
    s.lift2 = lifts[i][1];
    s.phi1 = reduce_angle(lifts[i][0]);
    s.phi2 = reduce_angle(lifts[i][1]);
    return s;
}

namespace {

// Cubic Hermite on one stored interval.
double hermite(double y0, double y1, double f0, double f1, double h, double th) {
    const double t2 = th * th;
    const double t3 = t2 * th;
    return y0 * (2.0 * t3 - 3.0 * t2 + 1.0) + h * f0 * (t3 - 2.0 * t2 + th) +
           y1 * (-2.0 * t3 + 3.0 * t2) + h * f1 * (t3 - t2);
}

double hermite_deriv(double y0, double y1, double f0, double f1, double h, double th) {
    const double t2 = th * th;
    return (y0 * (6.0 * t2 - 6.0 * th) + h * f0 * (3.0 * t2 - 4.0 * th + 1.0) +
            y1 * (-6.0 * t2 + 6.0 * th) + h * f1 * (3.0 * t2 - 2.0 * th)) / h;
}

} // namespace

std::array<double, 2> Trajectory::lifts_at_time(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    if (i + 1 >= times.size()) i = times.size() - 2;
    const double h = times[i + 1] - times[i];
    const double th = (t - times[i]) / h;
    return {hermite(lifts[i][0], lifts[i + 1][0], derivs[i][0], derivs[i + 1][0], h, th),
            hermite(lifts[i][1], lifts[i + 1][1], derivs[i][1], derivs[i + 1][1], h, th)};
}

TorusState Trajectory::state_at_time(double t) const {
    const auto l = lifts_at_time(t);
    return TorusState{reduce_angle(l[0]), reduce_angle(l[1]), l[0], l[1]};
}

std::vector<Event> detect_events(const Trajectory& tr, EventKind kind) {
    std::vector<Event> out;
    if (tr.size() < 2) return out;
    const int comp = kind == EventKind::spike2 ? 1 : 0;
    const int element = kind == EventKind::section ? 0 : comp + 1;

    for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
        const double y0 = tr.lifts[i][comp], y1 = tr.lifts[i + 1][comp];
        const double f0 = tr.derivs[i][comp], f1 = tr.derivs[i + 1][comp];
        const double h = tr.times[i + 1] - tr.times[i];
        const double lo = std::min(y0, y1), hi = std::max(y0, y1);
        // Candidate levels pi + 2*pi*n inside [lo, hi].
        const long n0 = static_cast<long>(std::ceil((lo - pi) / two_pi));
        for (long n = n0; pi + two_pi * static_cast<double>(n) <= hi; ++n) {
            const double level = pi + two_pi * static_cast<double>(n);
            const double g0 = y0 - level, g1 = y1 - level;
            if (g0 == 0.0 && i != 0) continue; // counted at previous interval end
            if (g0 > 0.0 && g1 > 0.0) continue;
            if (g0 < 0.0 && g1 < 0.0) continue;
            // Bisection on the Hermite interpolant, then Newton polish.
            double ta = 0.0, tb = 1.0;
            double ga = g0, gb = g1;
            if (ga > gb) { // orient so g(ta) <= 0 <= g(tb)
                std::swap(ta, tb);
                std::swap(ga, gb);
            }
            double th = 0.5;
            for (int it = 0; it < 60; ++it) {
                th = 0.5 * (ta + tb);
                const double g = hermite(y0, y1, f0, f1, h, th) - level;
                if (g <= 0.0) { ta = th; } else { tb = th; }
                if (std::abs(tb - ta) * h < 1e-12) break;
            }
            for (int it = 0; it < 3; ++it) {
                const double g = hermite(y0, y1, f0, f1, h, th) - level;
                const double dg = hermite_deriv(y0, y1, f0, f1, h, th);
                if (dg == 0.0) break;
                const double step = g / dg / h;
                th -= step;
                th = std::min(1.0, std::max(0.0, th));
            }
            const double dg = hermite_deriv(y0, y1, f0, f1, h, th);
            if (dg <= 0.0) continue; // only upward passages are events
            Event ev;
            ev.t = tr.times[i] + th * h;
            ev.kind = kind;
            ev.element = element;
            const double l1 = hermite(tr.lifts[i][0], tr.lifts[i + 1][0], tr.derivs[i][0],
                                      tr.derivs[i + 1][0], h, th);
            const double l2 = hermite(tr.lifts[i][1], tr.lifts[i + 1][1], tr.derivs[i][1],
                                      tr.derivs[i + 1][1], h, th);
            ev.state = TorusState{reduce_angle(l1), reduce_angle(l2), l1, l2};
            if (!out.empty() && std::abs(out.back().t - ev.t) < 1e-12) continue;
            out.push_back(ev);
        }
    }
    return out;
}

} // namespace hco
