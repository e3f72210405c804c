#include "hco/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hco/errors.hpp"
#include "hco/quadrature.hpp"

namespace hco {

namespace {

constexpr double fixed_point_tol = 1e-9; // return-map convergence in phi2
constexpr double rest_speed = 1e-8;      // endpoint speed counting as an equilibrium
constexpr int n_resample = 2048;         // uniform samples per period

double diag_field(double phi, const Params& p) {
    return p.gamma - std::sin(phi) + p.d * eval_coupling(phi, p);
}

// 4-point Gauss-Legendre on [0, 1].
const double gx[4] = {0.069431844202974, 0.330009478207572, 0.669990521792428,
                      0.930568155797026};
const double gw[4] = {0.173927422568727, 0.326072577431273, 0.326072577431273,
                      0.173927422568727};

} // namespace

void crossings_in_step(const StepView& v, int comp, std::vector<SectionCrossing>& out) {
    const double y0 = v.y0[comp], y1 = v.y1[comp];
    const double lo = std::min(y0, y1), hi = std::max(y0, y1);
    const long n0 = static_cast<long>(std::ceil((lo - pi) / two_pi));
    for (long n = n0; pi + two_pi * static_cast<double>(n) <= hi; ++n) {
        const double level = pi + two_pi * static_cast<double>(n);
        // phi' > 0 at the level, so each level is crossed at most once and
        // only upward: a strict endpoint sign change is the full story.
        if (!(y0 < level && level <= y1)) continue;
        double ta = 0.0, tb = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double tm = 0.5 * (ta + tb);
            if (v.eval(tm)[comp] < level) ta = tm; else tb = tm;
        }
        const double th = 0.5 * (ta + tb);
        SectionCrossing c;
        c.t = v.t0 + th * v.h;
        c.lift = v.eval(th);
        c.other = reduce_angle(c.lift[1 - comp]);
        out.push_back(c);
    }
}

namespace {

// One application of the section return map: (pi, y) -> (pi, P(y)) with the
// return time as a byproduct. NaN when the orbit leaves the map's domain.
std::pair<double, double> apply_return_map(double y, const Params& p,
                                           const IntegratorSettings& set) {
    const TorusState s{pi, reduce_angle(y), pi, reduce_angle(y)};
    double val = std::numeric_limits<double>::quiet_NaN();
    double when = std::numeric_limits<double>::quiet_NaN();
    std::vector<SectionCrossing> tmp;
    integrate_steps(s, p, set, set.t_max, [&](const StepView& v) {
        tmp.clear();
        crossings_in_step(v, 0, tmp);
        for (const SectionCrossing& c : tmp) {
            if (c.t < 1e-9) continue;
            val = c.other;
            when = c.t;
            return false;
        }
        return std::hypot(v.f1[0], v.f1[1]) >= rest_speed;
    });
    return {val, when};
}

} // namespace

RunOutcome run_to_attractor(const TorusState& s0, const Params& p,
                            const IntegratorSettings& set, const RunOptions& opt) {
    RunOutcome res;
    std::vector<std::pair<double, double>> crossings; // (t, wrapped phi2)
    std::vector<SectionCrossing> tmp;
    int stall = 0;
    bool armed = true;
    double ref_t = -1.0;
    std::array<double, 2> ref_y{};
    double last_aitken = std::numeric_limits<double>::quiet_NaN();
    bool done = false;

    integrate_steps(s0, p, set, set.t_max, [&](const StepView& v) {
        const double t1 = v.t0 + v.h;

        tmp.clear();
        crossings_in_step(v, 0, tmp);
        for (const SectionCrossing& c : tmp) {
            const double y = c.other;
            if (opt.known_cycles) {
                for (std::size_t i = 0; i < opt.known_cycles->size(); ++i) {
                    const LimitCycle& kc = (*opt.known_cycles)[i];
                    if (kc.section_count > 0 && circ_dist(y, kc.section_phi2) < opt.proximity) {
                        res.kind = RunOutcome::Kind::known_cycle;
                        res.known_index = static_cast<int>(i);
                        res.t_used = c.t;
                        done = true;
                        return false;
                    }
                }
            }
            crossings.emplace_back(c.t, y);
            const std::size_t n = crossings.size() - 1;
            if (c.t > set.t_transient) {
                for (std::size_t m = 1; m <= 4 && m <= n; ++m) {
                    if (circ_dist(crossings[n].second, crossings[n - m].second) < fixed_point_tol) {
                        const double T = crossings[n].first - crossings[n - m].first;
                        if (T > 1e-6) {
                            res.kind = RunOutcome::Kind::cycle;
                            res.y_star = crossings[n].second;
                            res.period = T;
                            res.m = static_cast<int>(m);
                            res.t_used = c.t;
                            done = true;
                            return false;
                        }
                    }
                }
                // Near-neutral cycles contract by a hair per lap; Aitken
                // extrapolation of the crossing sequence jumps to the fixed
                // point, which is then verified by one return-map residual.
                if (n >= 2) {
                    const double d1 = wrap_signed(crossings[n - 1].second -
                                                  crossings[n - 2].second);
                    const double d2 = wrap_signed(crossings[n].second -
                                                  crossings[n - 1].second);
                    const double r = d1 != 0.0 ? d2 / d1 : 2.0;
                    const double corr = d2 * r / (1.0 - r);
                    if (std::abs(d2) < 1e-3 && std::abs(r) < 0.9995 && std::abs(corr) < 0.5) {
                        const double y_inf = reduce_angle(crossings[n].second + corr);
                        if (!(std::abs(wrap_signed(y_inf - last_aitken)) < 1e-10)) {
                            last_aitken = y_inf;
                            const auto [py, pt] = apply_return_map(y_inf, p, set);
                            if (std::isfinite(py) && circ_dist(py, y_inf) < fixed_point_tol) {
                                res.kind = RunOutcome::Kind::cycle;
                                res.y_star = py;
                                res.period = pt;
                                res.m = 1;
                                res.t_used = c.t;
                                done = true;
                                return false;
                            }
                        }
                    }
                }
            }
        }

        const double speed = std::hypot(v.f1[0], v.f1[1]);

        if (opt.known_equilibria && speed < 0.05) {
            const double w1 = reduce_angle(v.y1[0]), w2 = reduce_angle(v.y1[1]);
            for (std::size_t i = 0; i < opt.known_equilibria->size(); ++i) {
                const Equilibrium& e = (*opt.known_equilibria)[i];
                if (!stable_kind(e.kind)) continue;
                if (torus_dist(w1, w2, e.state.phi1, e.state.phi2) < opt.proximity) {
                    res.kind = RunOutcome::Kind::known_equilibrium;
                    res.known_index = static_cast<int>(i);
                    res.endpoint = e.state;
                    res.t_used = t1;
                    done = true;
                    return false;
                }
            }
        }

        if (speed < rest_speed) {
            if (armed && ++stall >= 3) {
                const TorusState here{reduce_angle(v.y1[0]), reduce_angle(v.y1[1]), {}, {}};
                auto root = refine_equilibrium(here, p);
                if (root && torus_dist(root->phi1, root->phi2, here.phi1, here.phi2) < 1e-3) {
                    const Equilibrium cls =
                        classify_equilibrium(Equilibrium{*root, {}, EqKind::non_hyperbolic,
                                                         EqType::diagonal, 0.0}, p);
                    const bool genuine = stable_kind(cls.kind) || cls.kind == EqKind::non_hyperbolic ||
                                         torus_dist(root->phi1, root->phi2, here.phi1, here.phi2) < 1e-6;
                    if (genuine) {
                        res.kind = RunOutcome::Kind::equilibrium;
                        res.endpoint = *root;
                        res.t_used = t1;
                        done = true;
                        return false;
                    }
                }
                // Slow passage near a saddle, not convergence: re-arm only
                // after the trajectory speeds up again.
                armed = false;
                stall = 0;
            }
        } else {
            stall = 0;
            if (speed > 1e-6) armed = true;
        }

        // Recurrence fallback for orbits that never meet the section.
        if (crossings.empty() && t1 > 100.0) {
            if (ref_t < 0.0 || t1 - ref_t > 100.0) {
                ref_t = t1;
                ref_y = v.y1;
            } else if (t1 - ref_t > 0.5 &&
                       torus_dist(reduce_angle(v.y1[0]), reduce_angle(v.y1[1]),
                                  reduce_angle(ref_y[0]), reduce_angle(ref_y[1])) < 1e-5) {
                res.kind = RunOutcome::Kind::cycle;
                res.via_recurrence = true;
                res.period = t1 - ref_t;
                res.endpoint = TorusState{reduce_angle(ref_y[0]), reduce_angle(ref_y[1]),
                                          ref_y[0], ref_y[1]};
                res.t_used = t1;
                done = true;
                return false;
            }
        }
        return true;
    });

    if (!done) {
        res.kind = RunOutcome::Kind::undecided;
        res.t_used = set.t_max;
    }
    return res;
}

namespace {

LimitCycle realize_common(const Params& p, const IntegratorSettings& set,
                          const TorusState& start, double period, double y_star,
                          int m_crossings) {
    LimitCycle c;
    c.period = period;
    c.section_phi2 = y_star;
    c.section_count = m_crossings;

    const std::array<double, 2> lift0{start.lift1.value_or(start.phi1),
                                      start.lift2.value_or(start.phi2)};
    c.samples.assign(n_resample + 1, TorusState{});
    std::size_t si = 0;
    double q = 0.0;
    std::array<double, 2> lift_end = lift0;

    integrate_steps(start, p, set, period, [&](const StepView& v) {
        const double t1 = v.t0 + v.h;
        while (si <= static_cast<std::size_t>(n_resample)) {
            const double ts = period * static_cast<double>(si) / n_resample;
            if (ts > t1 + 1e-13) break;
            const double th = v.h > 0.0 ? std::min(1.0, std::max(0.0, (ts - v.t0) / v.h)) : 0.0;
            const auto l = v.eval(th);
            c.samples[si] = TorusState{reduce_angle(l[0]), reduce_angle(l[1]), l[0], l[1]};
            ++si;
        }
        for (int g = 0; g < 4; ++g) {
            const auto l = v.eval(gx[g]);
            q += v.h * gw[g] * (-std::cos(l[0]) - std::cos(l[1]));
        }
        lift_end = v.y1;
        return true;
    });
    while (si <= static_cast<std::size_t>(n_resample)) {
        c.samples[si] = TorusState{reduce_angle(lift_end[0]), reduce_angle(lift_end[1]),
                                   lift_end[0], lift_end[1]};
        ++si;
    }

    c.closure = torus_dist(c.samples.front().phi1, c.samples.front().phi2,
                           c.samples.back().phi1, c.samples.back().phi2);
    c.winding = {static_cast<int>(std::lround((lift_end[0] - lift0[0]) / two_pi)),
                 static_cast<int>(std::lround((lift_end[1] - lift0[1]) / two_pi))};
    c.samples.pop_back(); // keep one period, endpoint duplicates sample 0
    c.phase_class = classify_cycle(c);
    c.floquet_trace = std::exp(q);
    return c;
}

} // namespace

LimitCycle realize_cycle(const Params& p, const IntegratorSettings& set, double y_star,
                         int m_crossings) {
    const TorusState start{pi, reduce_angle(y_star), pi, reduce_angle(y_star)};
    // Measure the period as the time of the m-th section return.
    int count = 0;
    double T = -1.0;
    std::vector<SectionCrossing> tmp;
    integrate_steps(start, p, set, set.t_max, [&](const StepView& v) {
        tmp.clear();
        crossings_in_step(v, 0, tmp);
        for (const SectionCrossing& c : tmp) {
            if (c.t < 1e-9) continue;
            if (++count == m_crossings) {
                T = c.t;
                return false;
            }
        }
        return true;
    });
    if (T <= 0.0)
        throw std::runtime_error("realize_cycle: orbit did not return to the section");

    LimitCycle c = realize_common(p, set, start, T, reduce_angle(y_star), m_crossings);
    c.floquet = floquet_multiplier(c, p, set);
    c.stable = c.floquet < 1.0 - 1e-6;
    c.neutral = std::abs(c.floquet - 1.0) <= 1e-6;
    return c;
}

LimitCycle realize_cycle_from_state(const Params& p, const IntegratorSettings& set,
                                    const TorusState& start, double period) {
    LimitCycle c = realize_common(p, set, start, period,
                                  std::numeric_limits<double>::quiet_NaN(), 0);
    c.floquet = c.floquet_trace;
    c.stable = c.floquet < 1.0 - 1e-6;
    c.neutral = std::abs(c.floquet - 1.0) <= 1e-6;
    return c;
}

PhaseClass classify_cycle(const LimitCycle& c) {
    const std::size_t n = c.samples.size();
    if (n < 8) return PhaseClass::other;
    double worst_in = 0.0, worst_anti = 0.0;
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        worst_in = std::max(worst_in, circ_dist(c.samples[i].phi1, c.samples[i].phi2));
        worst_anti = std::max(worst_anti,
                              circ_dist(c.samples[i].phi1, c.samples[(i + half) % n].phi2));
    }
    if (worst_in < 1e-3) return PhaseClass::in_phase;
    if (worst_anti < 1e-3) return PhaseClass::anti_phase;
    return PhaseClass::other;
}

double floquet_multiplier(const LimitCycle& c, const Params& p, const IntegratorSettings& set,
                          double offset) {
    if (c.section_count <= 0) return c.floquet_trace; // recurrence-built cycle
    auto return_map = [&](double y) {
        const TorusState s{pi, reduce_angle(y), pi, reduce_angle(y)};
        int count = 0;
        double val = std::numeric_limits<double>::quiet_NaN();
        std::vector<SectionCrossing> tmp;
        integrate_steps(s, p, set, set.t_max, [&](const StepView& v) {
            tmp.clear();
            crossings_in_step(v, 0, tmp);
            for (const SectionCrossing& cr : tmp) {
                if (cr.t < 1e-9) continue;
                if (++count == c.section_count) {
                    val = cr.other;
                    return false;
                }
            }
            return true;
        });
        return val;
    };
    const double yp = return_map(c.section_phi2 + offset);
    const double ym = return_map(c.section_phi2 - offset);
    if (!std::isfinite(yp) || !std::isfinite(ym))
        throw std::runtime_error("floquet_multiplier: perturbed orbit lost the section");
    return wrap_signed(yp - ym) / (2.0 * offset);
}

CycleDetection detect_cycle(const TorusState& s0, const Params& p,
                            const IntegratorSettings& set) {
    CycleDetection det;
    const RunOutcome run = run_to_attractor(s0, p, set);
    det.t_used = run.t_used;
    switch (run.kind) {
        case RunOutcome::Kind::cycle: {
            det.cycle = run.via_recurrence
                            ? realize_cycle_from_state(p, set, run.endpoint, run.period)
                            : realize_cycle(p, set, run.y_star, run.m);
            det.outcome = DetectOutcome::cycle;
            break;
        }
        case RunOutcome::Kind::equilibrium:
        case RunOutcome::Kind::known_equilibrium:
            det.outcome = DetectOutcome::equilibrium;
            det.endpoint = run.endpoint;
            break;
        default:
            det.outcome = DetectOutcome::undecided;
            break;
    }
    return det;
}

std::optional<LimitCycle> find_inphase_cycle(const Params& p_in, const IntegratorSettings& set) {
    const Params p = p_in.normalized();
    const int n = 2048;
    double prev = diag_field(0.0, p);
    for (int i = 1; i <= n; ++i) {
        const double cur = diag_field(i * two_pi / n, p);
        if (prev == 0.0 || (prev < 0.0) != (cur < 0.0)) return std::nullopt;
        prev = cur;
    }
    // No diagonal rest states: the diagonal itself is the in-phase cycle.
    LimitCycle c = realize_cycle(p, set, pi, 1);
    return c;
}

std::optional<LimitCycle> find_antiphase_cycle(const Params& p_in,
                                               const IntegratorSettings& set) {
    const Params p = p_in.normalized();

    // Half-return map: flow from (pi, y) to the first upward crossing of
    // phi2 = pi and read phi1 there. An anti-phase cycle is a fixed point
    // y* (it runs (pi, y*) -> (y*, pi) in half a period, by the swap
    // symmetry), stable or not.
    auto half_map = [&](double y) {
        const TorusState s{pi, reduce_angle(y), pi, reduce_angle(y)};
        double val = std::numeric_limits<double>::quiet_NaN();
        int stall = 0;
        std::vector<SectionCrossing> tmp;
        integrate_steps(s, p, set, set.t_max, [&](const StepView& v) {
            tmp.clear();
            crossings_in_step(v, 1, tmp);
            for (const SectionCrossing& c : tmp) {
                if (c.t < 1e-9) continue;
                val = reduce_angle(c.lift[0]);
                return false;
            }
            if (std::hypot(v.f1[0], v.f1[1]) < rest_speed && ++stall >= 3) return false;
            return true;
        });
        return val;
    };
    auto defect = [&](double y) {
        const double hy = half_map(y);
        return std::isfinite(hy) ? wrap_signed(hy - y) : std::numeric_limits<double>::quiet_NaN();
    };

    const int n = 96;
    std::vector<double> ys(n), hs(n);
    for (int i = 0; i < n; ++i) {
        ys[i] = (i + 0.5) * two_pi / n;
        hs[i] = defect(ys[i]);
    }

    std::optional<LimitCycle> best;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        if (!std::isfinite(hs[i]) || !std::isfinite(hs[j])) continue;
        if (hs[i] == 0.0 || (hs[i] < 0.0) == (hs[j] < 0.0)) continue;
        double a = ys[i], b = ys[i] + two_pi / n;
        double ha = hs[i];
        for (int it = 0; it < 40; ++it) {
            const double m = 0.5 * (a + b);
            const double hm = defect(m);
            if (!std::isfinite(hm)) { a = b; break; } // hole in the domain
            if ((ha < 0.0) == (hm < 0.0)) { a = m; ha = hm; } else { b = m; }
        }
        if (b - a > 1e-8) continue;
        const double y_star = 0.5 * (a + b);
        const double hy = defect(y_star);
        if (!std::isfinite(hy) || std::abs(hy) > 1e-7) continue; // jump, not a root
        if (circ_dist(y_star, pi) < 1e-3) continue;              // that's the in-phase point
        LimitCycle c = realize_cycle(p, set, y_star, 1);
        if (c.closure > 1e-6) continue;
        if (!best || (c.phase_class == PhaseClass::anti_phase &&
                      best->phase_class != PhaseClass::anti_phase))
            best = std::move(c);
        if (best && best->phase_class == PhaseClass::anti_phase) break;
    }
    return best;
}

namespace {

// True when sin(phi) attains `level` somewhere on the closed lift arc
// [a, a+len] (zeros of level - sin phi land inside the arc).
bool sine_level_on_arc(double level, double a, double len) {
    if (level > 1.0) return false;
    if (level < -1.0) return false;
    const double z1 = std::asin(level);
    const double z2 = pi - z1;
    return reduce_angle(z1 - a) <= len || reduce_angle(z2 - a) <= len;
}

} // namespace

double antiphase_condition_quadrature(const Params& p_in) {
    const Params p = p_in.normalized();
    if (p.gamma >= 1.0)
        throw std::invalid_argument("antiphase condition: gamma must be below 1");
    const double a = std::asin(p.gamma);
    const double c = p.gamma + p.d;
    if (sine_level_on_arc(c, a, pi - 2.0 * a))
        throw IntegralSingular("antiphase condition: gamma + d - sin(phi) vanishes on the "
                               "excited arc (gamma + d <= 1)");
    if (sine_level_on_arc(p.gamma, p.alpha, p.delta))
        throw IntegralSingular("antiphase condition: gamma - sin(phi) vanishes on the "
                               "activation arc");

    const double lhs = integrate_adaptive(
        [&](double phi) { return 1.0 / (c - std::sin(phi)); }, a, pi - a, 1e-10);
    const double rhs = p.delta == 0.0
                           ? 0.0
                           : integrate_adaptive(
                                 [&](double phi) { return 1.0 / (p.gamma - std::sin(phi)); },
                                 p.alpha, p.alpha + p.delta, 1e-10);
    return lhs - rhs;
}

double antiphase_condition_closed_form(const Params& p_in) {
    const Params p = p_in.normalized();
    if (p.gamma >= 1.0)
        throw std::invalid_argument("antiphase condition: gamma must be below 1");
    const double c = p.gamma + p.d;
    if (c < 1.0)
        throw IntegralSingular("antiphase condition: gamma + d below 1, excited arc singular");
    if (c == 1.0)
        throw BranchInvalid("antiphase condition: gamma + d = 1 is the boundary case, the "
                            "closed-form prefactor diverges");
    if (sine_level_on_arc(p.gamma, p.alpha, p.delta))
        throw IntegralSingular("antiphase condition: gamma - sin(phi) vanishes on the "
                               "activation arc");
    // tan(x/2) must stay continuous across the arc: no odd multiple of pi
    // strictly inside.
    if (p.delta > 0.0 && reduce_angle(pi - p.alpha) < p.delta)
        throw BranchInvalid("antiphase condition: activation arc crosses the tan(phi/2) "
                            "singularity at phi = pi");

    const double A = std::asin(p.gamma);
    const double s = std::sqrt(c * c - 1.0);
    const double lhs = 2.0 / s *
                       (std::atan((1.0 - c * std::tan(0.5 * A)) / s) -
                        std::atan((1.0 - c / std::tan(0.5 * A)) / s));

    const double r = std::sqrt(1.0 - p.gamma * p.gamma);
    auto branch_arg = [&](double x) {
        const double u = (1.0 - p.gamma * std::tan(0.5 * x)) / r;
        if (!(u > -1.0 && u < 1.0))
            throw BranchInvalid("antiphase condition: arctanh argument outside (-1, 1)");
        return u;
    };
    const double rhs = 2.0 / r * (std::atanh(branch_arg(p.alpha + p.delta)) -
                                  std::atanh(branch_arg(p.alpha)));
    return lhs - rhs;
}

std::string to_string(PhaseClass c) {
    switch (c) {
        case PhaseClass::in_phase: return "in-phase";
        case PhaseClass::anti_phase: return "anti-phase";
        default: return "other";
    }
}

} // namespace hco
