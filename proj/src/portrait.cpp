#include "hco/portrait.hpp"

#include <algorithm>
#include <cmath>

#include "hco/errors.hpp"

namespace hco {

namespace {

std::array<double, 2> unit_eigenvector(const Jacobian2& j, double lambda) {
    // Rows of (J - lambda I) are left null; pick the better conditioned
    // representation of the kernel.
    const double r1 = std::hypot(j.a12, lambda - j.a11);
    const double r2 = std::hypot(lambda - j.a22, j.a21);
    std::array<double, 2> v{};
    if (r1 >= r2) v = {j.a12, lambda - j.a11};
    else v = {lambda - j.a22, j.a21};
    double n = std::hypot(v[0], v[1]);
    if (n == 0.0) { v = {1.0, 0.0}; n = 1.0; }
    v[0] /= n;
    v[1] /= n;
    if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) { v[0] = -v[0]; v[1] = -v[1]; }
    return v;
}

double diag_field(double phi, const Params& p) {
    return p.gamma - std::sin(phi) + p.d * eval_coupling(phi, p);
}

} // namespace

std::pair<std::array<double, 2>, std::array<double, 2>> saddle_frame(const Equilibrium& saddle,
                                                                     const Params& p) {
    const Jacobian2 j = jacobian(saddle.state, p);
    const auto l = eigenvalues(j);
    // Saddle: l[0] real negative (stable), l[1] real positive (unstable).
    return {unit_eigenvector(j, l[0].real()), unit_eigenvector(j, l[1].real())};
}

std::vector<Separatrix> trace_separatrices(std::size_t saddle_index,
                                           const std::vector<Equilibrium>& eqs, const Params& p,
                                           const IntegratorSettings& set,
                                           const std::vector<LimitCycle>& cycles,
                                           const PortraitOptions& opt) {
    const Equilibrium& saddle = eqs[saddle_index];
    const auto [vs, vu] = saddle_frame(saddle, p);

    std::vector<Separatrix> out;
    struct BranchSpec {
        BranchType type;
        std::array<double, 2> dir;
        Direction time_dir;
    };
    const BranchSpec specs[4] = {
        {BranchType::unstable_plus, {vu[0], vu[1]}, Direction::forward},
        {BranchType::unstable_minus, {-vu[0], -vu[1]}, Direction::forward},
        {BranchType::stable_plus, {vs[0], vs[1]}, Direction::backward},
        {BranchType::stable_minus, {-vs[0], -vs[1]}, Direction::backward},
    };

    std::vector<SectionCrossing> tmp;
    for (const BranchSpec& spec : specs) {
        Separatrix sep;
        sep.origin = saddle_index;
        sep.branch = spec.type;

        const double x0 = saddle.state.phi1 + opt.seed_offset * spec.dir[0];
        const double y0 = saddle.state.phi2 + opt.seed_offset * spec.dir[1];
        TorusState s0{reduce_angle(x0), reduce_angle(y0), x0, y0};

        Trajectory& path = sep.path;
        path.direction = spec.time_dir;
        path.times.push_back(0.0);
        path.lifts.push_back({x0, y0});
        {
            const FieldValue f = vector_field(s0, p);
            const double sg = spec.time_dir == Direction::forward ? 1.0 : -1.0;
            path.derivs.push_back({sg * f.dphi1, sg * f.dphi2});
        }

        bool left_origin = false;
        double last_store = 0.0;
        TerminusKind term = TerminusKind::budget_exhausted;
        int term_index = -1;

        integrate_steps(s0, p, set, set.t_max, [&](const StepView& v) {
            const double t1 = v.t0 + v.h;
            const double w1 = reduce_angle(v.y1[0]), w2 = reduce_angle(v.y1[1]);

            if (!left_origin &&
                torus_dist(w1, w2, saddle.state.phi1, saddle.state.phi2) > 0.05)
                left_origin = true;

            bool stop = false;
            for (std::size_t i = 0; i < eqs.size() && !stop; ++i) {
                if (!left_origin && i == saddle_index) continue;
                if (torus_dist(w1, w2, eqs[i].state.phi1, eqs[i].state.phi2) < opt.proximity) {
                    term = TerminusKind::equilibrium;
                    term_index = static_cast<int>(i);
                    stop = true;
                }
            }
            if (!stop && !cycles.empty()) {
                tmp.clear();
                crossings_in_step(v, 0, tmp);
                for (const SectionCrossing& c : tmp) {
                    for (std::size_t i = 0; i < cycles.size(); ++i) {
                        if (cycles[i].section_count > 0 &&
                            circ_dist(c.other, cycles[i].section_phi2) < opt.proximity) {
                            term = TerminusKind::cycle;
                            term_index = static_cast<int>(i);
                            stop = true;
                            break;
                        }
                    }
                    if (stop) break;
                }
            }

            if (stop || t1 - last_store >= opt.store_dt || t1 >= set.t_max) {
                path.times.push_back(t1);
                path.lifts.push_back(v.y1);
                path.derivs.push_back(v.f1);
                last_store = t1;
            }
            return !stop;
        }, spec.time_dir);

        sep.terminus = term;
        sep.terminus_index = term_index;
        out.push_back(std::move(sep));
    }
    return out;
}

namespace {

// Local saddle frame solve: delta = xi * eu + eta * es.
struct SaddleCoords {
    std::array<double, 2> es, eu;
    double inv_det;
    TorusState center;

    SaddleCoords(const Equilibrium& saddle, const Params& p) : center(saddle.state) {
        const auto frame = saddle_frame(saddle, p);
        es = frame.first;
        eu = frame.second;
        inv_det = 1.0 / (eu[0] * es[1] - es[0] * eu[1]);
    }
    void decompose(double w1, double w2, double& xi, double& eta) const {
        const double d1 = wrap_signed(w1 - center.phi1);
        const double d2 = wrap_signed(w2 - center.phi2);
        xi = (d1 * es[1] - d2 * es[0]) * inv_det;
        eta = (eu[0] * d2 - eu[1] * d1) * inv_det;
    }
};

struct TransversalHit {
    bool found = false;
    double xi = 0.0;
    double side = 0.0; // eta sign of the transversal that was crossed
    double t = 0.0;
};

// First decay of |eta| through r0 near the target: the hyperbolic pass
// crosses the transversal {eta = side * r0} exactly once, whichever side of
// the stable manifold it arrives on, and the xi coordinate there measures
// the miss. gate bounds how far from the saddle a crossing may count.
TransversalHit transversal_hit(const TorusState& s0, Direction dir, const SaddleCoords& frame,
                               double r0, double gate, double want_side, const Params& p,
                               const IntegratorSettings& set,
                               const std::vector<Equilibrium>& eqs, std::size_t skip_a,
                               std::size_t skip_b) {
    TransversalHit hit;
    bool have_prev = false;
    double eta_prev = 0.0;
    bool left_origin = false;

    integrate_steps(s0, p, set, set.t_max, [&](const StepView& v) {
        const double w1 = reduce_angle(v.y1[0]), w2 = reduce_angle(v.y1[1]);
        double xi, eta;
        frame.decompose(w1, w2, xi, eta);

        if (!left_origin && torus_dist(w1, w2, s0.phi1, s0.phi2) > 0.05) left_origin = true;

        if (have_prev) {
            for (double side : {1.0, -1.0}) {
                if (want_side != 0.0 && side != want_side) continue;
                const double ref = side * r0;
                const bool decay_cross = dir == Direction::forward
                                             ? (eta_prev - ref) * side > 0.0 &&
                                                   (eta - ref) * side <= 0.0
                                             : (eta_prev - ref) * side < 0.0 &&
                                                   (eta - ref) * side >= 0.0;
                if (!decay_cross) continue;
                double ta = 0.0, tb = 1.0;
                auto coords_of = [&](double th) {
                    const auto l = v.eval(th);
                    double xx, ee;
                    frame.decompose(reduce_angle(l[0]), reduce_angle(l[1]), xx, ee);
                    return std::make_pair(xx, ee);
                };
                double ea = coords_of(0.0).second - ref;
                for (int it = 0; it < 60; ++it) {
                    const double tm = 0.5 * (ta + tb);
                    const double em = coords_of(tm).second - ref;
                    if ((ea <= 0.0) == (em <= 0.0)) { ta = tm; ea = em; } else { tb = tm; }
                }
                const double th = 0.5 * (ta + tb);
                const double xx = coords_of(th).first;
                if (std::abs(xx) <= gate) {
                    hit.found = true;
                    hit.xi = xx;
                    hit.side = side;
                    hit.t = v.t0 + th * v.h;
                    return false;
                }
            }
        }
        have_prev = true;
        eta_prev = eta;

        if (left_origin) {
            for (std::size_t i = 0; i < eqs.size(); ++i) {
                if (i == skip_a || i == skip_b) continue;
                if (torus_dist(w1, w2, eqs[i].state.phi1, eqs[i].state.phi2) < 1e-6)
                    return false; // settled elsewhere
            }
        }
        return true;
    }, dir);
    return hit;
}

} // namespace

ConnectionGap connection_gap(std::size_t from_index, std::size_t to_index,
                             const std::vector<Equilibrium>& eqs, const Params& p,
                             const IntegratorSettings& set, const PortraitOptions& opt) {
    const Equilibrium& from = eqs[from_index];
    const Equilibrium& to = eqs[to_index];
    const SaddleCoords frame(to, p);
    const auto [fs, fu] = saddle_frame(from, p);
    (void)fs;
    const double r0 = opt.section_radius / 3.0;
    const double gate = 4.0 * opt.section_radius;

    for (double sign : {1.0, -1.0}) {
        const double x0 = from.state.phi1 + sign * opt.seed_offset * fu[0];
        const double y0 = from.state.phi2 + sign * opt.seed_offset * fu[1];
        const TorusState s0{reduce_angle(x0), reduce_angle(y0), x0, y0};

        const TransversalHit branch = transversal_hit(s0, Direction::forward, frame, r0, gate,
                                                      0.0, p, set, eqs, from_index, to_index);
        if (!branch.found) continue;

        // Reference: the target's own local stable manifold crossing of the
        // same transversal (grown in reversed time). Subtracting it removes
        // the curvature offset, so the gap vanishes exactly at a connection.
        const TorusState ws0{
            reduce_angle(to.state.phi1 + branch.side * opt.seed_offset * frame.es[0]),
            reduce_angle(to.state.phi2 + branch.side * opt.seed_offset * frame.es[1]),
            {},
            {}};
        const TransversalHit manifold =
            transversal_hit(ws0, Direction::backward, frame, r0, gate, branch.side, p, set, eqs,
                            to_index, to_index);
        if (!manifold.found)
            throw NoApproach("connection_gap: could not grow the target's stable manifold to "
                             "the transversal");

        ConnectionGap gap;
        gap.from_saddle = from_index;
        gap.to_saddle = to_index;
        gap.signed_gap = branch.xi - manifold.xi;
        gap.t_cross = branch.t;
        return gap;
    }
    throw NoApproach("connection_gap: unstable separatrix never approached the target's stable "
                     "manifold");
}

namespace {

std::pair<std::size_t, std::size_t> select_pair(const std::vector<Equilibrium>& eqs,
                                                const Params& p, SaddlePair which) {
    std::vector<std::size_t> diag, offdiag;
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        if (eqs[i].kind != EqKind::saddle) continue;
        (eqs[i].etype == EqType::diagonal ? diag : offdiag).push_back(i);
    }
    // A diagonal saddle whose unstable eigenvector points along the diagonal
    // only emits the permanent on-diagonal connection; the forming
    // connections leave transversally.
    auto transverse_unstable = [&](std::size_t i) {
        const auto frame = saddle_frame(eqs[i], p);
        const auto& vu = frame.second;
        return std::abs(vu[0] + vu[1]) / std::sqrt(2.0) < 0.7;
    };
    switch (which) {
        case SaddlePair::offdiag_swap: {
            for (std::size_t i : offdiag)
                for (std::size_t j : offdiag) {
                    if (i == j) continue;
                    if (torus_dist(eqs[i].state.phi1, eqs[i].state.phi2, eqs[j].state.phi2,
                                   eqs[j].state.phi1) < 1e-6)
                        return {i, j};
                }
            throw BracketInvalid("locate_connection: no swap-symmetric off-diagonal saddle pair");
        }
        case SaddlePair::diagonal: {
            if (diag.size() < 2)
                throw BracketInvalid("locate_connection: fewer than two diagonal saddles");
            if (transverse_unstable(diag[1])) return {diag[1], diag[0]};
            return {diag[0], diag[1]};
        }
        default: {
            if (diag.empty() || offdiag.empty())
                throw BracketInvalid("locate_connection: need one diagonal and one off-diagonal "
                                     "saddle");
            return {diag[0], offdiag[0]};
        }
    }
}

} // namespace

double locate_connection(ParamAxis axis, std::pair<double, double> bracket, const Params& p,
                         const IntegratorSettings& set, SaddlePair pair,
                         const PortraitOptions& opt) {
    auto gap_at = [&](double value) {
        const Params q = with_axis(p, axis, value).normalized();
        const std::vector<Equilibrium> eqs = find_equilibria(q);
        auto [from, to] = select_pair(eqs, q, pair);
        try {
            return connection_gap(from, to, eqs, q, set, opt).signed_gap;
        } catch (const NoApproach&) {
            // The arriving branch may be the other member of the pair.
            return connection_gap(to, from, eqs, q, set, opt).signed_gap;
        }
    };

    double a = bracket.first, b = bracket.second;
    double ga = gap_at(a);
    const double gb = gap_at(b);
    if ((ga < 0.0) == (gb < 0.0))
        throw BracketInvalid("locate_connection: signed gap does not change sign over the "
                             "bracket");
    double mid = 0.5 * (a + b);
    while (b - a > 1e-8) {
        mid = 0.5 * (a + b);
        const double gm = gap_at(mid);
        if (std::abs(gm) < 1e-6) return mid;
        if ((ga < 0.0) == (gm < 0.0)) { a = mid; ga = gm; } else { b = mid; }
    }
    return 0.5 * (a + b);
}

std::vector<std::pair<std::size_t, std::size_t>> diagonal_connections(
    const std::vector<Equilibrium>& eqs, const Params& p) {
    std::vector<std::size_t> diag;
    for (std::size_t i = 0; i < eqs.size(); ++i)
        if (eqs[i].etype == EqType::diagonal) diag.push_back(i);
    std::sort(diag.begin(), diag.end(), [&](std::size_t a, std::size_t b) {
        return eqs[a].state.phi1 < eqs[b].state.phi1;
    });

    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t n = diag.size();
    if (n < 2) return out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        if (eqs[diag[i]].kind != EqKind::saddle || eqs[diag[j]].kind != EqKind::saddle) continue;
        const double a = eqs[diag[i]].state.phi1;
        double b = eqs[diag[j]].state.phi1;
        if (j == 0) b += two_pi; // wrap-around arc
        const double g = diag_field(0.5 * (a + b), p);
        // Flow on the open arc has one sign; it carries a heteroclinic
        // connection between the two diagonal saddles.
        if (g > 0.0) out.emplace_back(diag[i], diag[j]);
        else if (g < 0.0) out.emplace_back(diag[j], diag[i]);
    }
    return out;
}

std::string to_string(BranchType b) {
    switch (b) {
        case BranchType::unstable_plus: return "unstable+";
        case BranchType::unstable_minus: return "unstable-";
        case BranchType::stable_plus: return "stable+";
        default: return "stable-";
    }
}

std::string to_string(TerminusKind t) {
    switch (t) {
        case TerminusKind::equilibrium: return "equilibrium";
        case TerminusKind::cycle: return "cycle";
        case TerminusKind::section_exit: return "section-exit";
        default: return "budget-exhausted";
    }
}

} // namespace hco
