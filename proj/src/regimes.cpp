#include "hco/regimes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "hco/errors.hpp"
#include "hco/portrait.hpp"

namespace hco {

namespace {

double diag_field(double phi, const Params& p) {
    return p.gamma - std::sin(phi) + p.d * eval_coupling(phi, p);
}

bool diagonal_has_roots(const Params& p) {
    const int n = 1024;
    double prev = diag_field(0.0, p);
    for (int i = 1; i <= n; ++i) {
        const double cur = diag_field(i * two_pi / n, p);
        if (prev == 0.0 || (prev < 0.0) != (cur < 0.0)) return true;
        prev = cur;
    }
    return false;
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

RegimeReport classify_regime(const Params& p_in, int ic_grid, const IntegratorSettings& set) {
    const Params p = p_in.normalized();
    if (ic_grid < 4) throw std::invalid_argument("classify_regime: ic_grid must be >= 4");

    RegimeReport rep;
    const std::vector<Equilibrium> eqs = find_equilibria(p);

    // Initial conditions: lattice, diagonal points, near-saddle probes.
    std::vector<TorusState> ics;
    for (int i = 0; i < ic_grid; ++i)
        for (int j = 0; j < ic_grid; ++j)
            ics.push_back(TorusState{(i + 0.5) * two_pi / ic_grid,
                                     (j + 0.5) * two_pi / ic_grid, {}, {}});
    const int ndiag = std::max(3, ic_grid / 2);
    for (int i = 0; i < ndiag; ++i) {
        const double a = (i + 0.37) * two_pi / ndiag;
        ics.push_back(TorusState{a, a, {}, {}});
    }
    for (const Equilibrium& e : eqs) {
        if (e.kind != EqKind::saddle) continue;
        const auto frame = saddle_frame(e, p);
        const auto& vu = frame.second;
        for (double sgn : {1.0, -1.0})
            ics.push_back(TorusState{reduce_angle(e.state.phi1 + sgn * 1e-3 * vu[0]),
                                     reduce_angle(e.state.phi2 + sgn * 1e-3 * vu[1]), {}, {}});
    }

    std::vector<LimitCycle> cycles;      // reached attractors only
    std::vector<int> cycle_votes;
    std::vector<int> eq_votes(eqs.size(), 0);
    std::vector<LimitCycle> nonattracting; // unstable cycles hit by degenerate ICs
    int undecided = 0, saddle_limit = 0, unstable_cycle = 0;

    RunOptions ropt;
    ropt.known_equilibria = &eqs;
    ropt.known_cycles = &cycles;

    for (const TorusState& s0 : ics) {
        const RunOutcome run = run_to_attractor(s0, p, set, ropt);
        switch (run.kind) {
            case RunOutcome::Kind::known_equilibrium:
                ++eq_votes[static_cast<std::size_t>(run.known_index)];
                break;
            case RunOutcome::Kind::known_cycle:
                ++cycle_votes[static_cast<std::size_t>(run.known_index)];
                break;
            case RunOutcome::Kind::equilibrium: {
                int best = -1;
                double best_d = 1e-3;
                for (std::size_t i = 0; i < eqs.size(); ++i) {
                    const double d = torus_dist(run.endpoint.phi1, run.endpoint.phi2,
                                                eqs[i].state.phi1, eqs[i].state.phi2);
                    if (d < best_d) { best_d = d; best = static_cast<int>(i); }
                }
                if (best >= 0 && stable_kind(eqs[static_cast<std::size_t>(best)].kind))
                    ++eq_votes[static_cast<std::size_t>(best)];
                else
                    ++saddle_limit; // settled onto a saddle along a degenerate IC
                break;
            }
            case RunOutcome::Kind::cycle: {
                bool known_nonattracting = false;
                for (const LimitCycle& u : nonattracting)
                    if (!run.via_recurrence && u.section_count == run.m &&
                        circ_dist(u.section_phi2, run.y_star) < 1e-3) {
                        known_nonattracting = true;
                        break;
                    }
                if (known_nonattracting) {
                    ++unstable_cycle;
                    break;
                }
                LimitCycle c = run.via_recurrence
                                   ? realize_cycle_from_state(p, set, run.endpoint, run.period)
                                   : realize_cycle(p, set, run.y_star, run.m);
                if (!c.stable && !c.neutral) {
                    // Invariant-manifold ICs (the diagonal, saddle probes) can
                    // land exactly on a repelling cycle; it is not an attractor.
                    ++unstable_cycle;
                    nonattracting.push_back(std::move(c));
                    break;
                }
                int idx = -1;
                for (std::size_t i = 0; i < cycles.size(); ++i) {
                    const bool same_section =
                        c.section_count > 0 && cycles[i].section_count > 0 &&
                        circ_dist(c.section_phi2, cycles[i].section_phi2) < 1e-3;
                    const bool same_period =
                        std::abs(c.period - cycles[i].period) <
                        0.01 * std::max(c.period, cycles[i].period);
                    if (same_period && (same_section || c.section_count == 0)) {
                        idx = static_cast<int>(i);
                        break;
                    }
                }
                if (idx < 0) {
                    cycles.push_back(std::move(c));
                    cycle_votes.push_back(1);
                } else {
                    ++cycle_votes[static_cast<std::size_t>(idx)];
                }
                break;
            }
            default:
                ++undecided;
                break;
        }
    }

    // Reached-attractor inventory drives the label.
    bool has_eq = false, has_in = false, has_anti = false, has_other = false;
    for (std::size_t i = 0; i < eqs.size(); ++i)
        if (eq_votes[i] > 0) {
            has_eq = true;
            ++rep.stable_equilibria;
            RegimeAttractor a;
            a.type = RegimeAttractor::Type::equilibrium;
            a.location = eqs[i].state;
            a.votes = eq_votes[i];
            rep.attractors.push_back(a);
        }
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        if (cycle_votes[i] <= 0) continue;
        const LimitCycle& c = cycles[i];
        if (c.phase_class == PhaseClass::in_phase) has_in = true;
        else if (c.phase_class == PhaseClass::anti_phase) has_anti = true;
        else has_other = true;
        rep.stable_cycles.emplace_back(c.phase_class, c.period);
        RegimeAttractor a;
        a.type = RegimeAttractor::Type::cycle;
        a.location = c.samples.empty() ? TorusState{} : c.samples.front();
        a.pclass = c.phase_class;
        a.period = c.period;
        a.section_phi2 = c.section_phi2;
        a.neutral = c.neutral;
        a.votes = cycle_votes[i];
        rep.attractors.push_back(a);
    }

    if (has_in && !has_eq && !has_anti && !has_other) rep.label = RegimeLabel::A;
    else if (has_eq && !has_in && !has_anti && !has_other) rep.label = RegimeLabel::B;
    else if (has_anti && !has_eq && !has_in && !has_other) rep.label = RegimeLabel::C;
    else if (has_anti && has_eq && !has_in && !has_other) rep.label = RegimeLabel::D;
    else if (has_eq || has_in || has_anti || has_other) rep.label = RegimeLabel::OTHER;
    else rep.label = RegimeLabel::UNDECIDED;

    // Basin votes in a stable order: equilibria by position, then cycles,
    // then the reserved ids.
    rep.total_runs = static_cast<int>(ics.size());
    rep.undecided_runs = undecided;
    rep.saddle_limit_runs = saddle_limit;
    rep.unstable_cycle_runs = unstable_cycle;
    const double total = static_cast<double>(ics.size());
    int eq_id = 0;
    for (std::size_t i = 0; i < eqs.size(); ++i)
        if (eq_votes[i] > 0)
            rep.basin_votes.emplace_back("eq" + std::to_string(++eq_id) + "(" +
                                             fmt4(eqs[i].state.phi1) + "," +
                                             fmt4(eqs[i].state.phi2) + ")",
                                         eq_votes[i] / total);
    for (std::size_t i = 0; i < cycles.size(); ++i)
        if (cycle_votes[i] > 0)
            rep.basin_votes.emplace_back("cycle" + std::to_string(i + 1) + "(" +
                                             to_string(cycles[i].phase_class) + ")",
                                         cycle_votes[i] / total);
    if (saddle_limit > 0) rep.basin_votes.emplace_back("saddle-limit", saddle_limit / total);
    if (unstable_cycle > 0)
        rep.basin_votes.emplace_back("unstable-cycle", unstable_cycle / total);
    if (undecided > 0) rep.basin_votes.emplace_back("undecided", undecided / total);
    return rep;
}

SweepGrid sweep_plane(std::pair<double, double> alpha_range, std::pair<double, double> delta_range,
                      int n1, int n2, const Params& p_in, const SweepOptions& opt) {
    const Params base = p_in.normalized();
    SweepGrid grid;
    grid.alpha_range = alpha_range;
    grid.delta_range = delta_range;
    grid.n1 = n1;
    grid.n2 = n2;
    grid.inventory = opt.inventory;
    grid.base = base;
    grid.cells.assign(static_cast<std::size_t>(n1) * n2, SweepCell{});

    auto run_cell = [&](int idx) {
        const int i = idx % n1;
        const int j = idx / n1;
        Params p = base;
        p.alpha = grid.alpha_of(i);
        p.delta = grid.delta_of(j);
        const IntegratorSettings set = opt.use_default_settings
                                           ? IntegratorSettings::defaults_for(p)
                                           : IntegratorSettings::sweep_fast(p);
        SweepCell cell;
        const RegimeReport rep = classify_regime(p, opt.ic_grid, set);
        cell.label = rep.label;
        cell.n_stable_eq = rep.stable_equilibria;
        cell.n_cycles = static_cast<int>(rep.stable_cycles.size());
        if (opt.inventory) {
            const EquilibriumCensus cen = census(p);
            cell.census_stable = cen.n_stable;
            cell.census_unstable = cen.n_unstable;
            cell.census_saddle = cen.n_saddle;
            cell.has_inphase = !diagonal_has_roots(p);
            cell.has_antiphase = find_antiphase_cycle(p, set).has_value();
        }
        grid.cells[static_cast<std::size_t>(idx)] = cell;
    };

    const int total = n1 * n2;
    if (opt.jobs <= 1) {
        for (int idx = 0; idx < total; ++idx) run_cell(idx);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int nw = std::min(opt.jobs, total);
        pool.reserve(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&]() {
                for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1))
                    run_cell(idx);
            });
        for (auto& th : pool) th.join();
    }
    return grid;
}

LocatedBoundary locate_boundary(ParamAxis axis, std::pair<double, double> bracket,
                                const Params& p, int ic_grid, const IntegratorSettings& set) {
    auto label_at = [&](double v) {
        const Params q = with_axis(p, axis, v);
        IntegratorSettings s = set;
        if (axis == ParamAxis::d) s = set; // settings do not depend on d
        return classify_regime(q, ic_grid, s).label;
    };
    double a = bracket.first, b = bracket.second;
    RegimeLabel la = label_at(a);
    RegimeLabel lb = label_at(b);
    if (la == lb)
        throw BracketInvalid("locate_boundary: same regime label at both bracket ends (" +
                             to_string(la) + ")");
    while (b - a > 1e-4) {
        const double m = 0.5 * (a + b);
        const RegimeLabel lm = label_at(m);
        if (lm == la) a = m;
        else { b = m; lb = lm; }
    }
    LocatedBoundary res;
    res.value = 0.5 * (a + b);
    res.left = la;
    res.right = lb;
    return res;
}

double symmetry_fold(const SweepGrid& grid) {
    if (!grid.inventory)
        throw std::invalid_argument("symmetry_fold: sweep grid lacks inventory data");
    const bool full_alpha = grid.alpha_range.first == 0.0 &&
                            std::abs(grid.alpha_range.second - two_pi) < 1e-12;
    const bool full_delta = grid.delta_range.first == 0.0 &&
                            std::abs(grid.delta_range.second - two_pi) < 1e-12;
    if (!full_alpha || !full_delta)
        throw std::invalid_argument("symmetry_fold: grid must cover the full (alpha, delta) "
                                    "plane");

    const int n1 = grid.n1, n2 = grid.n2;
    auto interior = [&](int i, int j) {
        const RegimeLabel l = grid.at(i, j).label;
        return grid.at((i + 1) % n1, j).label == l && grid.at((i + n1 - 1) % n1, j).label == l &&
               grid.at(i, (j + 1) % n2).label == l && grid.at(i, (j + n2 - 1) % n2).label == l;
    };

    int compared = 0, mismatched = 0;
    const double ha = two_pi / n1;
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            const double alpha = grid.alpha_of(i);
            const double delta = grid.delta_of(j);
            const double alpha_m = reduce_angle(pi - alpha - delta);
            int im = static_cast<int>(std::lround(alpha_m / ha - 0.5)) % n1;
            if (im < 0) im += n1;
            if (!interior(i, j) || !interior(im, j)) continue;
            const SweepCell& a = grid.at(i, j);
            const SweepCell& b = grid.at(im, j);
            ++compared;
            const int a_nonsad = a.census_stable + a.census_unstable;
            const int b_nonsad = b.census_stable + b.census_unstable;
            if (a_nonsad != b_nonsad || a.census_saddle != b.census_saddle ||
                a.has_inphase != b.has_inphase || a.has_antiphase != b.has_antiphase)
                ++mismatched;
        }
    if (compared == 0) return 0.0;
    return static_cast<double>(mismatched) / compared;
}

std::string to_string(RegimeLabel l) {
    switch (l) {
        case RegimeLabel::A: return "A";
        case RegimeLabel::B: return "B";
        case RegimeLabel::C: return "C";
        case RegimeLabel::D: return "D";
        case RegimeLabel::OTHER: return "OTHER";
        default: return "UNDECIDED";
    }
}

} // namespace hco
