#include "hco/checks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>

#include "hco/cycles.hpp"
#include "hco/equilibria.hpp"
#include "hco/model.hpp"

namespace hco {

namespace {

Params random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, two_pi);
    std::uniform_real_distribution<double> coupling(0.0, 1.5);
    Params p;
    p.gamma = 0.7;
    p.k = 50.0;
    p.d = std::max(1e-6, coupling(rng));
    p.alpha = angle(rng);
    p.delta = std::min(angle(rng), two_pi * (1.0 - 1e-12));
    return p;
}

double hausdorff(const std::vector<TorusState>& a, const std::vector<TorusState>& b) {
    auto one_sided = [](const std::vector<TorusState>& u, const std::vector<TorusState>& v) {
        double worst = 0.0;
        for (const TorusState& s : u) {
            double best = 1e300;
            for (const TorusState& t : v)
                best = std::min(best, torus_dist(s.phi1, s.phi2, t.phi1, t.phi2));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

bool match_eigensets(const std::array<std::complex<double>, 2>& got,
                     const std::array<std::complex<double>, 2>& want, double tol) {
    auto close = [tol](std::complex<double> a, std::complex<double> b) {
        return std::abs(a - b) < tol || std::abs(a - std::conj(b)) < tol;
    };
    return (close(got[0], want[0]) && close(got[1], want[1])) ||
           (close(got[0], want[1]) && close(got[1], want[0]));
}

struct Tally {
    PropertyResult res;
    explicit Tally(std::string name) { res.name = std::move(name); res.passed = true; }
    void observe(double defect, double limit, const std::string& where) {
        ++res.checked;
        if (defect > res.worst) res.worst = defect;
        if (defect > limit && res.passed) {
            res.passed = false;
            res.detail = where;
        }
    }
    void fail(const std::string& why) {
        ++res.checked;
        if (res.passed) {
            res.passed = false;
            res.detail = why;
        }
    }
};

std::string param_tag(const Params& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(d=%.4f, alpha=%.4f, delta=%.4f)", p.d, p.alpha, p.delta);
    return buf;
}

} // namespace

std::vector<PropertyResult> run_property_suite(const CheckOptions& opt) {
    std::vector<PropertyResult> out;

    // 1. Permutation equivariance of the field, exact.
    {
        std::mt19937_64 rng(opt.seed ^ 0x1ull);
        std::uniform_real_distribution<double> angle(0.0, two_pi);
        Tally t("permutation-equivariance");
        for (int i = 0; i < opt.n_param_sets; ++i) {
            const Params p = random_params(rng);
            for (int j = 0; j < 10; ++j) {
                const TorusState s{angle(rng), angle(rng), {}, {}};
                const FieldValue f = vector_field(s, p);
                const FieldValue g = vector_field(swapped(s), p);
                const bool exact = f.dphi1 == g.dphi2 && f.dphi2 == g.dphi1;
                t.observe(exact ? 0.0 : std::max(std::abs(f.dphi1 - g.dphi2),
                                                 std::abs(f.dphi2 - g.dphi1)),
                          0.0, "swap mismatch at " + param_tag(p));
            }
        }
        out.push_back(t.res);
    }

    // 2 + 3. Anti-phase uniqueness (pairwise Hausdorff) and point symmetry.
    {
        std::mt19937_64 rng(opt.seed ^ 0x2ull);
        std::uniform_real_distribution<double> angle(0.0, two_pi);
        Tally uniq("antiphase-uniqueness");
        Tally sym("antiphase-point-symmetry");
        for (int i = 0; i < opt.n_uniqueness_sets; ++i) {
            const Params p = random_params(rng);
            const IntegratorSettings set = IntegratorSettings::sweep_fast(p);
            std::vector<LimitCycle> anti;
            for (int j = 0; j < opt.n_uniqueness_ics; ++j) {
                const TorusState s0{angle(rng), angle(rng), {}, {}};
                // Shortcut through already-found cycles keeps this affordable;
                // a genuinely distinct anti-phase cycle would have a distant
                // section point and would still be realized separately.
                RunOptions ropt;
                ropt.known_cycles = &anti;
                const RunOutcome run = run_to_attractor(s0, p, set, ropt);
                if (run.kind != RunOutcome::Kind::cycle) continue;
                LimitCycle c = run.via_recurrence
                                   ? realize_cycle_from_state(p, set, run.endpoint, run.period)
                                   : realize_cycle(p, set, run.y_star, run.m);
                if (c.phase_class == PhaseClass::anti_phase) anti.push_back(std::move(c));
            }
            for (std::size_t a = 0; a < anti.size(); ++a)
                for (std::size_t b = a + 1; b < anti.size(); ++b)
                    uniq.observe(hausdorff(anti[a].samples, anti[b].samples), 1e-4,
                                 "two distinct anti-phase cycles at " + param_tag(p));
            for (const LimitCycle& c : anti) {
                double worst = 0.0;
                for (std::size_t s = 0; s < c.samples.size(); s += 4) {
                    const TorusState& q = c.samples[s];
                    double best = 1e300;
                    for (const TorusState& r : c.samples)
                        best = std::min(best, torus_dist(q.phi2, q.phi1, r.phi1, r.phi2));
                    worst = std::max(worst, best);
                }
                sym.observe(worst, 1e-4, "missing swapped counterpart at " + param_tag(p));
            }
        }
        out.push_back(uniq.res);
        out.push_back(sym.res);
    }

    // 4. Off-diagonal pair implies diagonal equilibrium; 7. coordinate
    // bounds; 9. index sum. All share the equilibrium solve.
    {
        std::mt19937_64 rng(opt.seed ^ 0x4ull);
        Tally impl("diagonal-root-implication");
        Tally bounds("equilibrium-coordinate-bounds");
        Tally index("saddle-index-sum");
        for (int i = 0; i < opt.n_param_sets; ++i) {
            const Params p = random_params(rng);
            const std::vector<Equilibrium> eqs = find_equilibria(p);
            bool offdiag = false, diag = false;
            for (const Equilibrium& e : eqs)
                (e.etype == EqType::off_diagonal ? offdiag : diag) = true;
            if (offdiag && !diag) impl.fail("off-diagonal pair without diagonal root at " +
                                            param_tag(p));
            else ++impl.res.checked;

            const double lo = std::asin(p.gamma), hi = pi - std::asin(p.gamma);
            for (const Equilibrium& e : eqs) {
                for (double phi : {e.state.phi1, e.state.phi2}) {
                    // Strict in exact arithmetic; the 1e-9 guard absorbs the
                    // root position error, the margin sign itself is exact
                    // because I > 0 everywhere.
                    const double viol = std::max(lo - phi, phi - hi);
                    bounds.observe(viol, 1e-9, "coordinate outside the confinement interval at " +
                                                   param_tag(p));
                }
                if (eval_coupling(e.state.phi1, p) <= 0.0 ||
                    eval_coupling(e.state.phi2, p) <= 0.0)
                    bounds.fail("coupling margin not positive at " + param_tag(p));
            }

            const EquilibriumCensus cen = census_of(eqs);
            if (cen.all_hyperbolic) {
                if (cen.n_saddle != cen.n_stable + cen.n_unstable)
                    index.fail("index sum violated at " + param_tag(p));
                else ++index.res.checked;
            }
        }
        out.push_back(impl.res);
        out.push_back(bounds.res);
        out.push_back(index.res);
    }

    // 5. Mirror conjugacy of the equilibrium set (positions and negated
    // eigenvalues, 1e-8).
    {
        std::mt19937_64 rng(opt.seed ^ 0x5ull);
        Tally t("equilibrium-mirror-conjugacy");
        for (int i = 0; i < opt.n_mirror_sets; ++i) {
            const Params p = random_params(rng);
            const Params q = parameter_mirror(p);
            const std::vector<Equilibrium> ep = find_equilibria(p);
            const std::vector<Equilibrium> eq = find_equilibria(q);
            if (ep.size() != eq.size()) {
                t.fail("equilibrium count changes under mirror at " + param_tag(p));
                continue;
            }
            for (const Equilibrium& e : ep) {
                const double m1 = reduce_angle(pi - e.state.phi1);
                const double m2 = reduce_angle(pi - e.state.phi2);
                double best = 1e300;
                const Equilibrium* match = nullptr;
                for (const Equilibrium& f : eq) {
                    const double d = torus_dist(m1, m2, f.state.phi1, f.state.phi2);
                    if (d < best) { best = d; match = &f; }
                }
                t.observe(best, 1e-8, "mirrored equilibrium missing at " + param_tag(p));
                if (match && best < 1e-8) {
                    const std::array<std::complex<double>, 2> want{-e.eigenvalues[0],
                                                                   -e.eigenvalues[1]};
                    if (!match_eigensets(match->eigenvalues, want, 1e-8))
                        t.fail("eigenvalues not negated under mirror at " + param_tag(p));
                }
            }
        }
        out.push_back(t.res);
    }

    // 6. Mirror conjugacy of cycles: mirrored cycle exists with reciprocal
    // multiplier (Liouville route on both sides, 1e-4).
    {
        std::mt19937_64 rng(opt.seed ^ 0x6ull);
        Tally t("cycle-mirror-conjugacy");
        for (int i = 0; i < opt.n_cycle_mirror_sets; ++i) {
            const Params p = random_params(rng);
            const Params q = parameter_mirror(p);
            const IntegratorSettings sp = IntegratorSettings::sweep_fast(p);
            const IntegratorSettings sq = IntegratorSettings::sweep_fast(q);
            for (const bool inphase : {true, false}) {
                std::optional<LimitCycle> cp = inphase ? find_inphase_cycle(p, sp)
                                                       : find_antiphase_cycle(p, sp);
                if (!cp) continue;
                std::optional<LimitCycle> cq = inphase ? find_inphase_cycle(q, sq)
                                                       : find_antiphase_cycle(q, sq);
                if (!cq) {
                    t.fail("mirrored cycle missing at " + param_tag(p));
                    continue;
                }
                std::vector<TorusState> mirrored;
                mirrored.reserve(cp->samples.size());
                for (std::size_t s = 0; s < cp->samples.size(); s += 8)
                    mirrored.push_back(TorusState{reduce_angle(pi - cp->samples[s].phi1),
                                                  reduce_angle(pi - cp->samples[s].phi2), {}, {}});
                std::vector<TorusState> target;
                for (std::size_t s = 0; s < cq->samples.size(); s += 8)
                    target.push_back(cq->samples[s]);
                t.observe(hausdorff(mirrored, target), 2e-4,
                          "mirrored cycle displaced at " + param_tag(p));
                t.observe(std::abs(cp->floquet_trace * cq->floquet_trace - 1.0), 1e-4,
                          "multipliers not reciprocal at " + param_tag(p));
            }
        }
        out.push_back(t.res);
    }

    // 7. Reversibility defect on the two reversible lines, 1e-12.
    {
        std::mt19937_64 rng(opt.seed ^ 0x7ull);
        std::uniform_real_distribution<double> angle(0.0, two_pi);
        std::uniform_real_distribution<double> coupling(0.0, 1.5);
        Tally t("reversibility-defect");
        for (int line = 0; line < 2; ++line) {
            for (int i = 0; i < opt.n_reversible_sets; ++i) {
                Params p;
                p.gamma = 0.7;
                p.k = 50.0;
                p.d = std::max(1e-6, coupling(rng));
                p.alpha = angle(rng);
                p.delta = reduce_angle((line == 0 ? pi : 3.0 * pi) - 2.0 * p.alpha);
                for (int j = 0; j < opt.n_states; ++j) {
                    const TorusState s{angle(rng), angle(rng), {}, {}};
                    t.observe(reversibility_defect(s, p), 1e-12,
                              "defect above 1e-12 at " + param_tag(p));
                }
            }
        }
        out.push_back(t.res);
    }

    return out;
}

} // namespace hco
