#include "hco/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "hco/errors.hpp"

namespace hco {

namespace {

struct Root {
    double phi1, phi2;
};

// Diagonal restriction g(phi) = gamma - sin(phi) + d I(phi) and g'.
double diag_field(double phi, const Params& p) {
    return p.gamma - std::sin(phi) + p.d * eval_coupling(phi, p);
}

double diag_slope(double phi, const Params& p) {
    return -std::cos(phi) + p.d * eval_coupling_derivative(phi, p);
}

bool newton2(const Params& p, double& x, double& y, const EquilibriaOptions& opt) {
    for (int it = 0; it < opt.max_newton; ++it) {
        const TorusState s{x, y, {}, {}};
        const FieldValue f = vector_field(s, p);
        const Jacobian2 j = jacobian(s, p);
        const double det = j.a11 * j.a22 - j.a12 * j.a21;
        if (std::abs(det) < 1e-14) return false;
        const double dx = (-f.dphi1 * j.a22 + f.dphi2 * j.a12) / det;
        const double dy = (-f.dphi2 * j.a11 + f.dphi1 * j.a21) / det;
        const double len = std::hypot(dx, dy);
        const double cap = len > 0.5 ? 0.5 / len : 1.0; // keep steps grid-local
        x += cap * dx;
        y += cap * dy;
        if (len < opt.step_tol) {
            const FieldValue r = vector_field(TorusState{x, y, {}, {}}, p);
            return std::hypot(r.dphi1, r.dphi2) < opt.residual_tol;
        }
        if (it > 12 && len > 0.25) return false; // wandering seed, give up early
    }
    return false;
}

void add_root(std::vector<Root>& roots, double x, double y, double merge_tol) {
    x = reduce_angle(x);
    y = reduce_angle(y);
    for (const Root& r : roots)
        if (torus_dist(x, y, r.phi1, r.phi2) < merge_tol) return;
    roots.push_back(Root{x, y});
}

std::vector<Root> roots_for_grid(const Params& p, int n, const EquilibriaOptions& opt) {
    std::vector<Root> roots;

    // Property 7 confines all roots of the coupled system to a sub-square:
    // sin(phi_i) = gamma + d I > gamma. Seeds outside it cannot be roots,
    // so they are skipped (their Newton basins still overlap the box).
    double lo = 0.0, hi = two_pi;
    const bool boxed = p.gamma < 1.0 && p.d > 0.0;
    if (boxed) {
        lo = std::asin(p.gamma) - 0.25;
        hi = pi - std::asin(p.gamma) + 0.25;
    }

    const double step = two_pi / n;
    for (int i = 0; i < n; ++i) {
        const double sx = (i + 0.5) * step;
        if (boxed && (sx < lo || sx > hi)) continue;
        for (int jj = 0; jj < n; ++jj) {
            const double sy = (jj + 0.5) * step;
            if (boxed && (sy < lo || sy > hi)) continue;
            double x = sx, y = sy;
            if (newton2(p, x, y, opt)) add_root(roots, x, y, opt.merge_tol);
        }
    }

    // Dedicated 1-D Newton along the diagonal; resolves tight diagonal pairs.
    const int m = 4 * n;
    double prev = diag_field(0.0, p);
    for (int i = 1; i <= m; ++i) {
        const double phi = i * two_pi / m;
        const double cur = diag_field(phi, p);
        if ((prev <= 0.0 && cur > 0.0) || (prev >= 0.0 && cur < 0.0)) {
            double a = (i - 1) * two_pi / m, b = phi;
            double fa = prev;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = diag_field(mid, p);
                if ((fa <= 0.0) == (fm <= 0.0)) { a = mid; fa = fm; } else { b = mid; }
            }
            double r = 0.5 * (a + b);
            for (int it = 0; it < 4; ++it) {
                const double g = diag_field(r, p), gs = diag_slope(r, p);
                if (gs == 0.0) break;
                r -= g / gs;
            }
            if (std::abs(diag_field(r, p)) < opt.residual_tol)
                add_root(roots, r, r, opt.merge_tol);
        }
        prev = cur;
    }

    // Local refinement seeding around every root catches fold twins that
    // sit between coarse grid lines.
    const std::size_t found = roots.size();
    for (std::size_t r = 0; r < found; ++r) {
        for (int i = -2; i <= 2; ++i)
            for (int jj = -2; jj <= 2; ++jj) {
                if (i == 0 && jj == 0) continue;
                double x = roots[r].phi1 + 0.03 * i;
                double y = roots[r].phi2 + 0.03 * jj;
                if (newton2(p, x, y, opt)) add_root(roots, x, y, opt.merge_tol);
            }
    }

    // Swap closure: if (a,b) is a root then (b,a) is one analytically.
    const std::size_t n_before = roots.size();
    for (std::size_t r = 0; r < n_before; ++r) {
        double x = roots[r].phi2, y = roots[r].phi1;
        if (newton2(p, x, y, opt)) add_root(roots, x, y, opt.merge_tol);
    }

    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        return a.phi1 != b.phi1 ? a.phi1 < b.phi1 : a.phi2 < b.phi2;
    });
    return roots;
}

} // namespace

std::optional<TorusState> refine_equilibrium(const TorusState& guess, const Params& p,
                                             double residual_tol) {
    EquilibriaOptions opt;
    opt.residual_tol = residual_tol;
    double x = guess.phi1, y = guess.phi2;
    if (!newton2(p, x, y, opt)) return std::nullopt;
    return TorusState{reduce_angle(x), reduce_angle(y), {}, {}};
}

Equilibrium classify_equilibrium(Equilibrium e, const Params& p, double nonhyperbolic_tol) {
    const Jacobian2 j = jacobian(e.state, p);
    e.eigenvalues = eigenvalues(j);
    const auto& l = e.eigenvalues;
    const double re1 = l[0].real(), re2 = l[1].real();
    const bool complex_pair = l[0].imag() != 0.0;
    if (std::abs(re1) < nonhyperbolic_tol || std::abs(re2) < nonhyperbolic_tol)
        e.kind = EqKind::non_hyperbolic;
    else if (re1 < 0.0 && re2 < 0.0)
        e.kind = complex_pair ? EqKind::stable_focus : EqKind::stable_node;
    else if (re1 > 0.0 && re2 > 0.0)
        e.kind = complex_pair ? EqKind::unstable_focus : EqKind::unstable_node;
    else
        e.kind = EqKind::saddle;
    e.etype = circ_dist(e.state.phi1, e.state.phi2) < 1e-8 ? EqType::diagonal
                                                           : EqType::off_diagonal;
    return e;
}

std::vector<Equilibrium> find_equilibria(const Params& p_in, const EquilibriaOptions& opt) {
    const Params p = p_in.normalized();
    std::vector<Root> roots = roots_for_grid(p, opt.seed_grid, opt);
    if (opt.refine_check) {
        std::vector<Root> fine = roots_for_grid(p, 2 * opt.seed_grid, opt);
        if (fine.size() != roots.size())
            throw SeedGridTooCoarse("find_equilibria: " + std::to_string(roots.size()) +
                                    " roots at N=" + std::to_string(opt.seed_grid) + " vs " +
                                    std::to_string(fine.size()) + " at 2N");
    }

    std::vector<Equilibrium> out;
    out.reserve(roots.size());
    for (const Root& r : roots) {
        Equilibrium e;
        e.state = TorusState{r.phi1, r.phi2, {}, {}};
        const FieldValue f = vector_field(e.state, p);
        e.residual = std::hypot(f.dphi1, f.dphi2);
        out.push_back(classify_equilibrium(e, p, opt.nonhyperbolic_tol));
    }
    return out;
}

EquilibriumCensus census_of(const std::vector<Equilibrium>& eqs) {
    EquilibriumCensus c;
    for (const Equilibrium& e : eqs) {
        if (e.kind == EqKind::non_hyperbolic) {
            c.all_hyperbolic = false;
        } else if (saddle_kind(e.kind)) {
            ++c.n_saddle;
        } else if (stable_kind(e.kind)) {
            ++c.n_stable;
        } else {
            ++c.n_unstable;
        }
    }
    // Known weak-coupling configurations (stable, unstable, saddle).
    static const int configs[12][3] = {{1, 1, 2}, {2, 1, 3}, {1, 2, 3}, {2, 2, 4},
                                       {3, 2, 5}, {2, 3, 5}, {3, 1, 4}, {4, 2, 6},
                                       {4, 1, 5}, {1, 3, 4}, {2, 4, 6}, {1, 4, 5}};
    if (c.all_hyperbolic) {
        for (const auto& k : configs)
            if (c.n_stable == k[0] && c.n_unstable == k[1] && c.n_saddle == k[2]) {
                c.configuration_id = std::to_string(k[0]) + "s+" + std::to_string(k[1]) + "u+" +
                                     std::to_string(k[2]) + "sd";
                break;
            }
    }
    return c;
}

EquilibriumCensus census(const Params& p, const EquilibriaOptions& opt) {
    const std::vector<Equilibrium> eqs = find_equilibria(p, opt);
    EquilibriumCensus c = census_of(eqs);
    if (c.all_hyperbolic && c.n_saddle != c.n_stable + c.n_unstable)
        throw std::runtime_error("census: torus index identity violated (" +
                                 std::to_string(c.n_saddle) + " saddles vs " +
                                 std::to_string(c.n_stable + c.n_unstable) + " non-saddles)");
    return c;
}

bool check_property4(const Params& p, const EquilibriaOptions& opt) {
    const std::vector<Equilibrium> eqs = find_equilibria(p, opt);
    bool has_offdiag = false, has_diag = false;
    for (const Equilibrium& e : eqs) {
        if (e.etype == EqType::off_diagonal) has_offdiag = true;
        else has_diag = true;
    }
    return !has_offdiag || has_diag;
}

std::string to_string(EqKind k) {
    switch (k) {
        case EqKind::stable_node: return "stable-node";
        case EqKind::stable_focus: return "stable-focus";
        case EqKind::unstable_node: return "unstable-node";
        case EqKind::unstable_focus: return "unstable-focus";
        case EqKind::saddle: return "saddle";
        default: return "non-hyperbolic";
    }
}

std::string to_string(EqType t) {
    return t == EqType::diagonal ? "diagonal" : "off-diagonal";
}

} // namespace hco
