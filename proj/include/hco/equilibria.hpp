#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hco/model.hpp"

namespace hco {

enum class EqKind {
    stable_node,
    stable_focus,
    unstable_node,
    unstable_focus,
    saddle,
    non_hyperbolic
};

enum class EqType { diagonal, off_diagonal };

struct Equilibrium {
    TorusState state;
    std::array<std::complex<double>, 2> eigenvalues{};
    EqKind kind = EqKind::non_hyperbolic;
    EqType etype = EqType::diagonal;
    double residual = 0.0;
};

struct EquilibriumCensus {
    int n_stable = 0;
    int n_unstable = 0;
    int n_saddle = 0;
    bool all_hyperbolic = true;
    std::optional<std::string> configuration_id;
};

struct EquilibriaOptions {
    int seed_grid = 64;        // N seeds per axis over [0, 2*pi)^2
    bool refine_check = true;  // re-run at 2N and compare root counts
    double merge_tol = 1e-6;   // torus distance below which roots coincide
    double residual_tol = 1e-10;
    double step_tol = 1e-12;
    int max_newton = 50;
    double nonhyperbolic_tol = 1e-8; // |Re lambda| below this means degenerate
};

/// Global equilibrium search: Newton iteration from an N x N seed grid over
/// [0, 2*pi)^2 plus a dedicated 1-D Newton pass along the invariant
/// diagonal. The returned list is deduplicated, closed under the swap
/// (a,b) -> (b,a), classified, and sorted lexicographically by (phi1, phi2).
/// Throws SeedGridTooCoarse when the N and 2N passes disagree on the count.
std::vector<Equilibrium> find_equilibria(const Params& p, const EquilibriaOptions& opt = {});

/// Fills eigenvalues and stability kind from the analytic Jacobian.
Equilibrium classify_equilibrium(Equilibrium e, const Params& p,
                                 double nonhyperbolic_tol = 1e-8);

/// Newton polish from a nearby guess; empty when the iteration does not
/// converge to a verified root.
std::optional<TorusState> refine_equilibrium(const TorusState& guess, const Params& p,
                                             double residual_tol = 1e-10);

/// Counts equilibria by kind and checks the torus index identity
/// n_saddle == n_stable + n_unstable (foci counted with nodes) whenever all
/// equilibria are hyperbolic. configuration_id is set when the counts match
/// one of the known weak-coupling configurations.
EquilibriumCensus census(const Params& p, const EquilibriaOptions& opt = {});
EquilibriumCensus census_of(const std::vector<Equilibrium>& eqs);

/// True iff the existence of an off-diagonal pair implies a diagonal root
/// holds for this parameter set (trivially true when no off-diagonal pair
/// exists).
bool check_property4(const Params& p, const EquilibriaOptions& opt = {});

inline bool saddle_kind(EqKind k) { return k == EqKind::saddle; }
inline bool stable_kind(EqKind k) {
    return k == EqKind::stable_node || k == EqKind::stable_focus;
}
inline bool unstable_kind(EqKind k) {
    return k == EqKind::unstable_node || k == EqKind::unstable_focus;
}

std::string to_string(EqKind k);
std::string to_string(EqType t);

} // namespace hco
