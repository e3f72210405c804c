#pragma once

#include <utility>
#include <vector>

#include "hco/cycles.hpp"
#include "hco/equilibria.hpp"
#include "hco/integrator.hpp"

namespace hco {

enum class BranchType { unstable_plus, unstable_minus, stable_plus, stable_minus };
enum class TerminusKind { equilibrium, cycle, section_exit, budget_exhausted };

/// One saddle manifold branch. The path is seeded at the saddle offset by
/// seed_offset along the unit eigenvector; stable branches are integrated
/// in reversed time (path.direction records it).
struct Separatrix {
    std::size_t origin = 0; // index into the equilibria list passed in
    BranchType branch = BranchType::unstable_plus;
    Trajectory path;
    TerminusKind terminus = TerminusKind::budget_exhausted;
    int terminus_index = -1; // equilibrium or cycle id, -1 otherwise
};

struct ConnectionGap {
    std::size_t from_saddle = 0;
    std::size_t to_saddle = 0;
    double signed_gap = 0.0;
    double t_cross = 0.0;
};

struct PortraitOptions {
    double seed_offset = 1e-6;   // eigenvector seeding distance
    double proximity = 1e-4;     // terminus proximity threshold
    double section_radius = 0.3; // neighborhood for the connection section
    double store_dt = 0.02;      // path sample thinning
};

/// Unit eigenvectors of the saddle linearization: (stable, unstable), each
/// with a canonical sign (first nonzero component positive).
std::pair<std::array<double, 2>, std::array<double, 2>> saddle_frame(const Equilibrium& saddle,
                                                                     const Params& p);

/// All four separatrix branches of one saddle. Termini are classified by
/// proximity to the supplied equilibria and cycles, or budget exhaustion.
std::vector<Separatrix> trace_separatrices(std::size_t saddle_index,
                                           const std::vector<Equilibrium>& eqs, const Params& p,
                                           const IntegratorSettings& set,
                                           const std::vector<LimitCycle>& cycles = {},
                                           const PortraitOptions& opt = {});

/// Signed transverse distance between the arriving unstable separatrix of
/// `from` and the stable manifold of `to`, measured where the separatrix
/// crosses the local section through `to` orthogonal to its stable
/// eigenvector. Zero exactly at a heteroclinic connection; the sign flips
/// across it. Throws NoApproach when no unstable branch of `from` enters
/// the section neighborhood.
ConnectionGap connection_gap(std::size_t from_index, std::size_t to_index,
                             const std::vector<Equilibrium>& eqs, const Params& p,
                             const IntegratorSettings& set, const PortraitOptions& opt = {});

enum class SaddlePair { offdiag_swap, diagonal, diag_to_offdiag };

/// Bisection on one parameter axis for a heteroclinic connection between
/// the selected saddle pair: stops at |gap| < 1e-6 or bracket width 1e-8.
/// Throws BracketInvalid when the end gaps share their sign.
double locate_connection(ParamAxis axis, std::pair<double, double> bracket, const Params& p,
                         const IntegratorSettings& set, SaddlePair pair = SaddlePair::offdiag_swap,
                         const PortraitOptions& opt = {});

/// Saddle-to-saddle connections lying on the invariant diagonal, decided by
/// 1-D sign analysis of the diagonal field between consecutive diagonal
/// equilibria. Returns (from, to) index pairs.
std::vector<std::pair<std::size_t, std::size_t>> diagonal_connections(
    const std::vector<Equilibrium>& eqs, const Params& p);

std::string to_string(BranchType b);
std::string to_string(TerminusKind t);

} // namespace hco
