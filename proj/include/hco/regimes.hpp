#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hco/cycles.hpp"
#include "hco/equilibria.hpp"

namespace hco {

/// A: in-phase spiking, B: excitable (only stable equilibria), C: anti-phase
/// spiking, D: bistable (anti-phase cycle + stable equilibrium).
enum class RegimeLabel { A, B, C, D, OTHER, UNDECIDED };

struct RegimeAttractor {
    enum class Type { equilibrium, cycle } type = Type::equilibrium;
    TorusState location;
    PhaseClass pclass = PhaseClass::other; // cycles only
    double period = 0.0;
    double section_phi2 = 0.0;
    bool neutral = false;
    int votes = 0;
};

struct RegimeReport {
    RegimeLabel label = RegimeLabel::UNDECIDED;
    int stable_equilibria = 0; // distinct stable equilibria actually reached
    std::vector<std::pair<PhaseClass, double>> stable_cycles;
    std::vector<std::pair<std::string, double>> basin_votes; // id -> fraction, sums to 1
    std::vector<RegimeAttractor> attractors;
    int total_runs = 0;
    int undecided_runs = 0;
    int saddle_limit_runs = 0;   // degenerate ICs that settled on a saddle
    int unstable_cycle_runs = 0; // degenerate ICs riding a non-attracting cycle
};

/// Integrates an ic_grid x ic_grid lattice of initial conditions plus
/// diagonal points and near-saddle probes, resolves every run to an
/// attractor (or Undecided), deduplicates attractors and assigns the label
/// from the exact inventory of reached attractor classes.
RegimeReport classify_regime(const Params& p, int ic_grid, const IntegratorSettings& set);

struct SweepCell {
    RegimeLabel label = RegimeLabel::UNDECIDED;
    int n_stable_eq = 0; // stable equilibria reached by the classifier
    int n_cycles = 0;    // distinct cycles reached
    // Inventory fields (filled when SweepOptions::inventory is set):
    int census_stable = 0, census_unstable = 0, census_saddle = 0;
    bool has_inphase = false;   // in-phase cycle exists, any stability
    bool has_antiphase = false; // anti-phase cycle exists, any stability
};

struct SweepGrid {
    std::pair<double, double> alpha_range{0.0, two_pi};
    std::pair<double, double> delta_range{0.0, two_pi};
    int n1 = 0, n2 = 0;
    std::vector<SweepCell> cells; // index = j * n1 + i  (i: alpha, j: delta)
    bool inventory = false;
    Params base;

    const SweepCell& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * n1 + i]; }
    double alpha_of(int i) const {
        return alpha_range.first + (i + 0.5) * (alpha_range.second - alpha_range.first) / n1;
    }
    double delta_of(int j) const {
        return delta_range.first + (j + 0.5) * (delta_range.second - delta_range.first) / n2;
    }
};

struct SweepOptions {
    int ic_grid = 4;
    bool inventory = false;
    int jobs = 1;
    bool use_default_settings = false; // otherwise IntegratorSettings::sweep_fast
};

/// Classifies every cell of the (alpha, delta) plane; cells are independent
/// and the assembled grid is deterministic (index order).
SweepGrid sweep_plane(std::pair<double, double> alpha_range, std::pair<double, double> delta_range,
                      int n1, int n2, const Params& p, const SweepOptions& opt = {});

struct LocatedBoundary {
    double value = 0.0;
    RegimeLabel left = RegimeLabel::UNDECIDED;
    RegimeLabel right = RegimeLabel::UNDECIDED;
};

/// Bisection on the regime label along one parameter axis, to bracket width
/// 1e-4. Throws BracketInvalid when the end labels agree.
LocatedBoundary locate_boundary(ParamAxis axis, std::pair<double, double> bracket,
                                const Params& p, int ic_grid, const IntegratorSettings& set);

/// Fraction of interior cells whose invariant-set inventory (equilibrium
/// counts and cycle phase classes, stability ignored) differs from the cell
/// at alpha' = pi - alpha - delta. Requires a full-plane sweep with
/// inventory enabled; label-boundary cells are excluded.
double symmetry_fold(const SweepGrid& grid);

std::string to_string(RegimeLabel l);

} // namespace hco
