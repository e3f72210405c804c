#pragma once

#include <optional>
#include <vector>

#include "hco/equilibria.hpp"
#include "hco/integrator.hpp"
#include "hco/model.hpp"

namespace hco {

enum class PhaseClass { in_phase, anti_phase, other };

/// A periodic orbit on the torus. samples holds one period resampled at
/// uniform times (2048 points) via dense output; winding counts the net
/// turns of each phase per period; floquet is the nontrivial multiplier
/// estimated from the scalar return map, floquet_trace the same quantity
/// via Liouville's formula exp(integral of tr J dt) along the orbit.
struct LimitCycle {
    double period = 0.0;
    std::array<int, 2> winding{0, 0};
    std::vector<TorusState> samples;
    PhaseClass phase_class = PhaseClass::other;
    double floquet = 0.0;
    double floquet_trace = 0.0;
    bool stable = false;
    bool neutral = false;
    double section_phi2 = 0.0; // fixed point of the return map on phi1 = pi
    int section_count = 1;     // section crossings per period
    double closure = 0.0;      // torus distance between first and last sample
};

enum class DetectOutcome { cycle, equilibrium, undecided };

struct CycleDetection {
    DetectOutcome outcome = DetectOutcome::undecided;
    std::optional<LimitCycle> cycle;
    std::optional<TorusState> endpoint; // resting state for the equilibrium outcome
    double t_used = 0.0;
};

/// Forward integration until the trajectory settles: builds the return map
/// on the section phi1 = pi (globally transverse: phi1' = gamma + d I > 0
/// there) and declares a cycle when successive crossings repeat within 1e-9,
/// or an equilibrium when the endpoint speed drops below 1e-8. Neither by
/// t_max -> undecided, never silently dropped. A recurrence fallback covers
/// orbits that avoid the section.
CycleDetection detect_cycle(const TorusState& s0, const Params& p,
                            const IntegratorSettings& set);

/// Builds the full cycle object from a section point (pi, y_star) that is a
/// (near-)fixed point of the m-th return map.
LimitCycle realize_cycle(const Params& p, const IntegratorSettings& set, double y_star,
                         int m_crossings = 1);

/// Same, from an arbitrary on-cycle state and a known period (used for the
/// recurrence-detected cycles that avoid the section). Stability comes from
/// the Liouville multiplier.
LimitCycle realize_cycle_from_state(const Params& p, const IntegratorSettings& set,
                                    const TorusState& start, double period);

/// In-phase / anti-phase / other, tested on the uniform resampling:
/// in-phase when max_t dist(phi1(t), phi2(t)) < 1e-3, anti-phase when
/// max_t dist(phi1(t), phi2(t + T/2)) < 1e-3.
PhaseClass classify_cycle(const LimitCycle& c);

/// Derivative of the scalar return map at its fixed point by centered
/// differencing with the given offsets on the section.
double floquet_multiplier(const LimitCycle& c, const Params& p, const IntegratorSettings& set,
                          double offset = 1e-6);

/// The diagonal carries an in-phase cycle exactly when the diagonal
/// restriction gamma - sin(phi) + d I(phi) has no zero. Works for stable and
/// unstable cycles alike (the diagonal is invariant).
std::optional<LimitCycle> find_inphase_cycle(const Params& p, const IntegratorSettings& set);

/// Root-finds the symmetric fixed point of the half-return map (section
/// phi1 = pi to section phi2 = pi), which an anti-phase cycle crosses at
/// (pi, y*) -> (y*, pi). Finds unstable anti-phase cycles too.
std::optional<LimitCycle> find_antiphase_cycle(const Params& p, const IntegratorSettings& set);

/// LHS - RHS of the transit-time balance: integral over
/// (asin gamma, pi - asin gamma) of dphi/(gamma + d - sin phi) minus the
/// integral over (alpha, alpha + delta) of dphi/(gamma - sin phi), each by
/// adaptive quadrature to 1e-10. Throws IntegralSingular when an integrand
/// denominator vanishes on its domain (this also covers gamma + d < 1).
double antiphase_condition_quadrature(const Params& p);

/// Closed-form evaluation of the same residual via the half-angle
/// antiderivatives. Valid on the real arctanh branch only; throws
/// BranchInvalid when an arctanh argument leaves (-1, 1) or the arc crosses
/// the tangent singularity, and IntegralSingular when the integrand itself
/// is singular on the arc. Callers fall back to the quadrature form.
double antiphase_condition_closed_form(const Params& p);

// --- shared low-level machinery (also used by portrait / regimes) ---

struct SectionCrossing {
    double t = 0.0;
    double other = 0.0; // wrapped phase of the other component
    std::array<double, 2> lift{};
};

/// Upward crossings of wrapped phi[comp] through pi inside one accepted
/// step, refined on the dense output.
void crossings_in_step(const StepView& v, int comp, std::vector<SectionCrossing>& out);

struct RunOptions {
    const std::vector<Equilibrium>* known_equilibria = nullptr; // stable ones shortcut
    const std::vector<LimitCycle>* known_cycles = nullptr;
    double proximity = 1e-4;
};

struct RunOutcome {
    enum class Kind { equilibrium, cycle, known_equilibrium, known_cycle, undecided } kind =
        Kind::undecided;
    TorusState endpoint;
    double y_star = 0.0;
    double period = 0.0;
    int m = 1;
    int known_index = -1;
    double t_used = 0.0;
    bool via_recurrence = false;
};

/// The attractor-resolution engine behind detect_cycle and the regime
/// classifier. Proximity shortcuts to already-known attractors are applied
/// only when the corresponding lists are supplied.
RunOutcome run_to_attractor(const TorusState& s0, const Params& p,
                            const IntegratorSettings& set, const RunOptions& opt = {});

std::string to_string(PhaseClass c);

} // namespace hco
