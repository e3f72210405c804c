#pragma once

#include <array>
#include <functional>
#include <vector>

#include "hco/model.hpp"

namespace hco {

/// Tolerances and horizons for trajectory integration. max_step must stay
/// at or below ~1/k so the sigmoid walls of the coupling (angular width
/// O(1/k)) are always sampled; defaults_for() uses 0.2/k.
struct IntegratorSettings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-9;
    double max_step = 0.004;
    double t_transient = 200.0;
    double t_max = 2000.0;

    // Optional analytic step limiter: away from the coupling edges (phi =
    // alpha, alpha + delta) the field is as smooth as sin, so the step may
    // grow to max_step_plateau; approaching an edge it is capped so the
    // wall is entered gently and crossed at the dense wall step. Geometry
    // guarantees a wall can never be jumped over. Used by bulk sweeps.
    bool wall_aware = false;
    double max_step_plateau = 0.05;

    static IntegratorSettings defaults_for(const Params& p);
    /// Relaxed settings for bulk regime classification.
    static IntegratorSettings sweep_fast(const Params& p);
};

enum class EventKind { spike1, spike2, section };

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::section;
    int element = 0; // 1 or 2 for spikes, 0 for the section
    TorusState state;
};

enum class Direction { forward, backward };

/// Sampled solution. States are stored as unwrapped lifts together with the
/// field value at each sample, which makes the trajectory a C1 interpolant
/// (cubic Hermite per step). Wrapped phases are always lift mod 2*pi.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::array<double, 2>> lifts;
    std::vector<std::array<double, 2>> derivs;
    std::vector<Event> events;
    Direction direction = Direction::forward;

    std::size_t size() const { return times.size(); }
    TorusState state_at(std::size_t i) const;
    /// Hermite-interpolated lifts at an arbitrary time inside the span.
    std::array<double, 2> lifts_at_time(double t) const;
    TorusState state_at_time(double t) const;
};

/// One accepted step of the embedded RK5(4) pair, with 4th-order dense
/// output over [t0, t0+h].
struct StepView {
    double t0 = 0.0;
    double h = 0.0;
    std::array<double, 2> y0{}, y1{};
    std::array<double, 2> f0{}, f1{};
    const std::array<std::array<double, 2>, 5>* rcont = nullptr;

    std::array<double, 2> eval(double theta) const {
        const auto& r = *rcont;
        std::array<double, 2> out{};
        const double t1 = 1.0 - theta;
        for (int i = 0; i < 2; ++i)
            out[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
        return out;
    }
};

using StepCallback = std::function<bool(const StepView&)>;

/// Core adaptive integrator (Dormand-Prince 5(4), FSAL). Invokes on_step
/// after every accepted step; returning false stops the run. For
/// Direction::backward the sign-flipped field is integrated, i.e. the step
/// times parametrize the reversed flow. Throws StepSizeUnderflow if the
/// controller stalls below 1e-14.
void integrate_steps(const TorusState& s0, const Params& p, const IntegratorSettings& set,
                     double t_end, const StepCallback& on_step,
                     Direction dir = Direction::forward);

/// Convenience wrapper: integrate over [0, t_end], store every accepted
/// step and attach the refined event list (spikes of both elements and
/// section crossings).
Trajectory integrate(const TorusState& s0, const Params& p, const IntegratorSettings& set,
                     double t_end, Direction dir = Direction::forward);

/// Root-refined upward crossings for one event kind (time accuracy 1e-9).
/// Spike events are upward passages of phi_i through pi (lift through
/// pi + 2*pi*n); the section event is the same passage of phi1.
std::vector<Event> detect_events(const Trajectory& tr, EventKind kind);

} // namespace hco
