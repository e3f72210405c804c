#pragma once

#include <stdexcept>

namespace hco {

/// Adaptive step controller stalled below the hard minimum step size.
struct StepSizeUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two successive seed-grid refinements disagree on the equilibrium count.
struct SeedGridTooCoarse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An integrand denominator vanishes somewhere on the integration domain.
struct IntegralSingular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A closed-form antiderivative was evaluated outside its real branch.
struct BranchInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A separatrix never entered the target saddle's section neighborhood.
struct NoApproach : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A bisection bracket does not actually bracket (same sign / same label).
struct BracketInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration (CLI / config file validation).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace hco
