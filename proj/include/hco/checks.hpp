#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hco {

struct CheckOptions {
    int n_param_sets = 200;    // randomized parameter sets for the cheap checks
    int n_states = 100;        // random states per set where applicable
    int n_mirror_sets = 50;    // equilibrium mirror-conjugacy sample
    int n_cycle_mirror_sets = 30;
    int n_reversible_sets = 20; // per reversible line
    int n_uniqueness_sets = 200;
    int n_uniqueness_ics = 25;
    std::uint64_t seed = 7041831;
    bool verbose = false;
};

struct PropertyResult {
    std::string name;
    bool passed = false;
    int checked = 0;    // individual comparisons performed
    double worst = 0.0; // worst observed defect (property-specific units)
    std::string detail;
};

/// Runs the structural property suite on randomized parameter sets
/// (gamma = 0.7, k = 50, d in (0, 1.5], alpha and delta uniform).
/// Deterministic for a fixed seed.
std::vector<PropertyResult> run_property_suite(const CheckOptions& opt = {});

} // namespace hco
