#pragma once

#include <cstdint>
#include <vector>

#include "sfa/schedule.hpp"

namespace sfa {

struct OptimizerConfig {
    int restarts = 10;
    int max_iterations = 2000;
    double gradient_tolerance = 1e-6;
    std::uint64_t seed = 1;
};

struct RestartStats {
    double initial_infidelity = 1.0;
    double final_fidelity = 0.0;
    double max_fidelity_seen = 0.0;
    int iterations = 0;
};

struct OptimizationResult {
    PulseSchedule best;
    double fidelity = 0.0;
    std::vector<RestartStats> restarts;   // indexed by restart number
    int best_restart = -1;
    int iterations = 0;                   // of the winning restart
    std::uint64_t seed = 0;
};

// 1 - |<target | run_schedule(p, c)>|^2.
double infidelity(const PulseSchedule& p, const CouplingSet& c, const StateVector& target);

// Analytic gradient of infidelity with respect to the schedule parameters in
// PulseSchedule::parameter_vector order (init alpha/beta per qubit, then per
// layer the per-group durations followed by alpha/beta/gamma per gate).
Eigen::VectorXd gradient(const PulseSchedule& p, const CouplingSet& c, const StateVector& target);

// Best-of-restarts L-BFGS descent on the canonical layered ansatz targeting
// the single-vertex state. The group must cover qubits {0..4}. Deterministic
// given (config.seed); restart r draws its start from a stream derived from
// (seed, r) only. Initial angles are uniform in [0, 2 pi), durations uniform
// in [50, 500] ns; durations are clamped to >= 0 throughout.
OptimizationResult optimize_single(const CouplingMatrix& c, int depth,
                                   const OptimizerConfig& cfg);

// Same ansatz on two disjoint 5-qubit groups ({0..4} and {5..9}) targeting
// the product of two vertex states, with each layer's entangling duration
// shared between the groups (exact equality).
OptimizationResult optimize_parallel(const CouplingMatrix& group_a, const CouplingMatrix& group_b,
                                     int depth, const OptimizerConfig& cfg);

}  // namespace sfa
