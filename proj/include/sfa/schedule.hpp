#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfa/qsim.hpp"

namespace sfa {

// Initialization stage plus d layers; each layer is one entangling evolution
// per group followed by a rotation and a phase gate on every qubit.
struct InitRotation {
    int q;
    double alpha;
    double beta;
};

struct LayerGate {
    int q;
    double alpha;
    double beta;
    double gamma;
};

struct ScheduleLayer {
    // shared duration, or one per group label; exactly one of the two is used
    std::optional<double> tau_ns;
    std::map<std::string, double> tau_ns_by_group;
    std::vector<LayerGate> gates;

    double tau_for(const std::string& group) const;
};

struct PulseSchedule {
    std::vector<InitRotation> init;
    std::vector<ScheduleLayer> layers;

    int depth() const { return static_cast<int>(layers.size()); }
    // 2 n_q + d (n_groups + 3 n_q) entries: init (alpha, beta) per qubit, then
    // per layer the group durations (coupling-set order) and (alpha, beta,
    // gamma) per qubit.
    std::vector<double> parameter_vector(const CouplingSet& couplings) const;
};

// Expansion into executable steps: init rotations, then per layer one
// entangling step per group (coupling-set order) followed by the layer gates.
std::vector<GateStep> schedule_steps(const PulseSchedule& schedule, const CouplingSet& couplings);

StateVector run_schedule(const PulseSchedule& schedule, const CouplingSet& couplings,
                         int num_qubits);

// JSON formats:
//   schedule: {"init":[{"q","alpha","beta"}...],
//              "layers":[{"tau_ns": t | "tau_ns_by_group": {label: t},
//                         "gates":[{"q","alpha","beta","gamma"}...]}...]}
//   couplings: {"groups":[{"label","qubits":[...],"g_eff_mhz":[[...]...]}...]}
PulseSchedule schedule_from_json_text(const std::string& text);
std::string schedule_to_json_text(const PulseSchedule& schedule,
                                  const std::map<std::string, double>& metadata = {});
CouplingSet couplings_from_json_text(const std::string& text);
std::string couplings_to_json_text(const CouplingSet& couplings);

PulseSchedule load_schedule(const std::string& path);
CouplingSet load_couplings(const std::string& path);

int num_qubits_for(const CouplingSet& couplings);

}  // namespace sfa
