#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sfa/su2.hpp"

namespace sfa {

// Effective intra-group XY coupling g_i g_j / Delta + g_ij, all in MHz (g/2pi
// convention). Throws for Delta = 0.
double effective_coupling(double g_i_mhz, double g_j_mhz, double delta_mhz, double g_ij_mhz);

// One qubit group with its symmetric effective coupling matrix (g/2pi, MHz,
// zero diagonal). qubits are statevector indices, qubit 0 = leftmost label.
struct CouplingMatrix {
    std::string label;
    std::vector<int> qubits;
    Eigen::MatrixXd g_eff_mhz;

    void validate() const;  // throws on shape/symmetry/diagonal violations
};
using CouplingSet = std::vector<CouplingMatrix>;

// Pure statevector over n <= 10 qubits; basis index bit (n-1-q) holds qubit q,
// so qubit 0 is the most significant bit of the label |q0 q1 ... >.
class StateVector {
  public:
    explicit StateVector(int num_qubits);
    static StateVector from_amplitudes(Eigen::VectorXcd amplitudes);

    int qubits() const { return num_qubits_; }
    const Eigen::VectorXcd& data() const { return amps_; }
    Eigen::VectorXcd& data() { return amps_; }
    double norm() const { return amps_.norm(); }

    // R_beta(alpha) = exp(-i (alpha/2)(cos beta X + sin beta Y))
    void apply_rotation(int q, double alpha, double beta);
    // Z(gamma) = diag(1, e^{i gamma})
    void apply_phase(int q, double gamma);
    // Maps the Bloch state (theta, phi) on qubit q to |0> exactly:
    // U^{-1}(theta, phi) = R_{phi - pi/2}(theta).
    void apply_u_inverse(int q, double theta, double phi);
    // Fixed two-qubit unitary (H on qa after CNOT qa->qb) taking
    // (|00> + |11>)/sqrt2 to |00>.
    void apply_glue(int qa, int qb);

    void apply_one_qubit(int q, const Eigen::Matrix2cd& u);
    // Dense gate over the listed qubits (first listed = most significant bit
    // of the gate's own index space).
    void apply_dense(const std::vector<int>& qubits, const Eigen::MatrixXcd& u);

    double all_zero_probability() const;
    double fidelity_pure(const StateVector& target) const;   // |<target|s>|^2
    Complex overlap(const StateVector& target) const;        // <target|s>

  private:
    int num_qubits_;
    Eigen::VectorXcd amps_;
};

// exp(-i H tau) for H = sum_{i<j} w_ij (s+_i s-_j + s-_i s+_j), w_ij =
// 2 pi g_ij 1e-3 rad/ns, evaluated by exact eigendecomposition inside each
// excitation-number sector of the group.
class XYEvolution {
  public:
    explicit XYEvolution(CouplingMatrix coupling);

    const CouplingMatrix& coupling() const { return coupling_; }
    int group_size() const { return static_cast<int>(coupling_.qubits.size()); }

    Eigen::MatrixXcd unitary(double tau_ns) const;     // 2^k x 2^k
    void apply(StateVector& s, double tau_ns) const;
    // s -> H s in rad/ns units (for gradients of exp(-i H tau)).
    void apply_hamiltonian(StateVector& s) const;

  private:
    CouplingMatrix coupling_;
    std::vector<std::vector<int>> sector_states_;      // basis indices per sector
    std::vector<Eigen::MatrixXd> sector_vectors_;      // eigenvectors per sector
    std::vector<Eigen::VectorXd> sector_values_;       // eigenvalues (rad/ns)
    Eigen::MatrixXd dense_h_;                          // 2^k x 2^k, rad/ns
};

void apply_entangling(StateVector& s, const CouplingMatrix& c, double tau_ns);

// Circuit steps. A schedule is a flat list of these.
struct RotationStep { int q; double alpha; double beta; };
struct PhaseStep { int q; double gamma; };
struct EntangleStep { std::string group; double tau_ns; };
struct UInverseStep { int q; double theta; double phi; };
struct GlueStep { int qa; int qb; };
using GateStep = std::variant<RotationStep, PhaseStep, EntangleStep, UInverseStep, GlueStep>;

StateVector run_steps(const std::vector<GateStep>& steps, const CouplingSet& couplings,
                      int num_qubits);

// Two-level swap pattern P(|10> survival) over (detuning, time); both in the
// paper's units, g and detuning as linear-frequency MHz, time in ns. Rows are
// detunings, columns times.
Eigen::MatrixXd chevron_scan(double g_mhz, const std::vector<double>& detunings_mhz,
                             const std::vector<double>& times_ns);

// Dominant oscillation frequency per detuning row via a dense discrete
// Fourier scan; the minimum over detunings is 2g. Returns g in MHz.
double extract_coupling(const Eigen::MatrixXd& pattern, const std::vector<double>& times_ns);

// Full quantum state tomography of a 5-qubit state: all 3^5 prefix settings
// from {I, X/2, Y/2}, exact outcome probabilities (or multinomial shot
// sampling when shots > 0), linear inversion, then projection to the nearest
// PSD unit-trace matrix. Throws unless s has exactly 5 qubits.
Eigen::MatrixXcd simulate_qst(const StateVector& s, int shots_per_setting = 0,
                              std::uint64_t seed = 0);

// Tr(rho |psi><psi|) for a pure target.
double state_fidelity(const Eigen::MatrixXcd& rho, const StateVector& psi);

}  // namespace sfa
