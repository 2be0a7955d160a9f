#include "sfa/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace sfa {

namespace {

constexpr double kTwoPiMhzNs = 2.0 * std::numbers::pi * 1e-3;  // rad/ns per MHz

Eigen::Matrix2cd rotation_matrix(double alpha, double beta) {
    double c = std::cos(alpha / 2.0), s = std::sin(alpha / 2.0);
    Complex e_minus = std::exp(Complex(0.0, -beta));
    Eigen::Matrix2cd m;
    m << c, Complex(0.0, -s) * e_minus, Complex(0.0, -s) * std::conj(e_minus), c;
    return m;
}

}  // namespace

double effective_coupling(double g_i_mhz, double g_j_mhz, double delta_mhz, double g_ij_mhz) {
    if (delta_mhz == 0.0) throw std::invalid_argument("effective_coupling: zero detuning");
    return g_i_mhz * g_j_mhz / delta_mhz + g_ij_mhz;
}

void CouplingMatrix::validate() const {
    const auto n = static_cast<Eigen::Index>(qubits.size());
    if (n == 0) throw std::invalid_argument("CouplingMatrix: empty qubit list");
    if (g_eff_mhz.rows() != n || g_eff_mhz.cols() != n) {
        throw std::invalid_argument("CouplingMatrix: matrix shape does not match qubit count");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (g_eff_mhz(i, i) != 0.0) throw std::invalid_argument("CouplingMatrix: nonzero diagonal");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (g_eff_mhz(i, j) != g_eff_mhz(j, i)) {
                throw std::invalid_argument("CouplingMatrix: matrix not symmetric");
            }
        }
    }
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] < 0) throw std::invalid_argument("CouplingMatrix: negative qubit index");
        for (std::size_t j = i + 1; j < qubits.size(); ++j) {
            if (qubits[i] == qubits[j]) throw std::invalid_argument("CouplingMatrix: repeated qubit");
        }
    }
}

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > 10) {
        throw std::invalid_argument("StateVector: qubit count must be in [1, 10]");
    }
    amps_ = Eigen::VectorXcd::Zero(1 << num_qubits);
    amps_(0) = 1.0;
}

StateVector StateVector::from_amplitudes(Eigen::VectorXcd amplitudes) {
    const auto dim = amplitudes.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("StateVector: dimension must be a power of two");
    }
    double n = amplitudes.norm();
    if (std::abs(n - 1.0) > 1e-10) {
        throw std::invalid_argument("StateVector: amplitudes must be normalized");
    }
    StateVector s(std::bit_width(static_cast<unsigned>(dim)) - 1);
    s.amps_ = std::move(amplitudes);
    return s;
}

void StateVector::apply_one_qubit(int q, const Eigen::Matrix2cd& u) {
    if (q < 0 || q >= num_qubits_) throw std::invalid_argument("qubit index out of range");
    const int bit = num_qubits_ - 1 - q;
    const int stride = 1 << bit;
    const int dim = static_cast<int>(amps_.size());
    for (int base = 0; base < dim; base += 2 * stride) {
        for (int k = 0; k < stride; ++k) {
            Complex a0 = amps_(base + k);
            Complex a1 = amps_(base + k + stride);
            amps_(base + k) = u(0, 0) * a0 + u(0, 1) * a1;
            amps_(base + k + stride) = u(1, 0) * a0 + u(1, 1) * a1;
        }
    }
}

void StateVector::apply_rotation(int q, double alpha, double beta) {
    apply_one_qubit(q, rotation_matrix(alpha, beta));
}

void StateVector::apply_phase(int q, double gamma) {
    if (q < 0 || q >= num_qubits_) throw std::invalid_argument("qubit index out of range");
    const int bit = num_qubits_ - 1 - q;
    const Complex phase = std::exp(Complex(0.0, gamma));
    for (int i = 0; i < amps_.size(); ++i) {
        if ((i >> bit) & 1) amps_(i) *= phase;
    }
}

void StateVector::apply_u_inverse(int q, double theta, double phi) {
    apply_rotation(q, theta, phi - std::numbers::pi / 2.0);
}

void StateVector::apply_glue(int qa, int qb) {
    if (qa == qb) throw std::invalid_argument("apply_glue: qubits must differ");
    static const Eigen::Matrix4cd u = [] {
        Eigen::Matrix4cd cnot = Eigen::Matrix4cd::Zero();
        cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
        Eigen::Matrix2cd h;
        h << 1, 1, 1, -1;
        h /= std::sqrt(2.0);
        Eigen::Matrix4cd h_first = Eigen::Matrix4cd::Zero();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) h_first(2 * i + k, 2 * j + k) = h(i, j);
        return Eigen::Matrix4cd(h_first * cnot);
    }();
    apply_dense({qa, qb}, u);
}

void StateVector::apply_dense(const std::vector<int>& qubits, const Eigen::MatrixXcd& u) {
    const int k = static_cast<int>(qubits.size());
    const Eigen::Index gate_dim = Eigen::Index(1) << k;
    if (u.rows() != gate_dim || u.cols() != gate_dim) {
        throw std::invalid_argument("apply_dense: matrix size does not match qubit count");
    }
    std::vector<int> bits;
    for (int q : qubits) {
        if (q < 0 || q >= num_qubits_) throw std::invalid_argument("qubit index out of range");
        bits.push_back(num_qubits_ - 1 - q);
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (bits[static_cast<std::size_t>(i)] == bits[static_cast<std::size_t>(j)])
                throw std::invalid_argument("apply_dense: repeated qubit");

    int group_mask = 0;
    for (int b : bits) group_mask |= 1 << b;
    const int dim = static_cast<int>(amps_.size());
    Eigen::VectorXcd gathered(gate_dim), mixed(gate_dim);
    for (int outer = 0; outer < dim; ++outer) {
        if (outer & group_mask) continue;  // enumerate states with group bits clear
        for (int g = 0; g < gate_dim; ++g) {
            int idx = outer;
            for (int i = 0; i < k; ++i) {
                if ((g >> (k - 1 - i)) & 1) idx |= 1 << bits[static_cast<std::size_t>(i)];
            }
            gathered(g) = amps_(idx);
        }
        mixed.noalias() = u * gathered;
        for (int g = 0; g < gate_dim; ++g) {
            int idx = outer;
            for (int i = 0; i < k; ++i) {
                if ((g >> (k - 1 - i)) & 1) idx |= 1 << bits[static_cast<std::size_t>(i)];
            }
            amps_(idx) = mixed(g);
        }
    }
}

double StateVector::all_zero_probability() const { return std::norm(amps_(0)); }

double StateVector::fidelity_pure(const StateVector& target) const {
    return std::norm(overlap(target));
}

Complex StateVector::overlap(const StateVector& target) const {
    if (target.num_qubits_ != num_qubits_) {
        throw std::invalid_argument("overlap: qubit counts differ");
    }
    return target.amps_.dot(amps_);
}

XYEvolution::XYEvolution(CouplingMatrix coupling) : coupling_(std::move(coupling)) {
    coupling_.validate();
    const int k = group_size();
    const int dim = 1 << k;
    dense_h_ = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            double w = kTwoPiMhzNs * coupling_.g_eff_mhz(i, j);
            if (w == 0.0) continue;
            // hop between group-local bits (bit 0 of the gate index = last qubit)
            for (int idx = 0; idx < dim; ++idx) {
                int bi = (idx >> (k - 1 - i)) & 1, bj = (idx >> (k - 1 - j)) & 1;
                if (bi == 1 && bj == 0) {
                    int jdx = idx ^ (1 << (k - 1 - i)) ^ (1 << (k - 1 - j));
                    dense_h_(jdx, idx) += w;
                    dense_h_(idx, jdx) += w;
                }
            }
        }
    }
    sector_states_.resize(static_cast<std::size_t>(k) + 1);
    for (int idx = 0; idx < dim; ++idx) {
        sector_states_[static_cast<std::size_t>(std::popcount(static_cast<unsigned>(idx)))].push_back(idx);
    }
    for (const auto& states : sector_states_) {
        const auto m = static_cast<Eigen::Index>(states.size());
        Eigen::MatrixXd h(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < m; ++c)
                h(r, c) = dense_h_(states[static_cast<std::size_t>(r)], states[static_cast<std::size_t>(c)]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
        sector_vectors_.push_back(solver.eigenvectors());
        sector_values_.push_back(solver.eigenvalues());
    }
}

Eigen::MatrixXcd XYEvolution::unitary(double tau_ns) const {
    const int dim = 1 << group_size();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t s = 0; s < sector_states_.size(); ++s) {
        const auto& states = sector_states_[s];
        Eigen::MatrixXcd v = sector_vectors_[s].cast<Complex>();
        Eigen::VectorXcd phases =
            (sector_values_[s].array().cast<Complex>() * Complex(0.0, -tau_ns)).exp().matrix();
        Eigen::MatrixXcd block = v * phases.asDiagonal() * v.transpose();
        for (std::size_t r = 0; r < states.size(); ++r)
            for (std::size_t c = 0; c < states.size(); ++c)
                u(states[r], states[c]) = block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    return u;
}

void XYEvolution::apply(StateVector& s, double tau_ns) const {
    s.apply_dense(coupling_.qubits, unitary(tau_ns));
}

void XYEvolution::apply_hamiltonian(StateVector& s) const {
    s.apply_dense(coupling_.qubits, dense_h_.cast<Complex>());
}

void apply_entangling(StateVector& s, const CouplingMatrix& c, double tau_ns) {
    XYEvolution(c).apply(s, tau_ns);
}

StateVector run_steps(const std::vector<GateStep>& steps, const CouplingSet& couplings,
                      int num_qubits) {
    std::vector<XYEvolution> evolutions;
    evolutions.reserve(couplings.size());
    for (const auto& c : couplings) evolutions.emplace_back(c);
    auto find_group = [&](const std::string& label) -> const XYEvolution& {
        for (const auto& ev : evolutions) {
            if (ev.coupling().label == label) return ev;
        }
        throw std::invalid_argument("run_steps: unknown group '" + label + "'");
    };
    StateVector s(num_qubits);
    for (const auto& step : steps) {
        std::visit(
            [&](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, RotationStep>) {
                    s.apply_rotation(g.q, g.alpha, g.beta);
                } else if constexpr (std::is_same_v<T, PhaseStep>) {
                    s.apply_phase(g.q, g.gamma);
                } else if constexpr (std::is_same_v<T, EntangleStep>) {
                    if (g.tau_ns < 0.0) throw std::invalid_argument("run_steps: negative duration");
                    find_group(g.group).apply(s, g.tau_ns);
                } else if constexpr (std::is_same_v<T, UInverseStep>) {
                    s.apply_u_inverse(g.q, g.theta, g.phi);
                } else {
                    s.apply_glue(g.qa, g.qb);
                }
            },
            step);
    }
    return s;
}

Eigen::MatrixXd chevron_scan(double g_mhz, const std::vector<double>& detunings_mhz,
                             const std::vector<double>& times_ns) {
    if (detunings_mhz.empty() || times_ns.empty()) {
        throw std::invalid_argument("chevron_scan: empty grid");
    }
    const double gw = kTwoPiMhzNs * g_mhz;
    Eigen::MatrixXd out(static_cast<Eigen::Index>(detunings_mhz.size()),
                        static_cast<Eigen::Index>(times_ns.size()));
    for (std::size_t r = 0; r < detunings_mhz.size(); ++r) {
        const double dw = kTwoPiMhzNs * detunings_mhz[r];
        const double omega2 = dw * dw + 4.0 * gw * gw;
        const double omega = std::sqrt(omega2);
        const double depth = omega2 > 0.0 ? 4.0 * gw * gw / omega2 : 0.0;
        for (std::size_t c = 0; c < times_ns.size(); ++c) {
            double sn = std::sin(0.5 * omega * times_ns[c]);
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 1.0 - depth * sn * sn;
        }
    }
    return out;
}

namespace {

double fourier_amplitude(const Eigen::VectorXd& y, const std::vector<double>& times_ns, double w) {
    Complex acc = 0.0;
    for (Eigen::Index c = 0; c < y.size(); ++c) {
        acc += y(c) * std::exp(Complex(0.0, -w * times_ns[static_cast<std::size_t>(c)]));
    }
    return std::abs(acc);
}

double fourier_peak(const Eigen::VectorXd& y, const std::vector<double>& times_ns,
                    double w_lo, double w_hi, int points) {
    double peak_amp = -1.0, peak_w = w_lo;
    for (int k = 0; k <= points; ++k) {
        double w = w_lo + (w_hi - w_lo) * k / points;
        double amp = fourier_amplitude(y, times_ns, w);
        if (amp > peak_amp) {
            peak_amp = amp;
            peak_w = w;
        }
    }
    return peak_w;
}

}  // namespace

double extract_coupling(const Eigen::MatrixXd& pattern, const std::vector<double>& times_ns) {
    if (pattern.rows() < 1 || pattern.cols() < 4 ||
        pattern.cols() != static_cast<Eigen::Index>(times_ns.size())) {
        throw std::invalid_argument("extract_coupling: degenerate grid");
    }
    // coarse Fourier scan up to 40 MHz, then a refinement pass around the peak
    const double f_max = kTwoPiMhzNs * 40.0;
    const int coarse = 2000;
    double best_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < pattern.rows(); ++r) {
        Eigen::VectorXd y = pattern.row(r);
        y.array() -= y.mean();
        double w0 = fourier_peak(y, times_ns, f_max / coarse, f_max, coarse - 1);
        double half_bin = f_max / coarse;
        double w = fourier_peak(y, times_ns, std::max(w0 - half_bin, 1e-9), w0 + half_bin, 400);
        best_min = std::min(best_min, w);
    }
    // oscillation angular frequency Omega = 2g on resonance
    return best_min / 2.0 / kTwoPiMhzNs;
}

namespace {

// nearest PSD unit-trace matrix in Frobenius norm: clip negative eigenvalues
// and redistribute the deficit over the remaining ones
Eigen::MatrixXcd psd_project(const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
    Eigen::VectorXd ev = solver.eigenvalues();  // ascending
    const Eigen::Index d = ev.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
    double deficit = 0.0;
    // walk from the smallest up, zeroing negatives (after redistribution)
    for (Eigen::Index i = 0; i < d; ++i) {
        double share = deficit / static_cast<double>(d - i);
        if (ev(i) + share < 0.0) {
            deficit += ev(i);
        } else {
            for (Eigen::Index j = i; j < d; ++j) out(j) = ev(j) + share;
            break;
        }
    }
    return solver.eigenvectors() * out.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

Eigen::MatrixXcd simulate_qst(const StateVector& s, int shots_per_setting, std::uint64_t seed) {
    if (s.qubits() != 5) throw std::invalid_argument("simulate_qst: expects a 5-qubit state");
    const int n = 5;
    const int dim = 32;

    // prefix gates: 0 = I, 1 = X/2 (measures +Y), 2 = Y/2 (measures -X)
    const Eigen::Matrix2cd gates[3] = {Eigen::Matrix2cd::Identity(),
                                       rotation_matrix(std::numbers::pi / 2.0, 0.0),
                                       rotation_matrix(std::numbers::pi / 2.0, std::numbers::pi / 2.0)};
    // Pauli letter -> (setting, sign): Z measured by I, Y by X/2, X by -Y/2
    const int letter_setting[4] = {0, 2, 1, 0};
    const double letter_sign[4] = {1.0, -1.0, 1.0, 1.0};

    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> probs(243);
    for (int setting = 0; setting < 243; ++setting) {
        StateVector rotated = s;
        int code = setting;
        for (int q = 0; q < n; ++q) {
            int g = code % 3;
            code /= 3;
            if (g != 0) rotated.apply_one_qubit(q, gates[g]);
        }
        Eigen::VectorXd p = rotated.data().cwiseAbs2();
        if (shots_per_setting > 0) {
            // multinomial draw via sequential binomials
            Eigen::VectorXd counts = Eigen::VectorXd::Zero(dim);
            double remaining_p = 1.0;
            int remaining_n = shots_per_setting;
            for (int i = 0; i < dim && remaining_n > 0; ++i) {
                double q = std::clamp(p(i) / remaining_p, 0.0, 1.0);
                std::binomial_distribution<int> bin(remaining_n, q);
                int c = (i == dim - 1) ? remaining_n : bin(rng);
                counts(i) = c;
                remaining_n -= c;
                remaining_p = std::max(remaining_p - p(i), 1e-300);
            }
            p = counts / static_cast<double>(shots_per_setting);
        }
        probs[static_cast<std::size_t>(setting)] = p;
    }

    const Eigen::Matrix2cd pauli_mats[4] = {
        Eigen::Matrix2cd::Identity(),
        (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(),
        (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished(),
        (Eigen::Matrix2cd() << 1, 0, 0, -1).finished()};

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (int code = 0; code < 1024; ++code) {
        int letters[5];
        int c = code;
        for (int q = n - 1; q >= 0; --q) {
            letters[q] = c % 4;
            c /= 4;
        }
        // setting index uses the same digit order as the measurement loop
        int setting = 0;
        double sign = 1.0;
        int weight = 1;
        for (int q = 0; q < n; ++q) {
            setting += letter_setting[letters[q]] * weight;
            weight *= 3;
            sign *= letters[q] == 0 ? 1.0 : letter_sign[letters[q]];
        }
        const Eigen::VectorXd& p = probs[static_cast<std::size_t>(setting)];
        double ev = 0.0;
        for (int out = 0; out < dim; ++out) {
            double z = 1.0;
            for (int q = 0; q < n; ++q) {
                if (letters[q] != 0 && ((out >> (n - 1 - q)) & 1)) z = -z;
            }
            ev += z * p(out);
        }
        ev *= sign;
        // accumulate ev * P / 2^n
        Eigen::MatrixXcd pauli = pauli_mats[letters[0]];
        for (int q = 1; q < n; ++q) {
            Eigen::MatrixXcd next(pauli.rows() * 2, pauli.cols() * 2);
            const Eigen::Matrix2cd& m = pauli_mats[letters[q]];
            for (Eigen::Index i = 0; i < pauli.rows(); ++i)
                for (Eigen::Index j = 0; j < pauli.cols(); ++j) {
                    next.block(2 * i, 2 * j, 2, 2) = pauli(i, j) * m;
                }
            pauli = std::move(next);
        }
        rho += (ev / dim) * pauli;
    }
    return psd_project(rho);
}

double state_fidelity(const Eigen::MatrixXcd& rho, const StateVector& psi) {
    if (rho.rows() != psi.data().size()) throw std::invalid_argument("state_fidelity: size mismatch");
    return std::real(psi.data().dot(rho * psi.data()));
}

}  // namespace sfa
