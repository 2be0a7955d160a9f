#include "sfa/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "sfa/spinfoam.hpp"

namespace sfa {

namespace {

constexpr double kTauInitLow = 50.0;
constexpr double kTauInitHigh = 500.0;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One executable step with links into the parameter vector (-1 = fixed).
struct ParamStep {
    enum class Kind { Rotation, Phase, Entangle } kind;
    int q = -1;
    int group = -1;           // index into the coupling set
    int p0 = -1, p1 = -1;     // Rotation: (alpha, beta); Phase: (gamma); Entangle: (tau)
};

// Flattened schedule with an explicit parameter layout; evaluates the state
// fidelity objective and its exact gradient by a forward pass with cached
// states and one adjoint sweep.
class GradientEngine {
  public:
    GradientEngine(const PulseSchedule& structure, CouplingSet couplings, StateVector target,
                   bool shared_tau)
        : couplings_(std::move(couplings)), target_(std::move(target)) {
        for (const auto& c : couplings_) evolutions_.emplace_back(c);
        num_qubits_ = target_.qubits();

        int p = 0;
        for (const auto& r : structure.init) {
            steps_.push_back({ParamStep::Kind::Rotation, r.q, -1, p, p + 1});
            p += 2;
        }
        for (const auto& layer : structure.layers) {
            int shared_index = shared_tau ? p : -1;
            for (std::size_t g = 0; g < couplings_.size(); ++g) {
                int tau_index = shared_tau ? shared_index : p;
                steps_.push_back(
                    {ParamStep::Kind::Entangle, -1, static_cast<int>(g), tau_index, -1});
                if (!shared_tau) ++p;
            }
            if (shared_tau) ++p;
            for (const auto& gate : layer.gates) {
                steps_.push_back({ParamStep::Kind::Rotation, gate.q, -1, p, p + 1});
                steps_.push_back({ParamStep::Kind::Phase, gate.q, -1, p + 2, -1});
                p += 3;
            }
        }
        dim_ = p;
        structure_ = structure;
        shared_tau_ = shared_tau;
        for (const auto& s : steps_) {
            if (s.kind == ParamStep::Kind::Entangle) tau_indices_.push_back(s.p0);
        }
    }

    int dim() const { return dim_; }
    const std::vector<int>& tau_indices() const { return tau_indices_; }

    Eigen::VectorXd pack(const CouplingSet& couplings, const PulseSchedule& p) const {
        auto v = p.parameter_vector(couplings);
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    PulseSchedule to_schedule(const Eigen::VectorXd& x) const {
        PulseSchedule out = structure_;
        int p = 0;
        for (auto& r : out.init) {
            r.alpha = x(p);
            r.beta = x(p + 1);
            p += 2;
        }
        for (auto& layer : out.layers) {
            layer.tau_ns.reset();
            layer.tau_ns_by_group.clear();
            if (shared_tau_ || couplings_.size() == 1) {
                layer.tau_ns = x(p);
                p += shared_tau_ ? 1 : static_cast<int>(couplings_.size());
            } else {
                for (const auto& c : couplings_) layer.tau_ns_by_group[c.label] = x(p++);
            }
            for (auto& gate : layer.gates) {
                gate.alpha = x(p);
                gate.beta = x(p + 1);
                gate.gamma = x(p + 2);
                p += 3;
            }
        }
        return out;
    }

    Eigen::VectorXd random_start(std::mt19937_64& rng) const {
        Eigen::VectorXd x(dim_);
        std::vector<bool> is_tau(static_cast<std::size_t>(dim_), false);
        for (int t : tau_indices_) is_tau[static_cast<std::size_t>(t)] = true;
        for (int i = 0; i < dim_; ++i) {
            x(i) = is_tau[static_cast<std::size_t>(i)]
                       ? kTauInitLow + (kTauInitHigh - kTauInitLow) * uniform53(rng)
                       : 2.0 * std::numbers::pi * uniform53(rng);
        }
        return x;
    }

    void clamp_tau(Eigen::VectorXd& x) const {
        for (int t : tau_indices_) x(t) = std::max(0.0, x(t));
    }

    double infidelity_at(const Eigen::VectorXd& x) const {
        StateVector s(num_qubits_);
        for (const auto& st : steps_) apply_step(st, x, s);
        return 1.0 - std::norm(target_.data().dot(s.data()));
    }

    double infidelity_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
        const auto n_steps = steps_.size();
        std::vector<StateVector> states;
        states.reserve(n_steps + 1);
        states.emplace_back(num_qubits_);
        for (const auto& st : steps_) {
            states.push_back(states.back());
            apply_step(st, x, states.back());
        }
        const Complex c = target_.data().dot(states.back().data());

        grad = Eigen::VectorXd::Zero(dim_);
        StateVector phi = target_;
        for (std::size_t s = n_steps; s-- > 0;) {
            const ParamStep& st = steps_[s];
            const StateVector& pre = states[s];
            const StateVector& post = states[s + 1];
            switch (st.kind) {
                case ParamStep::Kind::Rotation: {
                    double alpha = x(st.p0), beta = x(st.p1);
                    // d/dalpha: -(i/2)(cos b X + sin b Y) on the post state
                    StateVector tmp = post;
                    Eigen::Matrix2cd gen;
                    Complex e_minus = std::exp(Complex(0.0, -beta));
                    gen << 0.0, Complex(0.0, -0.5) * e_minus,
                        Complex(0.0, -0.5) * std::conj(e_minus), 0.0;
                    tmp.apply_one_qubit(st.q, gen);
                    accumulate(grad, st.p0, c, phi, tmp);
                    // d/dbeta: -(i/2)(Z U - U Z)
                    StateVector za = post;
                    za.apply_one_qubit(st.q, z_matrix());
                    StateVector zb = pre;
                    zb.apply_one_qubit(st.q, z_matrix());
                    zb.apply_rotation(st.q, alpha, beta);
                    Complex d = Complex(0.0, -0.5) *
                                (phi.data().dot(za.data()) - phi.data().dot(zb.data()));
                    grad(st.p1) -= 2.0 * std::real(std::conj(c) * d);
                    break;
                }
                case ParamStep::Kind::Phase: {
                    // d/dgamma: i |1><1| on the post state
                    StateVector tmp = post;
                    tmp.apply_one_qubit(st.q, p1_matrix());
                    Complex d = Complex(0.0, 1.0) * phi.data().dot(tmp.data());
                    grad(st.p0) -= 2.0 * std::real(std::conj(c) * d);
                    break;
                }
                case ParamStep::Kind::Entangle: {
                    // d/dtau: -i H on the post state
                    StateVector tmp = post;
                    evolutions_[static_cast<std::size_t>(st.group)].apply_hamiltonian(tmp);
                    Complex d = Complex(0.0, -1.0) * phi.data().dot(tmp.data());
                    grad(st.p0) -= 2.0 * std::real(std::conj(c) * d);
                    break;
                }
            }
            unapply_step(st, x, phi);
        }
        return 1.0 - std::norm(c);
    }

  private:
    static const Eigen::Matrix2cd& z_matrix() {
        static const Eigen::Matrix2cd z = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
        return z;
    }
    static const Eigen::Matrix2cd& p1_matrix() {
        static const Eigen::Matrix2cd p = (Eigen::Matrix2cd() << 0, 0, 0, 1).finished();
        return p;
    }

    void accumulate(Eigen::VectorXd& grad, int index, Complex c, const StateVector& phi,
                    const StateVector& v) const {
        Complex d = phi.data().dot(v.data());
        grad(index) -= 2.0 * std::real(std::conj(c) * d);  // gradient of 1 - |c|^2
    }

    void apply_step(const ParamStep& st, const Eigen::VectorXd& x, StateVector& s) const {
        switch (st.kind) {
            case ParamStep::Kind::Rotation: s.apply_rotation(st.q, x(st.p0), x(st.p1)); break;
            case ParamStep::Kind::Phase: s.apply_phase(st.q, x(st.p0)); break;
            case ParamStep::Kind::Entangle:
                evolutions_[static_cast<std::size_t>(st.group)].apply(s, x(st.p0));
                break;
        }
    }

    void unapply_step(const ParamStep& st, const Eigen::VectorXd& x, StateVector& s) const {
        switch (st.kind) {
            case ParamStep::Kind::Rotation: s.apply_rotation(st.q, -x(st.p0), x(st.p1)); break;
            case ParamStep::Kind::Phase: s.apply_phase(st.q, -x(st.p0)); break;
            case ParamStep::Kind::Entangle:
                evolutions_[static_cast<std::size_t>(st.group)].apply(s, -x(st.p0));
                break;
        }
    }

    CouplingSet couplings_;
    std::vector<XYEvolution> evolutions_;
    std::vector<ParamStep> steps_;
    std::vector<int> tau_indices_;
    PulseSchedule structure_;
    StateVector target_{1};
    int num_qubits_ = 0;
    int dim_ = 0;
    bool shared_tau_ = false;
};

PulseSchedule canonical_structure(int num_qubits, int depth) {
    PulseSchedule s;
    for (int q = 0; q < num_qubits; ++q) s.init.push_back({q, 0.0, 0.0});
    for (int l = 0; l < depth; ++l) {
        ScheduleLayer layer;
        layer.tau_ns = 0.0;
        for (int q = 0; q < num_qubits; ++q) layer.gates.push_back({q, 0.0, 0.0, 0.0});
        s.layers.push_back(std::move(layer));
    }
    return s;
}

struct DescentOutcome {
    Eigen::VectorXd x;
    double initial_infidelity = 1.0;
    double final_infidelity = 1.0;
    double max_fidelity_seen = 0.0;
    int iterations = 0;
};

// L-BFGS (memory 10) with Armijo backtracking; durations are projected to
// tau >= 0 after every trial step.
DescentOutcome lbfgs_minimize(const GradientEngine& engine, Eigen::VectorXd x,
                              const OptimizerConfig& cfg) {
    constexpr int kMemory = 10;
    constexpr double kArmijo = 1e-4;

    engine.clamp_tau(x);
    DescentOutcome out;
    Eigen::VectorXd g(engine.dim());
    double f = engine.infidelity_and_gradient(x, g);
    out.initial_infidelity = f;
    out.max_fidelity_seen = 1.0 - f;

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    int iter = 0;
    for (; iter < cfg.max_iterations; ++iter) {
        if (g.norm() <= cfg.gradient_tolerance) break;

        // two-loop recursion
        Eigen::VectorXd d = -g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(d);
            d -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            d *= gamma;
        } else {
            d /= std::max(1.0, g.norm());
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            double beta = rho_hist[i] * y_hist[i].dot(d);
            d += (alpha[i] - beta) * s_hist[i];
        }
        if (g.dot(d) >= 0.0) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = -g / std::max(1.0, g.norm());
        }

        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXd x_try, step;
        double f_try = f;
        for (int ls = 0; ls < 40; ++ls) {
            x_try = x + t * d;
            engine.clamp_tau(x_try);
            step = x_try - x;
            if (step.norm() < 1e-16) break;
            f_try = engine.infidelity_at(x_try);
            if (f_try <= f + kArmijo * g.dot(step)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;

        Eigen::VectorXd g_new(engine.dim());
        f_try = engine.infidelity_and_gradient(x_try, g_new);
        Eigen::VectorXd y = g_new - g;
        double sy = step.dot(y);
        if (sy > 1e-12 * step.norm() * y.norm()) {
            s_hist.push_back(step);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > kMemory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = std::move(x_try);
        f = f_try;
        g = std::move(g_new);
        out.max_fidelity_seen = std::max(out.max_fidelity_seen, 1.0 - f);
    }
    out.x = std::move(x);
    out.final_infidelity = f;
    out.iterations = iter;
    return out;
}

OptimizationResult run_optimization(const GradientEngine& engine, const OptimizerConfig& cfg) {
    if (cfg.restarts < 1) throw std::invalid_argument("optimizer: restarts must be >= 1");
    OptimizationResult result;
    result.seed = cfg.seed;
    Eigen::VectorXd best_x;
    for (int r = 0; r < cfg.restarts; ++r) {
        std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        DescentOutcome outcome = lbfgs_minimize(engine, engine.random_start(rng), cfg);
        RestartStats stats;
        stats.initial_infidelity = outcome.initial_infidelity;
        stats.final_fidelity = 1.0 - outcome.final_infidelity;
        stats.max_fidelity_seen = outcome.max_fidelity_seen;
        stats.iterations = outcome.iterations;
        result.restarts.push_back(stats);
        if (result.best_restart < 0 || stats.final_fidelity > result.fidelity) {
            result.fidelity = stats.final_fidelity;
            result.best_restart = r;
            result.iterations = stats.iterations;
            best_x = outcome.x;
        }
    }
    result.best = engine.to_schedule(best_x);
    return result;
}

void require_qubit_set(const CouplingMatrix& c, int lo, int hi, const char* what) {
    std::set<int> got(c.qubits.begin(), c.qubits.end());
    std::set<int> want;
    for (int q = lo; q <= hi; ++q) want.insert(q);
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": group must cover qubits " +
                                    std::to_string(lo) + ".." + std::to_string(hi));
    }
}

StateVector vertex_target() {
    const auto& w = vertex_state().amplitudes;
    Eigen::VectorXcd amps(32);
    for (int i = 0; i < 32; ++i) amps(i) = w[static_cast<std::size_t>(i)];
    return StateVector::from_amplitudes(std::move(amps));
}

StateVector double_vertex_target() {
    const auto& w = vertex_state().amplitudes;
    Eigen::VectorXcd amps(1024);
    for (int a = 0; a < 32; ++a)
        for (int b = 0; b < 32; ++b)
            amps(a * 32 + b) = w[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(b)];
    return StateVector::from_amplitudes(std::move(amps));
}

}  // namespace

double infidelity(const PulseSchedule& p, const CouplingSet& c, const StateVector& target) {
    StateVector s = run_schedule(p, c, target.qubits());
    return 1.0 - s.fidelity_pure(target);
}

Eigen::VectorXd gradient(const PulseSchedule& p, const CouplingSet& c, const StateVector& target) {
    GradientEngine engine(p, c, target, /*shared_tau=*/false);
    Eigen::VectorXd x = engine.pack(c, p);
    Eigen::VectorXd grad(engine.dim());
    engine.infidelity_and_gradient(x, grad);
    return grad;
}

OptimizationResult optimize_single(const CouplingMatrix& c, int depth, const OptimizerConfig& cfg) {
    if (depth < 1) throw std::invalid_argument("optimize_single: depth must be >= 1");
    require_qubit_set(c, 0, 4, "optimize_single");
    CouplingSet couplings{c};
    GradientEngine engine(canonical_structure(5, depth), couplings, vertex_target(),
                          /*shared_tau=*/false);
    return run_optimization(engine, cfg);
}

OptimizationResult optimize_parallel(const CouplingMatrix& group_a, const CouplingMatrix& group_b,
                                     int depth, const OptimizerConfig& cfg) {
    if (depth < 1) throw std::invalid_argument("optimize_parallel: depth must be >= 1");
    require_qubit_set(group_a, 0, 4, "optimize_parallel (group A)");
    require_qubit_set(group_b, 5, 9, "optimize_parallel (group B)");
    CouplingSet couplings{group_a, group_b};
    GradientEngine engine(canonical_structure(10, depth), couplings, double_vertex_target(),
                          /*shared_tau=*/true);
    return run_optimization(engine, cfg);
}

}  // namespace sfa
