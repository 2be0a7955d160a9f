#include "sfa/spinfoam.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace sfa {

namespace {

Eigen::Vector2cd bloch_ket(const IntertwinerBloch& t) {
    return {Complex(std::cos(t.theta / 2.0), 0.0),
            std::exp(Complex(0.0, t.phi)) * std::sin(t.theta / 2.0)};
}

// <W|Phi> for a product boundary given per-vertex 2-vectors (q0, q1): the
// vertex-state coefficients are real, so no conjugation is needed on W.
Complex contract_product(const std::array<double, 32>& w,
                         const std::array<Eigen::Vector2cd, 5>& site) {
    Complex total = 0.0;
    for (int code = 0; code < 32; ++code) {
        if (w[static_cast<std::size_t>(code)] == 0.0) continue;
        Complex term = w[static_cast<std::size_t>(code)];
        for (int e = 0; e < 5; ++e) term *= site[static_cast<std::size_t>(e)]((code >> (4 - e)) & 1);
        total += term;
    }
    return total;
}

Complex contract_product8(const std::array<double, 256>& wd,
                          const std::array<Eigen::Vector2cd, 8>& site) {
    Complex total = 0.0;
    for (int code = 0; code < 256; ++code) {
        if (wd[static_cast<std::size_t>(code)] == 0.0) continue;
        Complex term = wd[static_cast<std::size_t>(code)];
        for (int e = 0; e < 8; ++e) term *= site[static_cast<std::size_t>(e)]((code >> (7 - e)) & 1);
        total += term;
    }
    return total;
}

}  // namespace

const PentagonWiring& pentagon_wiring() {
    static const PentagonWiring w = [] {
        PentagonWiring out{};
        for (int e = 0; e < 5; ++e) {
            out.partner[static_cast<std::size_t>(e)] = {(e + 4) % 5, (e + 3) % 5,
                                                        (e + 1) % 5, (e + 2) % 5};
            for (int p = 0; p < 5; ++p) out.leg_of[static_cast<std::size_t>(e)][static_cast<std::size_t>(p)] = -1;
            for (int leg = 0; leg < 4; ++leg) {
                int p = out.partner[static_cast<std::size_t>(e)][static_cast<std::size_t>(leg)];
                out.leg_of[static_cast<std::size_t>(e)][static_cast<std::size_t>(p)] = leg;
            }
        }
        int l = 0;
        for (int e = 0; e < 5; ++e) {
            out.links[static_cast<std::size_t>(l++)] = {e, (e + 1) % 5};
            out.links[static_cast<std::size_t>(l++)] = {e, (e + 2) % 5};
        }
        return out;
    }();
    return w;
}

double FifteenJTensor::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

const FifteenJTensor& fifteenj_tensor() {
    static const FifteenJTensor tensor = [] {
        const auto& wiring = pentagon_wiring();
        const auto& basis = basis_states();
        // real components of |0>, |1> reshaped over the four legs
        std::array<std::array<double, 16>, 2> v{};
        for (int idx = 0; idx < 16; ++idx) {
            v[0][static_cast<std::size_t>(idx)] = basis.zero(idx).real();
            v[1][static_cast<std::size_t>(idx)] = basis.one(idx).real();
        }
        FifteenJTensor out;
        for (int code = 0; code < 32; ++code) {
            double total = 0.0;
            // one eps term per link: (a,b) = (0,1) with +, (1,0) with -
            for (int t = 0; t < 1024; ++t) {
                double sign = 1.0;
                std::array<int, 5> site_idx{};
                for (int l = 0; l < 10; ++l) {
                    auto [e, ep] = wiring.links[static_cast<std::size_t>(l)];
                    int bit = (t >> l) & 1;
                    if (bit) sign = -sign;
                    int a = bit, b = 1 - bit;
                    site_idx[static_cast<std::size_t>(e)] |=
                        a << (3 - wiring.leg_of[static_cast<std::size_t>(e)][static_cast<std::size_t>(ep)]);
                    site_idx[static_cast<std::size_t>(ep)] |=
                        b << (3 - wiring.leg_of[static_cast<std::size_t>(ep)][static_cast<std::size_t>(e)]);
                }
                double term = sign;
                for (int e = 0; e < 5 && term != 0.0; ++e) {
                    int i_e = (code >> (4 - e)) & 1;
                    term *= v[static_cast<std::size_t>(i_e)][static_cast<std::size_t>(site_idx[static_cast<std::size_t>(e)])];
                }
                total += term;
            }
            out.values[static_cast<std::size_t>(code)] = total;
        }
        return out;
    }();
    return tensor;
}

const VertexState& vertex_state() {
    static const VertexState state = [] {
        const auto& f = fifteenj_tensor();
        VertexState out;
        out.normalization = f.norm();
        double sign = f.values[31] >= 0.0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < 32; ++i) out.amplitudes[i] = sign * f.values[i] / out.normalization;
        return out;
    }();
    return state;
}

AmplitudeResult amplitude_single(const Boundary5& b) {
    const auto& w = vertex_state();
    std::array<Eigen::Vector2cd, 5> site;
    for (std::size_t e = 0; e < 5; ++e) site[e] = bloch_ket(b.t[e]);
    AmplitudeResult out;
    out.overlap = contract_product(w.amplitudes, site);
    out.probability = std::norm(out.overlap);
    out.amplitude = 1024.0 * kVertexZ * out.overlap;
    return out;
}

const TwoVertexState& two_vertex_state() {
    static const TwoVertexState state = [] {
        const auto& w = vertex_state().amplitudes;
        TwoVertexState out;
        double norm2 = 0.0;
        for (int ia = 0; ia < 16; ++ia) {
            for (int ib = 0; ib < 16; ++ib) {
                double s = 0.0;
                for (int k = 0; k < 2; ++k)
                    s += w[static_cast<std::size_t>(ia * 2 + k)] * w[static_cast<std::size_t>(ib * 2 + k)];
                out.contracted[static_cast<std::size_t>(ia * 16 + ib)] = s;
                norm2 += s * s;
            }
        }
        out.pre_normalization = std::sqrt(norm2);
        for (auto& x : out.contracted) x /= out.pre_normalization;
        return out;
    }();
    return state;
}

std::array<double, 1024> two_vertex_ten_qubit_form() {
    const auto& w = vertex_state().amplitudes;
    std::array<double, 1024> out{};
    for (int a = 0; a < 32; ++a)
        for (int b = 0; b < 32; ++b)
            out[static_cast<std::size_t>(a * 32 + b)] =
                w[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(b)];
    return out;
}

AmplitudeResult amplitude_double(const Boundary8& b) {
    const auto& wd = two_vertex_state();
    std::array<Eigen::Vector2cd, 8> site;
    for (std::size_t e = 0; e < 8; ++e) site[e] = bloch_ket(b.t[e]);
    AmplitudeResult out;
    out.overlap = contract_product8(wd.contracted, site);
    out.probability = std::norm(out.overlap);
    out.amplitude = std::sqrt(2.0) * 65536.0 * kVertexZ * kVertexZ * out.overlap;
    return out;
}

namespace {

struct McBlockResult {
    Complex sum{0.0, 0.0};
    double sum_sq = 0.0;   // sum of |sample|^2
};

constexpr std::int64_t kMcBlock = 1 << 14;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

McBlockResult mc_block(const std::array<std::array<Eigen::Vector2cd, 4>, 5>& kets,
                       std::int64_t count, std::uint64_t block_seed) {
    const auto& wiring = pentagon_wiring();
    std::mt19937_64 rng(block_seed);
    McBlockResult out;
    std::array<Eigen::Matrix2cd, 5> g;
    g[0] = Eigen::Matrix2cd::Identity();  // gauge fixing
    std::array<std::array<Eigen::Vector2cd, 4>, 5> rotated;
    for (std::int64_t s = 0; s < count; ++s) {
        for (std::size_t e = 1; e < 5; ++e) g[e] = haar_sample(rng).matrix();
        for (std::size_t e = 0; e < 5; ++e)
            for (std::size_t k = 0; k < 4; ++k) rotated[e][k] = g[e] * kets[e][k];
        Complex val = 1.0;
        for (const auto& [e, ep] : wiring.links) {
            const Eigen::Vector2cd& u =
                rotated[static_cast<std::size_t>(e)][static_cast<std::size_t>(
                    wiring.leg_of[static_cast<std::size_t>(e)][static_cast<std::size_t>(ep)])];
            const Eigen::Vector2cd& w =
                rotated[static_cast<std::size_t>(ep)][static_cast<std::size_t>(
                    wiring.leg_of[static_cast<std::size_t>(ep)][static_cast<std::size_t>(e)])];
            val *= u(0) * w(1) - u(1) * w(0);
        }
        out.sum += val;
        out.sum_sq += std::norm(val);
    }
    return out;
}

// Per-atom boundary kets for the glued estimator: four tetrahedra at pentagon
// positions 0..3, position 4 is the bulk tetrahedron.
using AtomKets = std::array<std::array<Eigen::Vector2cd, 4>, 4>;

Complex eps_form(const Eigen::Vector2cd& u, const Eigen::Vector2cd& w) {
    return u(0) * w(1) - u(1) * w(0);
}

McBlockResult mc_block_double(const AtomKets& kets_a, const AtomKets& kets_b, std::int64_t count,
                              std::uint64_t block_seed) {
    const auto& wiring = pentagon_wiring();
    std::mt19937_64 rng(block_seed);
    McBlockResult out;

    std::array<Eigen::Matrix2cd, 5> ga, gb;
    ga[0] = gb[0] = Eigen::Matrix2cd::Identity();  // one gauge fixing per atom
    const Eigen::Matrix2cd eps = (Eigen::Matrix2cd() << 0, 1, -1, 0).finished();

    for (std::int64_t s = 0; s < count; ++s) {
        for (std::size_t e = 1; e < 5; ++e) ga[e] = haar_sample(rng).matrix();
        for (std::size_t e = 1; e < 5; ++e) gb[e] = haar_sample(rng).matrix();

        Complex val = 1.0;
        for (const auto& [t, h] : wiring.links) {
            const int leg_t = wiring.leg_of[static_cast<std::size_t>(t)][static_cast<std::size_t>(h)];
            const int leg_h = wiring.leg_of[static_cast<std::size_t>(h)][static_cast<std::size_t>(t)];
            if (t != 4 && h != 4) {
                // boundary-boundary link inside each atom
                val *= eps_form(ga[static_cast<std::size_t>(t)] *
                                    kets_a[static_cast<std::size_t>(t)][static_cast<std::size_t>(leg_t)],
                                ga[static_cast<std::size_t>(h)] *
                                    kets_a[static_cast<std::size_t>(h)][static_cast<std::size_t>(leg_h)]);
                val *= eps_form(gb[static_cast<std::size_t>(t)] *
                                    kets_b[static_cast<std::size_t>(t)][static_cast<std::size_t>(leg_t)],
                                gb[static_cast<std::size_t>(h)] *
                                    kets_b[static_cast<std::size_t>(h)][static_cast<std::size_t>(leg_h)]);
                continue;
            }
            // glued face: chain through both bulk elements, open indices
            // paired with the antisymmetric form
            const int k = (t == 4) ? h : t;
            Eigen::Vector2cd xa =
                ga[static_cast<std::size_t>(k)] *
                kets_a[static_cast<std::size_t>(k)][static_cast<std::size_t>(
                    wiring.leg_of[static_cast<std::size_t>(k)][4])];
            Eigen::Vector2cd xb =
                gb[static_cast<std::size_t>(k)] *
                kets_b[static_cast<std::size_t>(k)][static_cast<std::size_t>(
                    wiring.leg_of[static_cast<std::size_t>(k)][4])];
            Eigen::RowVector2cd alpha, beta;
            if (t == 4) {
                // eps_ab [g4]_{a s} x_b = -(g4^T eps x)^T
                alpha = -(ga[4].transpose() * (eps * xa)).transpose();
                beta = -(gb[4].transpose() * (eps * xb)).transpose();
            } else {
                // eps_ab x_a [g4]_{b s}
                alpha = (xa.transpose() * eps) * ga[4];
                beta = (xb.transpose() * eps) * gb[4];
            }
            val *= (alpha * eps * beta.transpose()).value();
        }
        out.sum += val;
        out.sum_sq += std::norm(val);
    }
    return out;
}

}  // namespace

template <typename BlockFn>
std::pair<Complex, double> run_mc_blocks(std::int64_t samples, std::uint64_t seed, int threads,
                                         BlockFn block_fn) {
    const std::int64_t num_blocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<McBlockResult> results(static_cast<std::size_t>(num_blocks));
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        while (true) {
            std::int64_t b = next.fetch_add(1);
            if (b >= num_blocks) break;
            std::int64_t count = std::min<std::int64_t>(kMcBlock, samples - b * kMcBlock);
            results[static_cast<std::size_t>(b)] =
                block_fn(count, mix_seed(seed, static_cast<std::uint64_t>(b)));
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // fixed reduction order: block index ascending, independent of thread count
    Complex sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& r : results) {
        sum += r.sum;
        sum_sq += r.sum_sq;
    }
    const double n = static_cast<double>(samples);
    Complex mean = sum / n;
    double var = std::max(0.0, (sum_sq / n - std::norm(mean)) * n / (n - 1.0));
    return {mean, std::sqrt(var / n)};
}

double guarded_ratio(double num, double denom) {
    return denom > 1e-300 ? num / denom : std::numeric_limits<double>::quiet_NaN();
}

McEstimate mc_amplitude_single(const std::array<FaceNormals, 5>& normals,
                               std::int64_t samples, std::uint64_t seed, int threads) {
    if (samples < 1000) throw std::invalid_argument("mc_amplitude_single: needs >= 1000 samples");

    std::array<std::array<Eigen::Vector2cd, 4>, 5> kets;
    std::array<Eigen::Vector2cd, 5> projected;
    for (std::size_t e = 0; e < 5; ++e) {
        projected[e] = project_coherent(normals[e]);  // validates unit normals
        for (std::size_t k = 0; k < 4; ++k) {
            CoherentHalfSpin c = coherent_from_unit_vector(normals[e].n[k]);
            kets[e][k] = c.ket();
        }
    }

    auto [mean, se] = run_mc_blocks(samples, seed, threads,
                                    [&](std::int64_t count, std::uint64_t block_seed) {
                                        return mc_block(kets, count, block_seed);
                                    });

    McEstimate out;
    out.estimate = 1024.0 * mean;
    out.std_error = 1024.0 * se;
    out.samples = samples;

    // contraction route with the same boundary data
    Complex overlap = contract_product(vertex_state().amplitudes, projected);
    out.empirical_z = guarded_ratio(std::abs(out.estimate), 1024.0 * std::abs(overlap));
    return out;
}

McEstimate mc_amplitude_double(const std::array<FaceNormals, 8>& normals,
                               std::int64_t samples, std::uint64_t seed, int threads) {
    if (samples < 1000) throw std::invalid_argument("mc_amplitude_double: needs >= 1000 samples");

    AtomKets kets_a, kets_b;
    std::array<Eigen::Vector2cd, 8> projected;
    for (std::size_t e = 0; e < 8; ++e) {
        projected[e] = project_coherent(normals[e]);
        for (std::size_t k = 0; k < 4; ++k) {
            CoherentHalfSpin c = coherent_from_unit_vector(normals[e].n[k]);
            (e < 4 ? kets_a[e] : kets_b[e - 4])[k] = c.ket();
        }
    }

    auto [mean, se] = run_mc_blocks(samples, seed, threads,
                                    [&](std::int64_t count, std::uint64_t block_seed) {
                                        return mc_block_double(kets_a, kets_b, count, block_seed);
                                    });

    // 2^17 x raw integral = sqrt2 2^16 Z^2 <W_d|Phi>
    const double scale = 131072.0;
    McEstimate out;
    out.estimate = scale * mean;
    out.std_error = scale * se;
    out.samples = samples;

    Complex overlap = contract_product8(two_vertex_state().contracted, projected);
    double ratio = guarded_ratio(std::abs(out.estimate),
                                 std::sqrt(2.0) * 65536.0 * std::abs(overlap));
    out.empirical_z = std::sqrt(ratio);
    return out;
}

std::vector<ScanRow> scan_single(int theta_count, int phi_count) {
    if (theta_count < 2 || phi_count < 2) throw std::invalid_argument("scan_single: grid must be >= 2");
    const IntertwinerBloch regular{std::numbers::pi / 2.0, std::numbers::pi / 2.0};
    Boundary5 b;
    for (int e = 0; e < 4; ++e) b.t[static_cast<std::size_t>(e)] = regular;
    std::vector<ScanRow> rows;
    rows.reserve(static_cast<std::size_t>(theta_count) * static_cast<std::size_t>(phi_count));
    for (int i = 0; i < theta_count; ++i) {
        double theta = std::numbers::pi * i / (theta_count - 1);
        for (int j = 0; j < phi_count; ++j) {
            double phi = 2.0 * std::numbers::pi * j / (phi_count - 1);
            b.t[4] = {theta, phi};
            AmplitudeResult r = amplitude_single(b);
            rows.push_back({theta, phi, r.probability, r.overlap});
        }
    }
    return rows;
}

std::vector<ScanRow> scan_double(int theta_count) {
    if (theta_count < 2) throw std::invalid_argument("scan_double: grid must be >= 2");
    const double half_pi = std::numbers::pi / 2.0;
    Boundary8 b;
    for (int e = 0; e < 4; ++e) b.t[static_cast<std::size_t>(e)] = {half_pi, half_pi};
    for (int e = 4; e < 7; ++e) b.t[static_cast<std::size_t>(e)] = {half_pi, 3.0 * half_pi};
    std::vector<ScanRow> rows;
    rows.reserve(2 * static_cast<std::size_t>(theta_count));
    for (int i = 0; i < theta_count; ++i) {
        double theta = std::numbers::pi * i / (theta_count - 1);
        for (double phi : {half_pi, 3.0 * half_pi}) {
            b.t[7] = {theta, phi};
            AmplitudeResult r = amplitude_double(b);
            rows.push_back({theta, phi, r.probability, r.overlap});
        }
    }
    return rows;
}

}  // namespace sfa
