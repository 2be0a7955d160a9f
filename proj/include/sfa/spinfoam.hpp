#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sfa/intertwiner.hpp"

namespace sfa {

// Pentagon wiring used by both the {15j} contraction and the group-integral
// Monte Carlo. Vertices e = 0..4 are cyclic; every pair shares one link. Legs
// of vertex e map to partner vertices in the order
//   leg 0 -> e-1,  leg 1 -> e-2,  leg 2 -> e+1,  leg 3 -> e+2   (mod 5),
// so the intermediate spin couples the two predecessor legs against the two
// successor legs. Each link carries the antisymmetric form eps = [[0,1],[-1,0]]
// oriented along the forward links e -> e+1 and e -> e+2. This fixed choice
// reproduces the vertex-state coefficient table including all signs.
struct PentagonWiring {
    // partner[e][leg] = vertex wired to that leg
    std::array<std::array<int, 4>, 5> partner;
    // leg_of[e][e'] = leg index of vertex e wired to vertex e' (-1 on diagonal)
    std::array<std::array<int, 5>, 5> leg_of;
    // links[l] = (tail, head) of the l-th forward link
    std::array<std::pair<int, int>, 10> links;
};
const PentagonWiring& pentagon_wiring();

// Raw pentagon contraction f(1/2,...,1/2, i1..i5) over intermediate spins
// i_e in {0,1}; index = i1*16 + i2*8 + i3*4 + i4*2 + i5.
struct FifteenJTensor {
    std::array<double, 32> values{};
    double norm() const;
};
const FifteenJTensor& fifteenj_tensor();

// Normalized vertex state; amplitudes are real with the overall sign fixed so
// the all-ones component is +21/(8 sqrt 42). normalization is the norm of the
// raw contraction the state was scaled by.
struct VertexState {
    std::array<double, 32> amplitudes{};
    double normalization = 0.0;
};
const VertexState& vertex_state();

// Constant quoted for the vertex-amplitude prefactor A_v = 2^10 Z <W|Phi>. The
// Monte Carlo oracle measures this ratio empirically; it is reported, never
// asserted inside amplitude formulas.
inline constexpr double kVertexZ = 0.62361;

struct Boundary5 {
    std::array<IntertwinerBloch, 5> t{};
};
struct Boundary8 {
    // slots 0..3 -> vertex A boundary (i1..i4), slots 4..7 -> vertex B (i6..i9)
    std::array<IntertwinerBloch, 8> t{};
};

struct AmplitudeResult {
    Complex overlap;      // <W|Phi> (or <W_d|Phi>)
    double probability;   // |overlap|^2
    Complex amplitude;    // prefactored spin foam amplitude
};

AmplitudeResult amplitude_single(const Boundary5& b);

// Two glued vertices: 8-qubit contracted form W_d(iA, iB) proportional to
// sum_k W(iA, k) W(iB, k), unit-normalized; index = iA*16 + iB with each block
// in lexicographic order. ten_qubit_form is the pre-contraction product
// W (x) W; gluing inserts (|00>+|11>)/sqrt2 on qubit positions (5, 10).
struct TwoVertexState {
    std::array<double, 256> contracted{};
    double pre_normalization = 0.0;  // norm of sum_k W(.,k) W(.,k)
};
const TwoVertexState& two_vertex_state();
std::array<double, 1024> two_vertex_ten_qubit_form();

AmplitudeResult amplitude_double(const Boundary8& b);

// Monte Carlo estimate of the five-fold group integral for coherent boundary
// data (2^10 prefactor included, one group element gauge-fixed to identity).
// Each link factor is the spin-0 pairing eps_ab [g_e |n_e>]_a [g_e' |n_e'>]_b
// of the two rotated coherent states, matching the contraction oracle
// exactly in expectation. normals[e].n[leg] follows pentagon_wiring().
struct McEstimate {
    Complex estimate;
    double std_error;     // combined re/im standard error of the estimate
    double empirical_z;   // |estimate| / |2^10 <W|Phi_proj>|; NaN if overlap ~ 0
    std::int64_t samples = 0;
};
McEstimate mc_amplitude_single(const std::array<FaceNormals, 5>& normals,
                               std::int64_t samples, std::uint64_t seed, int threads = 1);

// Experimental: ten-fold group integral for the glued two-vertex amplitude
// (one element gauge-fixed per atom, eight Haar draws per sample). Boundary
// slots follow Boundary8 (A side pentagon positions 0..3, then B side); each
// tetrahedron's fourth wiring leg is glued through the bulk pair, with the
// open face indices paired by the antisymmetric form. The estimate carries
// the full amplitude prefactor and so estimates sqrt2 2^16 Z^2 <W_d|Phi>;
// empirical_z reports the per-vertex root of the measured ratio. Variance
// grows steeply with vertex count: expect no usable accuracy below ~1e7
// samples.
McEstimate mc_amplitude_double(const std::array<FaceNormals, 8>& normals,
                               std::int64_t samples, std::uint64_t seed, int threads = 1);

struct ScanRow {
    double theta;
    double phi;
    double probability;
    Complex amplitude;   // <W|Phi>
};

// Four regular tetrahedra at (pi/2, pi/2), the fifth on an inclusive grid
// theta in [0, pi] x phi in [0, 2 pi]; rows theta-major. Counts must be >= 2.
std::vector<ScanRow> scan_single(int theta_count, int phi_count);

// Seven fixed tetrahedra (A side at phi = pi/2, B side at phi = 3 pi/2, all
// theta = pi/2), the eighth scanned over theta in [0, pi] at
// phi in {pi/2, 3 pi/2}; rows theta-major with the two branches inner.
std::vector<ScanRow> scan_double(int theta_count);

}  // namespace sfa
