#pragma once

#include <array>

#include <Eigen/Dense>

#include "sfa/su2.hpp"

namespace sfa {

using Vec16 = Eigen::Matrix<Complex, 16, 1>;
using Mat16 = Eigen::Matrix<Complex, 16, 16>;

// A spin-1/2 quantum tetrahedron as Bloch angles in the {|0>, |1>} intertwiner
// basis: state = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
struct IntertwinerBloch {
    double theta = 0.0;
    double phi = 0.0;
};

// The two-dimensional rank-4 intertwiner basis over four spin-1/2 factors.
// Factor order |s1 s2 s3 s4>, bit value 0 = up; |0> couples pairs (12) and
// (34) to singlets, |1> couples both pairs to spin 1 and then to total spin 0.
struct IntertwinerBasis {
    Vec16 zero;
    Vec16 one;
};

const IntertwinerBasis& basis_states();

// Spin operator J_k^a = (sigma_a / 2) acting on factor k (0-based, leftmost
// factor first), as an explicit 16x16 matrix. axis: 0=x, 1=y, 2=z.
const Mat16& spin_operator(int k, int axis);

// J1^a + J2^a + J3^a + J4^a.
const Mat16& total_spin_operator(int axis);

// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> embedded in the 16-dim space.
Vec16 embed(const IntertwinerBloch& t);

// Outward unit normals of the four faces.
struct FaceNormals {
    std::array<Eigen::Vector3d, 4> n;
};

// g_i = <i| (|n1> x |n2> x |n3> x |n4>) for i = 0, 1 with |n> the spin-1/2
// coherent state along n. Throws if any normal deviates from unit length by
// more than 1e-9.
Eigen::Vector2cd project_coherent(const FaceNormals& f);

// Sum over x,y,z of ||(J1+J2+J3+J4) v||.
double closure_residual(const Vec16& v);

// Expectation values of the cosine dihedral angle operators, one slot per
// face pair.
struct DihedralCosines {
    double c12 = 0, c34 = 0, c13 = 0, c24 = 0, c14 = 0, c23 = 0;
};

// The printed closed forms, evaluated verbatim:
//   c12 = c34 = cos^2(t/2) - (1/3) sin^2(t/2)
//   c13 = c24 = (2/3) sin^2(t/2) + (2 sqrt3/3) cos(t/2) sin(t/2) sin(phi)
//   c14 = c23 = (1 - c12)/2        (closure of the printed linear relation)
// Note: these disagree with dihedral_operator in the c13/c24 slots, which
// carry cos(phi) there; see dihedral_operator.
DihedralCosines dihedral_formula(const IntertwinerBloch& t);

// Expectations of -(4/3) J_k . J_m restricted to the intertwiner 2-space; the
// overall sign is the one that reproduces the printed c12 expression. The
// entries satisfy c12 = c34, c13 = c24, c14 = c23 and c12 + c13 + c14 = 1
// identically; the c13 slot evaluates to
//   (2/3) sin^2(t/2) + (2 sqrt3/3) cos(t/2) sin(t/2) cos(phi).
DihedralCosines dihedral_operator(const IntertwinerBloch& t);

// Q = (J1 x J2) . J3 restricted to the intertwiner 2-space, in the {|0>,|1>}
// basis. Hermitian, traceless, eigenvectors (|0> +- i|1>)/sqrt2 with
// eigenvalues +- sqrt(3)/4.
const Eigen::Matrix2cd& volume_q_matrix();

// Oriented volume <sign(q) (sqrt2/3) sqrt|q|> evaluated in Q's eigenbasis,
// with (sqrt(8 pi gamma) l_p)^3 = 1.
double volume_expectation(const IntertwinerBloch& t);

// Sign of volume_expectation; 0 when |value| < 1e-12.
int orientation(const IntertwinerBloch& t);

}  // namespace sfa
