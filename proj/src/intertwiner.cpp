#include "sfa/intertwiner.hpp"

#include <cmath>
#include <stdexcept>

namespace sfa {

namespace {

constexpr double kUnitTol = 1e-9;

Eigen::Matrix2cd pauli(int axis) {
    Eigen::Matrix2cd m;
    switch (axis) {
        case 0: m << 0, 1, 1, 0; break;
        case 1: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        case 2: m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli: axis out of range");
    }
    return m;
}

Mat16 one_site(int k, const Eigen::Matrix2cd& op) {
    Mat16 out = Mat16::Zero();
    // basis index = s1*8 + s2*4 + s3*2 + s4, bit 0 = up
    for (int col = 0; col < 16; ++col) {
        int sk = (col >> (3 - k)) & 1;
        for (int rk = 0; rk < 2; ++rk) {
            Complex amp = op(rk, sk);
            if (amp == Complex(0, 0)) continue;
            int row = (col & ~(1 << (3 - k))) | (rk << (3 - k));
            out(row, col) += amp;
        }
    }
    return out;
}

struct Tables {
    IntertwinerBasis basis;
    std::array<std::array<Mat16, 3>, 4> j;     // j[k][axis]
    std::array<Mat16, 3> j_total;
    Eigen::Matrix2cd m12, m13, m14, m23, m24, m34;
    Eigen::Matrix2cd q;
    double q_eigenvalue = 0.0;                 // + eigenvalue, belongs to (|0>+i|1>)/sqrt2

    Tables() {
        Eigen::Vector2cd up(1, 0), dn(0, 1);
        auto kron2 = [](const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
            Eigen::Vector4cd out;
            out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
            return out;
        };
        auto kron4 = [](const Eigen::Vector4cd& a, const Eigen::Vector4cd& b) {
            Vec16 out;
            for (int i = 0; i < 4; ++i)
                for (int k = 0; k < 4; ++k) out(4 * i + k) = a(i) * b(k);
            return out;
        };
        Eigen::Vector4cd singlet = (kron2(up, dn) - kron2(dn, up)) / std::sqrt(2.0);
        Eigen::Vector4cd t_plus = kron2(up, up);
        Eigen::Vector4cd t_zero = (kron2(up, dn) + kron2(dn, up)) / std::sqrt(2.0);
        Eigen::Vector4cd t_minus = kron2(dn, dn);

        basis.zero = kron4(singlet, singlet);
        basis.one = (kron4(t_minus, t_plus) + kron4(t_plus, t_minus) - kron4(t_zero, t_zero)) /
                    std::sqrt(3.0);

        for (int k = 0; k < 4; ++k)
            for (int a = 0; a < 3; ++a) j[k][a] = one_site(k, 0.5 * pauli(a));
        for (int a = 0; a < 3; ++a)
            j_total[a] = j[0][a] + j[1][a] + j[2][a] + j[3][a];

        auto restrict2 = [&](const Mat16& op) {
            Eigen::Matrix<Complex, 16, 2> b;
            b.col(0) = basis.zero;
            b.col(1) = basis.one;
            return Eigen::Matrix2cd(b.adjoint() * op * b);
        };
        auto jdotj = [&](int k, int m) {
            Mat16 op = Mat16::Zero();
            for (int a = 0; a < 3; ++a) op += j[k][a] * j[m][a];
            return op;
        };
        m12 = restrict2(jdotj(0, 1));
        m13 = restrict2(jdotj(0, 2));
        m14 = restrict2(jdotj(0, 3));
        m23 = restrict2(jdotj(1, 2));
        m24 = restrict2(jdotj(1, 3));
        m34 = restrict2(jdotj(2, 3));

        Mat16 q16 = Mat16::Zero();
        // (J1 x J2) . J3 = eps_abc J1^a J2^b J3^c
        constexpr int perm[6][4] = {{0, 1, 2, +1}, {1, 2, 0, +1}, {2, 0, 1, +1},
                                    {0, 2, 1, -1}, {2, 1, 0, -1}, {1, 0, 2, -1}};
        for (const auto& p : perm)
            q16 += static_cast<double>(p[3]) * (j[0][p[0]] * j[1][p[1]] * j[2][p[2]]);
        q = restrict2(q16);

        // Q = [[0, i w],[-i w, 0]]; the eigenvector (1, i)/sqrt2 has eigenvalue -w.
        q_eigenvalue = -q(0, 1).imag();
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

Eigen::Vector2cd bloch_ket(double theta, double phi) {
    return {Complex(std::cos(theta / 2.0), 0.0),
            std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0)};
}

double expectation(const Eigen::Matrix2cd& m, const IntertwinerBloch& t) {
    Eigen::Vector2cd psi = bloch_ket(t.theta, t.phi);
    return std::real(psi.dot(m * psi));
}

}  // namespace

const IntertwinerBasis& basis_states() { return tables().basis; }

const Mat16& spin_operator(int k, int axis) {
    if (k < 0 || k > 3 || axis < 0 || axis > 2) {
        throw std::invalid_argument("spin_operator: index out of range");
    }
    return tables().j[static_cast<std::size_t>(k)][static_cast<std::size_t>(axis)];
}

const Mat16& total_spin_operator(int axis) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("total_spin_operator: bad axis");
    return tables().j_total[static_cast<std::size_t>(axis)];
}

Vec16 embed(const IntertwinerBloch& t) {
    const auto& b = tables().basis;
    return std::cos(t.theta / 2.0) * b.zero +
           std::exp(Complex(0.0, t.phi)) * std::sin(t.theta / 2.0) * b.one;
}

Eigen::Vector2cd project_coherent(const FaceNormals& f) {
    Vec16 prod;
    std::array<Eigen::Vector2cd, 4> kets;
    for (int k = 0; k < 4; ++k) {
        if (std::abs(f.n[static_cast<std::size_t>(k)].norm() - 1.0) > kUnitTol) {
            throw std::invalid_argument("project_coherent: face normal is not unit length");
        }
        CoherentHalfSpin c = coherent_from_unit_vector(f.n[static_cast<std::size_t>(k)]);
        kets[static_cast<std::size_t>(k)] = bloch_ket(c.theta, c.phi);
    }
    for (int idx = 0; idx < 16; ++idx) {
        Complex v = 1.0;
        for (int k = 0; k < 4; ++k) v *= kets[static_cast<std::size_t>(k)]((idx >> (3 - k)) & 1);
        prod(idx) = v;
    }
    const auto& b = tables().basis;
    return {b.zero.dot(prod), b.one.dot(prod)};
}

double closure_residual(const Vec16& v) {
    double out = 0.0;
    for (int a = 0; a < 3; ++a) out += (tables().j_total[static_cast<std::size_t>(a)] * v).norm();
    return out;
}

DihedralCosines dihedral_formula(const IntertwinerBloch& t) {
    double c = std::cos(t.theta / 2.0), s = std::sin(t.theta / 2.0);
    DihedralCosines out;
    out.c12 = out.c34 = c * c - s * s / 3.0;
    out.c13 = out.c24 = 2.0 / 3.0 * s * s + 2.0 * std::sqrt(3.0) / 3.0 * c * s * std::sin(t.phi);
    out.c14 = out.c23 = 0.5 * (1.0 - out.c12);
    return out;
}

DihedralCosines dihedral_operator(const IntertwinerBloch& t) {
    const auto& tb = tables();
    DihedralCosines out;
    out.c12 = -4.0 / 3.0 * expectation(tb.m12, t);
    out.c34 = -4.0 / 3.0 * expectation(tb.m34, t);
    out.c13 = -4.0 / 3.0 * expectation(tb.m13, t);
    out.c24 = -4.0 / 3.0 * expectation(tb.m24, t);
    out.c14 = -4.0 / 3.0 * expectation(tb.m14, t);
    out.c23 = -4.0 / 3.0 * expectation(tb.m23, t);
    return out;
}

const Eigen::Matrix2cd& volume_q_matrix() { return tables().q; }

double volume_expectation(const IntertwinerBloch& t) {
    double q = tables().q_eigenvalue;  // eigenvalue of (|0> + i|1>)/sqrt2
    Eigen::Vector2cd psi = bloch_ket(t.theta, t.phi);
    const Complex i(0.0, 1.0);
    Eigen::Vector2cd plus(1.0 / std::sqrt(2.0), i / std::sqrt(2.0));
    Eigen::Vector2cd minus(1.0 / std::sqrt(2.0), -i / std::sqrt(2.0));
    double p_plus = std::norm(plus.dot(psi));
    double p_minus = std::norm(minus.dot(psi));
    double sign = q >= 0.0 ? 1.0 : -1.0;
    return sign * (p_plus - p_minus) * std::sqrt(2.0) / 3.0 * std::sqrt(std::abs(q));
}

int orientation(const IntertwinerBloch& t) {
    double v = volume_expectation(t);
    if (std::abs(v) < 1e-12) return 0;
    return v > 0 ? 1 : -1;
}

}  // namespace sfa
