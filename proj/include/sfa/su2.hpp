#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "sfa/half_integer.hpp"

namespace sfa {

using Complex = std::complex<double>;

// SU(2) element stored as the top row (a, b) of [[a, b], [-b*, a*]], so the
// determinant-1 / unitarity structure is carried by construction and only the
// row norm can drift.
class SU2Element {
  public:
    SU2Element() : a_(1.0, 0.0), b_(0.0, 0.0) {}

    // Throws std::invalid_argument if |a|^2 + |b|^2 deviates from 1 by more
    // than 1e-12.
    SU2Element(Complex a, Complex b);

    Complex a() const { return a_; }
    Complex b() const { return b_; }

    Eigen::Matrix2cd matrix() const;
    double unitarity_error() const;

    SU2Element inverse() const { return SU2Element(std::conj(a_), -b_, Unchecked{}); }

    friend SU2Element su2_compose(const SU2Element& g, const SU2Element& h);

  private:
    struct Unchecked {};
    SU2Element(Complex a, Complex b, Unchecked) : a_(a), b_(b) {}

    Complex a_;
    Complex b_;
};

SU2Element su2_compose(const SU2Element& g, const SU2Element& h);
inline SU2Element su2_inverse(const SU2Element& g) { return g.inverse(); }

// Bloch direction of a spin-1/2 coherent state,
// ket = (cos(theta/2), e^{i phi} sin(theta/2)).
struct CoherentHalfSpin {
    double theta = 0.0;
    double phi = 0.0;

    Eigen::Vector2cd ket() const;
};

// Bloch angles of a unit 3-vector. The caller is responsible for |n| = 1.
CoherentHalfSpin coherent_from_unit_vector(const Eigen::Vector3d& n);

// <n| g^{-1} g' |n'> in the spin-1/2 representation.
Complex coherent_overlap(const CoherentHalfSpin& n, const SU2Element& g,
                         const SU2Element& g_prime, const CoherentHalfSpin& n_prime);

// Haar-uniform SU(2) sample: four standard normals (Box-Muller over the
// engine's 53-bit uniforms) normalized to a unit quaternion. Bit-deterministic
// for a given engine state; pass one engine per worker for parallel use.
SU2Element haar_sample(std::mt19937_64& rng);

// Condon-Shortley <j1 m1; j2 m2 | J M> via the Racah single-sum closed form
// with exact integer factorials. Returns 0 when M != m1+m2 or the triangle
// condition fails; throws std::invalid_argument for spins < 0, |m| > j, or
// m incompatible with j.
double clebsch_gordan(HalfInteger j1, HalfInteger m1, HalfInteger j2, HalfInteger m2,
                      HalfInteger big_j, HalfInteger big_m);

}  // namespace sfa
