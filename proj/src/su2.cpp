#include "sfa/su2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfa {

namespace {

constexpr double kUnitaryTol = 1e-12;

// Exact integer factorials; arguments stay below 13 for the spins used here
// (2j <= 8), well inside the double-exact range n <= 18.
double factorial(int n) {
    static const auto table = [] {
        std::array<double, 41> t{};
        t[0] = 1.0;
        for (int i = 1; i <= 40; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    return table.at(static_cast<std::size_t>(n));
}

double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SU2Element::SU2Element(Complex a, Complex b) : a_(a), b_(b) {
    if (unitarity_error() > kUnitaryTol) {
        throw std::invalid_argument("SU2Element: |a|^2 + |b|^2 deviates from 1");
    }
}

Eigen::Matrix2cd SU2Element::matrix() const {
    Eigen::Matrix2cd m;
    m << a_, b_, -std::conj(b_), std::conj(a_);
    return m;
}

double SU2Element::unitarity_error() const {
    return std::abs(std::norm(a_) + std::norm(b_) - 1.0);
}

SU2Element su2_compose(const SU2Element& g, const SU2Element& h) {
    // Top row of the matrix product; the result stays in the (a, b) form.
    Complex a = g.a_ * h.a_ - g.b_ * std::conj(h.b_);
    Complex b = g.a_ * h.b_ + g.b_ * std::conj(h.a_);
    return SU2Element(a, b, SU2Element::Unchecked{});
}

Eigen::Vector2cd CoherentHalfSpin::ket() const {
    return {Complex(std::cos(theta / 2.0), 0.0),
            std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0)};
}

CoherentHalfSpin coherent_from_unit_vector(const Eigen::Vector3d& n) {
    double z = std::clamp(n.z(), -1.0, 1.0);
    return {std::acos(z), std::atan2(n.y(), n.x())};
}

Complex coherent_overlap(const CoherentHalfSpin& n, const SU2Element& g,
                         const SU2Element& g_prime, const CoherentHalfSpin& n_prime) {
    Eigen::Matrix2cd m = g.inverse().matrix() * g_prime.matrix();
    return n.ket().dot(m * n_prime.ket());  // Eigen dot conjugates the left side
}

SU2Element haar_sample(std::mt19937_64& rng) {
    while (true) {
        double q[4];
        for (int i = 0; i < 4; i += 2) {
            double u1;
            do {
                u1 = uniform53(rng);
            } while (u1 == 0.0);
            double u2 = uniform53(rng);
            double r = std::sqrt(-2.0 * std::log(u1));
            q[i] = r * std::cos(2.0 * std::numbers::pi * u2);
            q[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
        }
        double norm2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
        if (norm2 < 1e-24) continue;
        double inv = 1.0 / std::sqrt(norm2);
        return SU2Element(Complex(q[0] * inv, q[3] * inv), Complex(q[1] * inv, q[2] * inv));
    }
}

double clebsch_gordan(HalfInteger j1, HalfInteger m1, HalfInteger j2, HalfInteger m2,
                      HalfInteger big_j, HalfInteger big_m) {
    const int tj1 = j1.twice(), tm1 = m1.twice();
    const int tj2 = j2.twice(), tm2 = m2.twice();
    const int tj = big_j.twice(), tm = big_m.twice();

    if (tj1 < 0 || tj2 < 0 || tj < 0) {
        throw std::invalid_argument("clebsch_gordan: negative spin");
    }
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm) > tj) {
        throw std::invalid_argument("clebsch_gordan: |m| > j");
    }
    if (((tj1 + tm1) & 1) || ((tj2 + tm2) & 1) || ((tj + tm) & 1)) {
        throw std::invalid_argument("clebsch_gordan: m not of the same parity as j");
    }

    if (tm1 + tm2 != tm) return 0.0;
    if (tj > tj1 + tj2 || tj < std::abs(tj1 - tj2) || ((tj1 + tj2 + tj) & 1)) return 0.0;

    // Racah closed form; every factorial argument below is an exact integer.
    auto f = [](int twice) { return factorial(twice / 2); };

    double delta = f(tj1 + tj2 - tj) * f(tj1 - tj2 + tj) * f(-tj1 + tj2 + tj) /
                   f(tj1 + tj2 + tj + 2);
    double pref = std::sqrt((tj + 1.0) * delta * f(tj1 + tm1) * f(tj1 - tm1) * f(tj2 + tm2) *
                            f(tj2 - tm2) * f(tj + tm) * f(tj - tm));

    int k_min = std::max({0, tj2 - tj - tm1, tj1 - tj + tm2}) / 2;
    int k_max = std::min({tj1 + tj2 - tj, tj1 - tm1, tj2 + tm2}) / 2;

    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        double denom = factorial(k) * f(tj1 + tj2 - tj - 2 * k) * f(tj1 - tm1 - 2 * k) *
                       f(tj2 + tm2 - 2 * k) * f(tj - tj2 + tm1 + 2 * k) *
                       f(tj - tj1 - tm2 + 2 * k);
        sum += ((k & 1) ? -1.0 : 1.0) / denom;
    }
    return pref * sum;
}

}  // namespace sfa
