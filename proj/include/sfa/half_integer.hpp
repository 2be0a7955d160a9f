#pragma once

namespace sfa {

// Exact half-integer spin label, stored as 2j. Arithmetic never leaves the
// integers; the floating value is produced only at the numerical boundary.
class HalfInteger {
  public:
    constexpr HalfInteger() = default;

    static constexpr HalfInteger from_twice(int twice) { return HalfInteger(twice); }
    static constexpr HalfInteger from_int(int j) { return HalfInteger(2 * j); }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * static_cast<double>(twice_); }
    constexpr bool is_integral() const { return (twice_ & 1) == 0; }

    friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) {
        return HalfInteger(a.twice_ + b.twice_);
    }
    friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) {
        return HalfInteger(a.twice_ - b.twice_);
    }
    constexpr HalfInteger operator-() const { return HalfInteger(-twice_); }
    friend constexpr bool operator==(HalfInteger a, HalfInteger b) = default;
    friend constexpr bool operator<(HalfInteger a, HalfInteger b) { return a.twice_ < b.twice_; }
    friend constexpr bool operator<=(HalfInteger a, HalfInteger b) { return a.twice_ <= b.twice_; }
    friend constexpr bool operator>(HalfInteger a, HalfInteger b) { return a.twice_ > b.twice_; }
    friend constexpr bool operator>=(HalfInteger a, HalfInteger b) { return a.twice_ >= b.twice_; }

    constexpr HalfInteger abs() const { return HalfInteger(twice_ < 0 ? -twice_ : twice_); }

  private:
    constexpr explicit HalfInteger(int twice) : twice_(twice) {}
    int twice_ = 0;
};

inline constexpr HalfInteger kSpinHalf = HalfInteger::from_twice(1);
inline constexpr HalfInteger kSpinZero = HalfInteger::from_twice(0);
inline constexpr HalfInteger kSpinOne = HalfInteger::from_twice(2);

}  // namespace sfa
