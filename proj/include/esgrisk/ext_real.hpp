#ifndef ESGRISK_EXT_REAL_HPP
#define ESGRISK_EXT_REAL_HPP

#include <cmath>
#include <limits>

namespace esgrisk {

// Extended real number for utility values. Arithmetic follows the usual
// extended-real rules with two fixed conventions:
//
//   inf - inf = -inf   (so -inf absorbs under addition)
//   0 * inf   = 0
//
// These make the multi-attribute composition u1 + u2 + k*u1*u2 well defined
// whenever one factor is -inf, and they live here and nowhere else.
class ExtReal {
public:
    constexpr ExtReal() : v_(0.0) {}
    constexpr ExtReal(double v) : v_(v) {} // NOLINT: implicit by design

    static constexpr ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }
    static constexpr ExtReal pos_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }

    bool is_finite() const { return std::isfinite(v_); }
    bool is_neg_inf() const { return std::isinf(v_) && v_ < 0.0; }
    bool is_pos_inf() const { return std::isinf(v_) && v_ > 0.0; }

    // Finite value, or IEEE +/-inf for the distinguished values.
    double value() const { return v_; }

    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
        return ExtReal(a.v_ + b.v_);
    }

    friend ExtReal operator*(ExtReal a, ExtReal b) {
        if (a.v_ == 0.0 || b.v_ == 0.0) return ExtReal(0.0);
        return ExtReal(a.v_ * b.v_);
    }

    friend ExtReal operator-(ExtReal a) { return ExtReal(-a.v_); }
    friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
    friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
    friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
    friend bool operator>(ExtReal a, ExtReal b) { return a.v_ > b.v_; }
    friend bool operator>=(ExtReal a, ExtReal b) { return a.v_ >= b.v_; }

private:
    double v_;
};

} // namespace esgrisk

#endif
