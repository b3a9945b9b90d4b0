#pragma once

#include <vector>

#include "chaincalc/rational.hpp"

namespace chaincalc {

// Univariate polynomial over Q, ascending coefficients, no trailing zeros.
class PolyQ {
public:
    PolyQ() = default;
    explicit PolyQ(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }
    static PolyQ constant(const Rat& r);
    static PolyQ monomial(size_t deg, const Rat& r);

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    Rat coeff(size_t k) const { return k < c_.size() ? c_[k] : Rat(0); }
    const std::vector<Rat>& coeffs() const { return c_; }

    PolyQ operator+(const PolyQ& o) const;
    PolyQ operator-(const PolyQ& o) const;
    PolyQ operator*(const PolyQ& o) const;
    PolyQ scaled(const Rat& r) const;
    bool operator==(const PolyQ& o) const { return c_ == o.c_; }

    Rat eval_zero() const { return coeff(0); }
    // Value in the opposite chart at w = 0: coefficient of z^bound (zero when deg < bound).
    Rat eval_infinity(int bound) const { return bound < 0 ? Rat(0) : coeff(static_cast<size_t>(bound)); }
    // Coefficient reversal z -> 1/w with the given degree bound.
    PolyQ reversed(int bound) const;

    std::string str() const;

private:
    void trim();
    std::vector<Rat> c_;
};

}  // namespace chaincalc
