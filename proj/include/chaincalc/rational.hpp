#pragma once

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>
#include <iosfwd>

namespace chaincalc {

// Arbitrary-precision signed integer, magnitude stored base 2^32 little-endian.
// Small by design: the solvers only need +, -, *, divmod and gcd.
class BigInt {
public:
    BigInt() = default;
    BigInt(long long v);
    explicit BigInt(const std::string& decimal);

    bool is_zero() const { return mag_.empty(); }
    int sign() const { return mag_.empty() ? 0 : (neg_ ? -1 : 1); }

    BigInt operator-() const;
    BigInt operator+(const BigInt& o) const;
    BigInt operator-(const BigInt& o) const;
    BigInt operator*(const BigInt& o) const;
    // Truncated division (quotient rounds toward zero).
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
    BigInt operator/(const BigInt& o) const;
    BigInt operator%(const BigInt& o) const;

    bool operator==(const BigInt& o) const { return neg_ == o.neg_ && mag_ == o.mag_; }
    bool operator!=(const BigInt& o) const { return !(*this == o); }
    bool operator<(const BigInt& o) const;

    static BigInt gcd(BigInt a, BigInt b);
    BigInt abs() const;

    size_t limbs() const { return mag_.size(); }
    bool fits_ll() const;
    long long to_ll() const;  // valid only when fits_ll()
    std::string str() const;

private:
    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    void trim();

    bool neg_ = false;
    std::vector<uint32_t> mag_;
};

// Exact rational number, normalized (gcd 1, positive denominator), with an
// inline machine-word fast path and BigInt fallback on overflow.
class Rat {
public:
    Rat() : n_(0), d_(1) {}
    Rat(long long v) : n_(v), d_(1) {}
    Rat(BigInt n, BigInt d);
    Rat(const Rat& o);
    Rat(Rat&& o) noexcept = default;
    Rat& operator=(const Rat& o);
    Rat& operator=(Rat&& o) noexcept = default;

    BigInt num() const;
    BigInt den() const;
    bool is_zero() const { return big_ ? big_num_ref().is_zero() : n_ == 0; }
    bool is_one() const;
    int sign() const;

    Rat operator+(const Rat& o) const;
    Rat operator-(const Rat& o) const;
    Rat operator*(const Rat& o) const;
    Rat operator/(const Rat& o) const;
    Rat operator-() const;
    Rat& operator+=(const Rat& o) { *this = *this + o; return *this; }
    Rat& operator-=(const Rat& o) { *this = *this - o; return *this; }
    Rat& operator*=(const Rat& o) { *this = *this * o; return *this; }
    Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

    bool operator==(const Rat& o) const;
    bool operator!=(const Rat& o) const { return !(*this == o); }
    bool operator<(const Rat& o) const;

    Rat inv() const;
    bool is_integer() const;
    long long to_ll() const;  // requires integer value that fits
    std::string str() const;
    static Rat parse(const std::string& s);  // "p" or "p/q"

private:
    struct Big {
        BigInt n, d;
    };
    const BigInt& big_num_ref() const { return big_->n; }
    static Rat from_big(BigInt n, BigInt d);
    void shrink();  // demote a big value that fits machine words

    long long n_ = 0, d_ = 1;    // valid when !big_
    std::unique_ptr<Big> big_;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

}  // namespace chaincalc
