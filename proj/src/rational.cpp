#include "chaincalc/rational.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace chaincalc {

BigInt::BigInt(long long v) {
    if (v == 0) return;
    neg_ = v < 0;
    unsigned long long u = neg_ ? -static_cast<unsigned long long>(v) : static_cast<unsigned long long>(v);
    while (u) {
        mag_.push_back(static_cast<uint32_t>(u & 0xffffffffu));
        u >>= 32;
    }
}

BigInt::BigInt(const std::string& s) {
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    if (i == s.size()) throw std::invalid_argument("BigInt: empty literal");
    BigInt acc;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
        acc = acc * BigInt(10) + BigInt(s[i] - '0');
    }
    *this = acc;
    if (!mag_.empty()) neg_ = neg;
}

void BigInt::trim() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) neg_ = false;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r(std::max(a.size(), b.size()) + 1, 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < r.size(); ++i) {
        uint64_t s = carry;
        if (i < a.size()) s += a[i];
        if (i < b.size()) s += b[i];
        r[i] = static_cast<uint32_t>(s);
        carry = s >> 32;
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

// requires |a| >= |b|
std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r = a;
    int64_t borrow = 0;
    for (size_t i = 0; i < r.size(); ++i) {
        int64_t s = static_cast<int64_t>(r[i]) - borrow - (i < b.size() ? b[i] : 0);
        if (s < 0) {
            s += (1ll << 32);
            borrow = 1;
        } else
            borrow = 0;
        r[i] = static_cast<uint32_t>(s);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

std::vector<uint32_t> BigInt::mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<uint32_t> r(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < b.size(); ++j) {
            uint64_t cur = r[i + j] + static_cast<uint64_t>(a[i]) * b[j] + carry;
            r[i + j] = static_cast<uint32_t>(cur);
            carry = cur >> 32;
        }
        size_t k = i + b.size();
        while (carry) {
            uint64_t cur = r[k] + carry;
            r[k] = static_cast<uint32_t>(cur);
            carry = cur >> 32;
            ++k;
        }
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    if (!r.mag_.empty()) r.neg_ = !r.neg_;
    return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
    BigInt r;
    if (neg_ == o.neg_) {
        r.mag_ = add_mag(mag_, o.mag_);
        r.neg_ = neg_;
    } else {
        int c = cmp_mag(mag_, o.mag_);
        if (c == 0) return BigInt();
        if (c > 0) {
            r.mag_ = sub_mag(mag_, o.mag_);
            r.neg_ = neg_;
        } else {
            r.mag_ = sub_mag(o.mag_, mag_);
            r.neg_ = o.neg_;
        }
    }
    r.trim();
    return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
    BigInt r;
    r.mag_ = mul_mag(mag_, o.mag_);
    r.neg_ = !r.mag_.empty() && (neg_ != o.neg_);
    return r;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
    int c = cmp_mag(a.mag_, b.mag_);
    if (c < 0) {
        q = BigInt();
        r = a;
        return;
    }
    std::vector<uint32_t> quo, rem;
    if (b.mag_.size() == 1) {
        // single-limb divisor
        uint64_t d = b.mag_[0], carry = 0;
        quo.assign(a.mag_.size(), 0);
        for (size_t i = a.mag_.size(); i-- > 0;) {
            uint64_t cur = (carry << 32) | a.mag_[i];
            quo[i] = static_cast<uint32_t>(cur / d);
            carry = cur % d;
        }
        if (carry) rem.push_back(static_cast<uint32_t>(carry));
    } else {
        // Knuth algorithm D on 32-bit limbs
        int shift = 0;
        uint32_t top = b.mag_.back();
        while (!(top & 0x80000000u)) {
            top <<= 1;
            ++shift;
        }
        auto shl = [&](const std::vector<uint32_t>& v) {
            std::vector<uint32_t> out(v.size() + 1, 0);
            for (size_t i = 0; i < v.size(); ++i) {
                out[i] |= v[i] << shift;
                if (shift) out[i + 1] = v[i] >> (32 - shift);
            }
            while (!out.empty() && out.back() == 0) out.pop_back();
            return out;
        };
        std::vector<uint32_t> u = shift ? shl(a.mag_) : a.mag_;
        std::vector<uint32_t> v = shift ? shl(b.mag_) : b.mag_;
        size_t n = v.size(), m = u.size() - n;
        u.push_back(0);
        quo.assign(m + 1, 0);
        for (size_t j = m + 1; j-- > 0;) {
            uint64_t num = (static_cast<uint64_t>(u[j + n]) << 32) | u[j + n - 1];
            uint64_t qhat = num / v[n - 1];
            uint64_t rhat = num % v[n - 1];
            while (qhat > 0xffffffffull ||
                   (n >= 2 && qhat * v[n - 2] > ((rhat << 32) | u[j + n - 2]))) {
                --qhat;
                rhat += v[n - 1];
                if (rhat > 0xffffffffull) break;
            }
            // u[j..j+n] -= qhat * v
            int64_t borrow = 0;
            uint64_t carry = 0;
            for (size_t i = 0; i < n; ++i) {
                uint64_t p = qhat * v[i] + carry;
                carry = p >> 32;
                int64_t t = static_cast<int64_t>(u[i + j]) - static_cast<int64_t>(p & 0xffffffffull) -
                            borrow;
                if (t < 0) {
                    t += (1ll << 32);
                    borrow = 1;
                } else
                    borrow = 0;
                u[i + j] = static_cast<uint32_t>(t);
            }
            int64_t t = static_cast<int64_t>(u[j + n]) - static_cast<int64_t>(carry) - borrow;
            if (t < 0) {
                // qhat one too large: add back
                t += (1ll << 32);
                --qhat;
                uint64_t c2 = 0;
                for (size_t i = 0; i < n; ++i) {
                    uint64_t s = static_cast<uint64_t>(u[i + j]) + v[i] + c2;
                    u[i + j] = static_cast<uint32_t>(s);
                    c2 = s >> 32;
                }
                t += static_cast<int64_t>(c2);
            }
            u[j + n] = static_cast<uint32_t>(t);
            quo[j] = static_cast<uint32_t>(qhat);
        }
        u.resize(n);
        if (shift) {
            // shift the remainder back
            uint32_t carry2 = 0;
            for (size_t i = u.size(); i-- > 0;) {
                uint32_t nv = (u[i] >> shift) | carry2;
                carry2 = shift ? (u[i] << (32 - shift)) : 0;
                u[i] = nv;
            }
        }
        while (!u.empty() && u.back() == 0) u.pop_back();
        rem = u;
    }
    while (!quo.empty() && quo.back() == 0) quo.pop_back();
    q.mag_ = std::move(quo);
    q.neg_ = false;
    q.trim();
    r.mag_ = std::move(rem);
    r.neg_ = false;
    r.trim();
    q.neg_ = !q.mag_.empty() && (a.neg_ != b.neg_);
    r.neg_ = !r.mag_.empty() && a.neg_;
}

BigInt BigInt::operator/(const BigInt& o) const {
    BigInt q, r;
    divmod(*this, o, q, r);
    return q;
}

BigInt BigInt::operator%(const BigInt& o) const {
    BigInt q, r;
    divmod(*this, o, q, r);
    return r;
}

bool BigInt::operator<(const BigInt& o) const {
    if (neg_ != o.neg_) return neg_;
    int c = cmp_mag(mag_, o.mag_);
    return neg_ ? c > 0 : c < 0;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a.neg_ = false;
    b.neg_ = false;
    while (!b.is_zero()) {
        BigInt r = a % b;
        a = b;
        b = r;
        a.neg_ = false;
        b.neg_ = false;
    }
    return a;
}

BigInt BigInt::abs() const {
    BigInt r = *this;
    r.neg_ = false;
    return r;
}

bool BigInt::fits_ll() const {
    if (mag_.size() > 2) return false;
    if (mag_.size() < 2) return true;
    uint64_t v = (static_cast<uint64_t>(mag_[1]) << 32) | mag_[0];
    return neg_ ? v <= (1ull << 63) : v < (1ull << 63);
}

long long BigInt::to_ll() const {
    uint64_t v = 0;
    if (mag_.size() > 0) v |= mag_[0];
    if (mag_.size() > 1) v |= static_cast<uint64_t>(mag_[1]) << 32;
    return neg_ ? -static_cast<long long>(v) : static_cast<long long>(v);
}

std::string BigInt::str() const {
    if (is_zero()) return "0";
    BigInt t = abs();
    std::string digits;
    BigInt ten(10), q, r;
    while (!t.is_zero()) {
        divmod(t, ten, q, r);
        digits.push_back(static_cast<char>('0' + (r.is_zero() ? 0 : r.mag_[0])));
        t = q;
    }
    if (neg_) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

Rat::Rat(BigInt n, BigInt d) { *this = from_big(std::move(n), std::move(d)); }

Rat::Rat(const Rat& o) : n_(o.n_), d_(o.d_) {
    if (o.big_) big_ = std::make_unique<Big>(*o.big_);
}

Rat& Rat::operator=(const Rat& o) {
    n_ = o.n_;
    d_ = o.d_;
    big_ = o.big_ ? std::make_unique<Big>(*o.big_) : nullptr;
    return *this;
}

namespace {
long long ll_gcd(long long a, long long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}
}  // namespace

Rat Rat::from_big(BigInt n, BigInt d) {
    if (d.is_zero()) throw std::domain_error("Rat: zero denominator");
    if (d.sign() < 0) {
        n = -n;
        d = -d;
    }
    if (n.is_zero()) return Rat(0);
    BigInt g = BigInt::gcd(n, d);
    if (!(g == BigInt(1))) {
        n = n / g;
        d = d / g;
    }
    Rat r;
    if (n.fits_ll() && d.fits_ll()) {
        long long nn = n.to_ll(), dd = d.to_ll();
        if (nn > -(1ll << 62) && nn < (1ll << 62) && dd < (1ll << 62)) {
            r.n_ = nn;
            r.d_ = dd;
            return r;
        }
    }
    r.big_ = std::make_unique<Big>(Big{std::move(n), std::move(d)});
    return r;
}

void Rat::shrink() {
    if (!big_) return;
    if (big_->n.fits_ll() && big_->d.fits_ll()) {
        long long nn = big_->n.to_ll(), dd = big_->d.to_ll();
        if (nn > -(1ll << 62) && nn < (1ll << 62) && dd < (1ll << 62)) {
            n_ = nn;
            d_ = dd;
            big_.reset();
        }
    }
}

BigInt Rat::num() const { return big_ ? big_->n : BigInt(n_); }
BigInt Rat::den() const { return big_ ? big_->d : BigInt(d_); }

bool Rat::is_one() const { return big_ ? (big_->n == big_->d) : (n_ == 1 && d_ == 1); }

int Rat::sign() const { return big_ ? big_->n.sign() : (n_ > 0 ? 1 : n_ < 0 ? -1 : 0); }

Rat Rat::operator+(const Rat& o) const {
    if (!big_ && !o.big_) {
        long long x1, x2, nn, dd;
        if (!__builtin_mul_overflow(n_, o.d_, &x1) && !__builtin_mul_overflow(o.n_, d_, &x2) &&
            !__builtin_add_overflow(x1, x2, &nn) && !__builtin_mul_overflow(d_, o.d_, &dd)) {
            if (nn == 0) return Rat(0);
            long long g = ll_gcd(nn, dd);
            Rat r;
            r.n_ = nn / g;
            r.d_ = dd / g;
            return r;
        }
    }
    return from_big(num() * o.den() + o.num() * den(), den() * o.den());
}

Rat Rat::operator-(const Rat& o) const { return *this + (-o); }

Rat Rat::operator*(const Rat& o) const {
    if (!big_ && !o.big_) {
        long long g1 = ll_gcd(n_, o.d_), g2 = ll_gcd(o.n_, d_);
        long long a = n_ / (g1 ? g1 : 1), b = o.n_ / (g2 ? g2 : 1);
        long long c = d_ / (g2 ? g2 : 1), dq = o.d_ / (g1 ? g1 : 1);
        long long nn, dd;
        if (!__builtin_mul_overflow(a, b, &nn) && !__builtin_mul_overflow(c, dq, &dd)) {
            Rat r;
            r.n_ = nn;
            r.d_ = dd;
            return r;
        }
    }
    return from_big(num() * o.num(), den() * o.den());
}

Rat Rat::operator/(const Rat& o) const {
    if (o.is_zero()) throw std::domain_error("Rat: division by zero");
    return *this * o.inv();
}

Rat Rat::operator-() const {
    Rat r = *this;
    if (r.big_)
        r.big_->n = -r.big_->n;
    else
        r.n_ = -r.n_;
    return r;
}

bool Rat::operator==(const Rat& o) const {
    if (!big_ && !o.big_) return n_ == o.n_ && d_ == o.d_;
    return num() == o.num() && den() == o.den();
}

bool Rat::operator<(const Rat& o) const {
    if (!big_ && !o.big_) {
        long long x1, x2;
        if (!__builtin_mul_overflow(n_, o.d_, &x1) && !__builtin_mul_overflow(o.n_, d_, &x2))
            return x1 < x2;
    }
    return (num() * o.den()) < (o.num() * den());
}

Rat Rat::inv() const {
    if (is_zero()) throw std::domain_error("Rat: inverse of zero");
    if (!big_) {
        Rat r;
        if (n_ > 0) {
            r.n_ = d_;
            r.d_ = n_;
        } else {
            r.n_ = -d_;
            r.d_ = -n_;
        }
        return r;
    }
    return from_big(den(), num());
}

bool Rat::is_integer() const { return big_ ? big_->d == BigInt(1) : d_ == 1; }

long long Rat::to_ll() const {
    if (!is_integer()) throw std::domain_error("Rat: not a small integer");
    if (!big_) return n_;
    if (!big_->n.fits_ll()) throw std::domain_error("Rat: not a small integer");
    return big_->n.to_ll();
}

std::string Rat::str() const {
    if (is_integer()) return num().str();
    return num().str() + "/" + den().str();
}

Rat Rat::parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(BigInt(s), BigInt(1));
    return Rat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

}  // namespace chaincalc
