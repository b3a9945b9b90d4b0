#include "chaincalc/poly.hpp"

#include <stdexcept>

namespace chaincalc {

PolyQ PolyQ::constant(const Rat& r) { return PolyQ(std::vector<Rat>{r}); }

PolyQ PolyQ::monomial(size_t deg, const Rat& r) {
    std::vector<Rat> c(deg + 1, Rat(0));
    c[deg] = r;
    return PolyQ(std::move(c));
}

void PolyQ::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

PolyQ PolyQ::operator+(const PolyQ& o) const {
    std::vector<Rat> r(std::max(c_.size(), o.c_.size()), Rat(0));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) + o.coeff(i);
    return PolyQ(std::move(r));
}

PolyQ PolyQ::operator-(const PolyQ& o) const {
    std::vector<Rat> r(std::max(c_.size(), o.c_.size()), Rat(0));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) - o.coeff(i);
    return PolyQ(std::move(r));
}

PolyQ PolyQ::operator*(const PolyQ& o) const {
    if (is_zero() || o.is_zero()) return PolyQ();
    std::vector<Rat> r(c_.size() + o.c_.size() - 1, Rat(0));
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return PolyQ(std::move(r));
}

PolyQ PolyQ::scaled(const Rat& r) const {
    std::vector<Rat> c = c_;
    for (auto& v : c) v *= r;
    return PolyQ(std::move(c));
}

PolyQ PolyQ::reversed(int bound) const {
    if (bound < 0) {
        if (!is_zero()) throw std::invalid_argument("PolyQ: negative bound on nonzero poly");
        return PolyQ();
    }
    if (degree() > bound) throw std::invalid_argument("PolyQ: degree above bound in reversal");
    std::vector<Rat> r(static_cast<size_t>(bound) + 1, Rat(0));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(static_cast<size_t>(bound) - i);
    return PolyQ(std::move(r));
}

std::string PolyQ::str() const {
    if (is_zero()) return "0";
    std::string s;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        if (!s.empty()) s += " + ";
        s += c_[i].str();
        if (i >= 1) s += "*z" + (i > 1 ? "^" + std::to_string(i) : std::string());
    }
    return s;
}

}  // namespace chaincalc
