#include "chaincalc/chain.hpp"

#include <stdexcept>

namespace chaincalc {

KClass KClass::operator+(const KClass& o) const {
    if (curve_mult.size() != o.curve_mult.size()) throw std::invalid_argument("KClass: mismatched n");
    KClass r = *this;
    for (size_t i = 0; i < curve_mult.size(); ++i) r.curve_mult[i] += o.curve_mult[i];
    r.point_mult += o.point_mult;
    return r;
}

KClass KClass::operator-(const KClass& o) const { return *this + (-o); }

KClass KClass::operator-() const {
    KClass r = *this;
    for (auto& v : r.curve_mult) v = -v;
    r.point_mult = -r.point_mult;
    return r;
}

KClass KClass::scaled(long long c) const {
    KClass r = *this;
    for (auto& v : r.curve_mult) v *= c;
    r.point_mult *= c;
    return r;
}

bool KClass::is_zero() const {
    if (point_mult != 0) return false;
    for (auto v : curve_mult)
        if (v != 0) return false;
    return true;
}

PicElement PicElement::operator+(const PicElement& o) const {
    if (degrees.size() != o.degrees.size()) throw std::invalid_argument("PicElement: mismatched n");
    PicElement r = *this;
    for (size_t i = 0; i < degrees.size(); ++i) r.degrees[i] += o.degrees[i];
    return r;
}

PicElement PicElement::operator-() const {
    PicElement r = *this;
    for (auto& v : r.degrees) v = -v;
    return r;
}

bool PicElement::is_zero() const {
    for (auto v : degrees)
        if (v != 0) return false;
    return true;
}

int cartan_pairing(const ChainConfig& cfg, int i, int j) {
    if (i < 1 || i > cfg.n || j < 1 || j > cfg.n) throw std::out_of_range("cartan_pairing: curve index");
    if (i == j) return 2;
    if (i == j + 1 || j == i + 1) return -1;
    return 0;
}

QMat cartan_matrix(const ChainConfig& cfg) {
    QMat m(cfg.n, cfg.n);
    for (int i = 1; i <= cfg.n; ++i)
        for (int j = 1; j <= cfg.n; ++j) m.at(i - 1, j - 1) = Rat(cartan_pairing(cfg, i, j));
    return m;
}

long long euler_form(const KClass& x, const KClass& y) {
    if (x.curve_mult.size() != y.curve_mult.size()) throw std::invalid_argument("euler_form: mismatched n");
    ChainConfig cfg(x.n());
    long long s = 0;
    for (int i = 1; i <= cfg.n; ++i)
        for (int j = 1; j <= cfg.n; ++j)
            s += x.curve_mult[i - 1] * cartan_pairing(cfg, i, j) * y.curve_mult[j - 1];
    return s;
}

KClass twist_k_action(const KClass& sigma, const KClass& x) {
    if (euler_form(sigma, sigma) != 2)
        throw std::invalid_argument("twist_k_action: sigma is not of square-length 2");
    long long c = euler_form(sigma, x);
    return x - sigma.scaled(c);
}

PicElement pic_of_curve(const ChainConfig& cfg, int i) {
    std::vector<int> d(cfg.n, 0);
    for (int l = 1; l <= cfg.n; ++l) d[l - 1] = -cartan_pairing(cfg, i, l);
    return PicElement(d);
}

std::optional<std::vector<long long>> root_lattice_member(const ChainConfig& cfg, const PicElement& L) {
    if (L.n() != cfg.n) throw std::invalid_argument("root_lattice_member: mismatched n");
    // degrees = sum_i x_i * deg O_X(C_i) = -Cartan * x
    QMat m = cartan_matrix(cfg);
    std::vector<Rat> b(cfg.n);
    for (int l = 0; l < cfg.n; ++l) b[l] = Rat(-L.degrees[l]);
    auto x = solve(m, b);
    if (!x) return std::nullopt;
    std::vector<long long> out(cfg.n);
    for (int i = 0; i < cfg.n; ++i) {
        if (!(*x)[i].is_integer()) return std::nullopt;
        out[i] = (*x)[i].to_ll();
    }
    return out;
}

int weight_mod_root(const ChainConfig& cfg, const PicElement& L) {
    if (L.n() != cfg.n) throw std::invalid_argument("weight_mod_root: mismatched n");
    // The map d |-> sum i*d_i kills every column of -Cartan and hits 1 on e_1.
    long long s = 0;
    for (int i = 1; i <= cfg.n; ++i) s += static_cast<long long>(i) * L.degrees[i - 1];
    long long m = cfg.n + 1;
    return static_cast<int>(((s % m) + m) % m);
}

}  // namespace chaincalc
