#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "chaincalc/matrix.hpp"

namespace chaincalc {

// A chain Z = C_1 u ... u C_n of -2-curves. Node i joins C_i and C_{i+1},
// so nodes are indexed 1..n-1. Curves are indexed 1..n throughout.
struct ChainConfig {
    int n = 1;
    explicit ChainConfig(int n_) : n(n_) {
        if (n < 1) throw std::invalid_argument("ChainConfig: n must be >= 1");
    }
    bool operator==(const ChainConfig& o) const { return n == o.n; }
};

// Class in K_Z(X) in the basis ([O_{C_1}(-1)], ..., [O_{C_n}(-1)], [O_x]).
struct KClass {
    std::vector<long long> curve_mult;  // length n
    long long point_mult = 0;

    KClass() = default;
    KClass(int n) : curve_mult(n, 0) {}
    int n() const { return static_cast<int>(curve_mult.size()); }

    KClass operator+(const KClass& o) const;
    KClass operator-(const KClass& o) const;
    KClass operator-() const;
    KClass scaled(long long c) const;
    bool operator==(const KClass& o) const {
        return curve_mult == o.curve_mult && point_mult == o.point_mult;
    }
    bool is_zero() const;
};

// Element of Pic X recorded by its degree vector (deg L|_{C_1}, ..., deg L|_{C_n}).
struct PicElement {
    std::vector<int> degrees;
    PicElement() = default;
    explicit PicElement(std::vector<int> d) : degrees(std::move(d)) {}
    int n() const { return static_cast<int>(degrees.size()); }
    PicElement operator+(const PicElement& o) const;
    PicElement operator-() const;
    bool operator==(const PicElement& o) const { return degrees == o.degrees; }
    bool is_zero() const;
};

// A_n Cartan entry -C_i.C_j: 2 on the diagonal, -1 for adjacent curves.
int cartan_pairing(const ChainConfig& cfg, int i, int j);
QMat cartan_matrix(const ChainConfig& cfg);

// Euler pairing chi(x, y); the point class pairs to zero with everything.
long long euler_form(const KClass& x, const KClass& y);

// Reflection x |-> x - chi(sigma, x) sigma for a spherical class sigma.
KClass twist_k_action(const KClass& sigma, const KClass& x);

// Membership of L in the sublattice spanned by the classes of O_X(C_i).
std::optional<std::vector<long long>> root_lattice_member(const ChainConfig& cfg, const PicElement& L);

// Residue of L in Pic X / (root lattice) = Z/(n+1).
int weight_mod_root(const ChainConfig& cfg, const PicElement& L);

// Degree vector of O_X(C_i) restricted to the curves (column i of -Cartan).
PicElement pic_of_curve(const ChainConfig& cfg, int i);

}  // namespace chaincalc
