#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaincalc/chain.hpp"
#include "chaincalc/matrix.hpp"
#include "chaincalc/poly.hpp"

namespace chaincalc {

// Structured failure of an engine computation (unsupported torsion, ambiguous
// gluing, ...). Callers that can retry catch it; the CLI maps it to exit 3.
struct EngineError : std::runtime_error {
    explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

// Line bundle O_{C_s u ... u C_t}(a_s, ..., a_t) on a subchain; the atoms of Sigma(Z).
struct SubchainLineBundle {
    int s = 1, t = 1;
    std::vector<int> degs;

    SubchainLineBundle() = default;
    SubchainLineBundle(int s_, int t_, std::vector<int> d) : s(s_), t(t_), degs(std::move(d)) {
        if (s < 1 || t < s || degs.size() != static_cast<size_t>(t - s + 1))
            throw std::invalid_argument("SubchainLineBundle: bad support/degrees");
    }
    static SubchainLineBundle single(int curve, int a) { return SubchainLineBundle(curve, curve, {a}); }

    int len() const { return t - s + 1; }
    bool contains(int curve) const { return s <= curve && curve <= t; }
    int deg_at(int curve) const { return degs.at(curve - s); }

    bool operator==(const SubchainLineBundle& o) const { return s == o.s && t == o.t && degs == o.degs; }
    bool operator<(const SubchainLineBundle& o) const;  // canonical (s, t, degs) order
    std::string str() const;
};

SubchainLineBundle dualizing_sheaf(const ChainConfig& cfg);
SubchainLineBundle tensor_pic(const SubchainLineBundle& r, const PicElement& L);
SubchainLineBundle flip_bundle(const ChainConfig& cfg, const SubchainLineBundle& r);
KClass k_class(const ChainConfig& cfg, const SubchainLineBundle& r);

// Lexicographic order on Sigma_{C_s}: larger degrees first, shorter support wins ties.
// Requires equal left endpoint.
int lex_compare(const SubchainLineBundle& r, const SubchainLineBundle& sbundle);

// Pure 1-dimensional sheaf on Z: a split bundle sum(O(d_{i,k})) on each curve plus
// full-row-rank link matrices at the nodes. Chart convention on C_i = P^1: the left
// node at z = 0, the right node at z = infinity; a section of O(d) is a polynomial of
// degree <= d, its left fiber value the constant term and its right fiber value the
// coefficient of z^d.
struct NodeLink {
    QMat L;  // c x r_i
    QMat M;  // c x r_{i+1}
    size_t c() const { return L.rows(); }
};

struct LinkedSheaf {
    int n = 1;
    std::vector<std::vector<int>> degs;  // per curve, one entry per summand
    std::vector<NodeLink> links;         // n-1 nodes

    LinkedSheaf() = default;
    explicit LinkedSheaf(int n_);

    int rank(int curve) const { return static_cast<int>(degs[curve - 1].size()); }
    bool is_empty() const;
    long long chi() const;
    KClass k() const;
    std::vector<int> curve_ranks() const;
    bool supported_only(int s, int t) const;  // support inside [s,t]

    void validate() const;  // invariants: shapes, full row rank, c <= min
    std::string str() const;
};

LinkedSheaf embed(const ChainConfig& cfg, const SubchainLineBundle& r);
LinkedSheaf direct_sum(const LinkedSheaf& a, const LinkedSheaf& b);
LinkedSheaf tensor_pic(const LinkedSheaf& e, const PicElement& L);

// Morphism of linked sheaves: per curve a polynomial matrix, entry (k,l) of degree
// <= dst.deg[k] - src.deg[l], satisfying the node constraints of the target on every
// attainable fiber pair of the source.
struct SheafMorphism {
    LinkedSheaf src, dst;
    std::vector<std::vector<std::vector<PolyQ>>> entries;  // [curve][k][l]

    QMat fiber_left(int curve) const;
    QMat fiber_right(int curve) const;
    bool is_zero() const;
    SheafMorphism scaled(const Rat& c) const;
    SheafMorphism operator+(const SheafMorphism& o) const;
};

SheafMorphism zero_morphism(const LinkedSheaf& src, const LinkedSheaf& dst);
SheafMorphism identity_morphism(const LinkedSheaf& e);
SheafMorphism compose(const SheafMorphism& g, const SheafMorphism& f);  // g after f
bool morphism_valid(const SheafMorphism& f);

// Deterministic ordered basis of Hom(E, F).
std::vector<SheafMorphism> hom_space(const LinkedSheaf& e, const LinkedSheaf& f);
size_t hom_dim(const LinkedSheaf& e, const LinkedSheaf& f);
// Coordinates of a morphism in the hom_space basis.
std::vector<Rat> hom_coordinates(const SheafMorphism& f);

size_t h0(const LinkedSheaf& e);
size_t h1(const LinkedSheaf& e);

struct KernelResult {
    LinkedSheaf kernel;
    SheafMorphism inclusion;
};
KernelResult kernel(const SheafMorphism& f);

struct TorsionPoint {
    int curve;
    std::string where;  // "z=0", "z=inf", "interior"
    long long length;
};
struct CokernelResult {
    LinkedSheaf pure;
    SheafMorphism projection;  // dst -> pure
    long long torsion_total = 0;
    std::vector<TorsionPoint> torsion;
};
CokernelResult cokernel(const SheafMorphism& f);

// Unique Sigma(Z) decomposition of a pure sheaf (multiset, canonically sorted).
std::vector<SubchainLineBundle> decompose(const LinkedSheaf& e);

// Isomorphism test; when produce_witness an explicit isomorphism is returned.
bool sheaves_isomorphic(const LinkedSheaf& a, const LinkedSheaf& b,
                        SheafMorphism* witness = nullptr);

// Replace node link data by an equivalent presentation (row operations only);
// used by the randomized invariance tests.
LinkedSheaf conjugate_links(const LinkedSheaf& e, uint64_t seed);

// Canonical direct sum of embeds.
LinkedSheaf embed_sum(const ChainConfig& cfg, const std::vector<SubchainLineBundle>& parts);

}  // namespace chaincalc
