#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chaincalc/sheaf.hpp"

using namespace chaincalc;

namespace {
SubchainLineBundle B(int s, int t, std::vector<int> d) { return SubchainLineBundle(s, t, std::move(d)); }
}

TEST_CASE("embed shapes") {
    ChainConfig cfg(2);
    LinkedSheaf e = embed(cfg, B(1, 1, {0}));
    CHECK(e.rank(1) == 1);
    CHECK(e.rank(2) == 0);
    CHECK(e.links[0].c() == 0);
    LinkedSheaf z = embed(cfg, B(1, 2, {0, 0}));
    CHECK(z.links[0].c() == 1);
    z.validate();
    ChainConfig cfg3(3);
    LinkedSheaf w = embed(cfg3, B(1, 3, {-1, 0, 0}));
    CHECK(w.links[0].c() == 1);
    CHECK(w.links[1].c() == 1);
}

TEST_CASE("k class of subchain bundles") {
    ChainConfig cfg(2);
    KClass k = k_class(cfg, B(1, 1, {-1}));
    CHECK(k.curve_mult == std::vector<long long>{1, 0});
    CHECK(k.point_mult == 0);
    k = k_class(cfg, B(1, 1, {0}));
    CHECK(k.point_mult == 1);
    k = k_class(cfg, B(1, 2, {0, 0}));
    CHECK(k.curve_mult == std::vector<long long>{1, 1});
    CHECK(k.point_mult == 1);
    // spherical classes have square length 2
    ChainConfig cfg4(4);
    for (auto& r : {B(1, 3, {0, -1, 2}), B(2, 4, {1, 1, -2}), B(1, 1, {5})}) {
        KClass kk = k_class(cfg4, r);
        CHECK(euler_form(kk, kk) == 2);
    }
}

TEST_CASE("dualizing sheaf values") {
    CHECK(dualizing_sheaf(ChainConfig(1)) == B(1, 1, {-2}));
    CHECK(dualizing_sheaf(ChainConfig(2)) == B(1, 2, {-1, -1}));
    CHECK(dualizing_sheaf(ChainConfig(4)) == B(1, 4, {-1, 0, 0, -1}));
}

TEST_CASE("lex order on Sigma_{C_1}") {
    CHECK(lex_compare(B(1, 1, {1}), B(1, 1, {0})) == 1);
    CHECK(lex_compare(B(1, 1, {0}), B(1, 2, {0, 5})) == 1);  // shorter support wins
    CHECK(lex_compare(B(1, 2, {0, 1}), B(1, 2, {0, 1})) == 0);
}

TEST_CASE("hom dimensions on single curve") {
    ChainConfig cfg(1);
    LinkedSheaf oa = embed(cfg, B(1, 1, {2}));
    CHECK(hom_dim(oa, oa) == 1);
    CHECK(hom_dim(embed(cfg, B(1, 1, {1})), oa) == 2);  // h0(O(1))
    CHECK(hom_dim(oa, embed(cfg, B(1, 1, {1}))) == 0);
}

TEST_CASE("hom dimensions across nodes") {
    ChainConfig cfg(2);
    LinkedSheaf oz = embed(cfg, B(1, 2, {0, 0}));
    LinkedSheaf o1 = embed(cfg, B(1, 1, {0}));
    // restriction O_Z -> O_{C_1} is the only map up to scalar
    CHECK(hom_dim(oz, o1) == 1);
    // no maps O_{C_1} -> O_Z(0,0): the section would need to vanish at the node
    CHECK(hom_dim(o1, oz) == 0);
    CHECK(hom_dim(oz, oz) == 1);
    // global sections of O_Z(0,0): constants glued at the node
    CHECK(h0(oz) == 1);
    CHECK(h1(oz) == 0);
    CHECK(h0(embed(cfg, B(1, 2, {1, 1}))) == 3);
}

TEST_CASE("composition and validity") {
    ChainConfig cfg(2);
    LinkedSheaf oz = embed(cfg, B(1, 2, {0, 0}));
    LinkedSheaf o1 = embed(cfg, B(1, 1, {0}));
    auto ab = hom_space(oz, o1);
    REQUIRE(ab.size() == 1);
    CHECK(morphism_valid(ab[0]));
    auto idz = identity_morphism(oz);
    auto comp = compose(ab[0], idz);
    CHECK(!comp.is_zero());
    CHECK(morphism_valid(comp));
}

TEST_CASE("kernel of evaluation on P1") {
    // ev: O(a-1)^2 -> O(a) has kernel O(a-2)
    ChainConfig cfg(1);
    LinkedSheaf src = direct_sum(embed(cfg, B(1, 1, {1})), embed(cfg, B(1, 1, {1})));
    LinkedSheaf dst = embed(cfg, B(1, 1, {2}));
    auto maps = hom_space(src, dst);
    // pick a surjective combination: first basis vector may be degenerate, look for one
    SheafMorphism ev = zero_morphism(src, dst);
    // directly build: (z, 1+0z) columns
    ev.entries[0][0][0] = PolyQ::monomial(1, Rat(1));
    ev.entries[0][0][1] = PolyQ::constant(Rat(1));
    REQUIRE(morphism_valid(ev));
    KernelResult k = kernel(ev);
    CHECK(k.kernel.degs[0] == std::vector<int>{0});
    CHECK(morphism_valid(k.inclusion));
    CHECK(compose(ev, k.inclusion).is_zero());
}

TEST_CASE("kernel of zero and identity") {
    ChainConfig cfg(2);
    LinkedSheaf oz = embed(cfg, B(1, 2, {0, 0}));
    KernelResult kz = kernel(zero_morphism(oz, oz));
    CHECK(sheaves_isomorphic(kz.kernel, oz));
    KernelResult ki = kernel(identity_morphism(oz));
    CHECK(ki.kernel.is_empty());
}

TEST_CASE("cokernel basics") {
    ChainConfig cfg(1);
    // 0 map: cokernel is the target
    LinkedSheaf oa = embed(cfg, B(1, 1, {3}));
    auto c0 = cokernel(zero_morphism(embed(cfg, B(1, 1, {0})), oa));
    CHECK(sheaves_isomorphic(c0.pure, oa));
    CHECK(c0.torsion_total == 0);
    // a nonzero section O(a-1) -> O(a): length-1 skyscraper
    LinkedSheaf s = embed(cfg, B(1, 1, {2}));
    SheafMorphism f = zero_morphism(s, oa);
    f.entries[0][0][0] = PolyQ::monomial(1, Rat(1));
    auto c1 = cokernel(f);
    CHECK(c1.pure.is_empty());
    CHECK(c1.torsion_total == 1);
    // evaluation O(a-1)^2 -> O(a) is onto
    LinkedSheaf s2 = direct_sum(s, s);
    SheafMorphism ev = zero_morphism(s2, oa);
    ev.entries[0][0][0] = PolyQ::monomial(1, Rat(1));
    ev.entries[0][0][1] = PolyQ::constant(Rat(1));
    auto c2 = cokernel(ev);
    CHECK(c2.pure.is_empty());
    CHECK(c2.torsion_total == 0);
}

TEST_CASE("cokernel across a node") {
    // O_{C_1}(a_1 - 1) -> O_Z(a): cokernel O_{C_2..C_n}(a_2..)
    ChainConfig cfg(3);
    LinkedSheaf oz = embed(cfg, B(1, 3, {1, 0, 2}));
    LinkedSheaf s = embed(cfg, B(1, 1, {0}));
    auto maps = hom_space(s, oz);
    REQUIRE(maps.size() == 1);
    auto c = cokernel(maps[0]);
    CHECK(c.torsion_total == 0);
    CHECK(sheaves_isomorphic(c.pure, embed(cfg, B(2, 3, {0, 2}))));
}

TEST_CASE("decompose atoms and sums") {
    ChainConfig cfg(2);
    LinkedSheaf oz = embed(cfg, B(1, 2, {0, 0}));
    auto d = decompose(oz);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == B(1, 2, {0, 0}));
    LinkedSheaf sum = direct_sum(embed(cfg, B(1, 1, {0})), embed(cfg, B(2, 2, {0})));
    auto d2 = decompose(sum);
    REQUIRE(d2.size() == 2);
    CHECK(d2[0] == B(1, 1, {0}));
    CHECK(d2[1] == B(2, 2, {0}));
}

TEST_CASE("decompose detects nonsplit gluing") {
    // the unique nonsplit extension of O_{C_1} by O_{C_2} is O_Z(0,1)... built directly:
    // sub of (i_1)O(0) + (i_2)O(1) with a rank-1 link gives a connected bundle
    ChainConfig cfg(2);
    LinkedSheaf e(2);
    e.degs[0] = {0};
    e.degs[1] = {1};
    e.links[0].L = QMat(1, 1);
    e.links[0].M = QMat(1, 1);
    e.links[0].L.at(0, 0) = Rat(1);
    e.links[0].M.at(0, 0) = Rat(1);
    auto d = decompose(e);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == B(1, 2, {0, 1}));
}

TEST_CASE("decompose invariant under link conjugation") {
    ChainConfig cfg(3);
    LinkedSheaf e = direct_sum(embed(cfg, B(1, 2, {0, 0})), embed(cfg, B(2, 3, {-1, 1})));
    auto base = decompose(e);
    for (uint64_t seed : {1ull, 7ull, 99ull}) {
        auto d = decompose(conjugate_links(e, seed));
        CHECK(d == base);
    }
}

TEST_CASE("hom dim invariant under conjugation") {
    ChainConfig cfg(3);
    LinkedSheaf a = embed(cfg, B(1, 3, {0, -1, 0}));
    LinkedSheaf b = embed(cfg, B(1, 2, {0, 0}));
    size_t d0 = hom_dim(a, b);
    CHECK(hom_dim(conjugate_links(a, 5), conjugate_links(b, 9)) == d0);
}
