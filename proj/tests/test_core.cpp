#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chaincalc/chain.hpp"
#include "chaincalc/matrix.hpp"
#include "chaincalc/poly.hpp"
#include "chaincalc/rational.hpp"

using namespace chaincalc;

TEST_CASE("bigint arithmetic") {
    BigInt a("123456789123456789"), b("-987654321");
    CHECK((a * b).str() == "-121932631234567900112635269");
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    CHECK((q * b + r) == a);
    CHECK(BigInt::gcd(BigInt(48), BigInt(-18)) == BigInt(6));
    CHECK(BigInt("12345678901234567890123").str() == "12345678901234567890123");
}

TEST_CASE("rationals normalize") {
    Rat x(BigInt(6), BigInt(-4));
    CHECK(x.str() == "-3/2");
    CHECK((x + Rat(BigInt(3), BigInt(2))).is_zero());
    CHECK((Rat(1) / Rat(3) * Rat(3)).is_one());
    CHECK(Rat::parse("-7/21").str() == "-1/3");
}

TEST_CASE("rref serial and omp agree") {
    uint64_t s = 42;
    auto next = [&]() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<long long>((s >> 33) % 13) - 6;
    };
    for (int trial = 0; trial < 10; ++trial) {
        QMat m(7, 9);
        for (size_t i = 0; i < 7; ++i)
            for (size_t j = 0; j < 9; ++j) m.at(i, j) = Rat(next());
        QMat a = m, b = m;
        std::vector<size_t> pa, pb;
        size_t ra = rref_serial(a, &pa), rb = rref_omp(b, &pb);
        CHECK(ra == rb);
        CHECK(pa == pb);
        CHECK(a == b);
    }
}

TEST_CASE("kernel and solve") {
    QMat m(2, 3);
    m.at(0, 0) = Rat(1);
    m.at(0, 1) = Rat(2);
    m.at(0, 2) = Rat(3);
    m.at(1, 0) = Rat(2);
    m.at(1, 1) = Rat(4);
    m.at(1, 2) = Rat(6);
    QMat k = kernel_basis(m);
    CHECK(k.cols() == 2);
    auto sol = solve(m, {Rat(6), Rat(12)});
    REQUIRE(sol.has_value());
    Rat acc = (*sol)[0] * Rat(1) + (*sol)[1] * Rat(2) + (*sol)[2] * Rat(3);
    CHECK(acc == Rat(6));
}

TEST_CASE("cartan pairing entries") {
    ChainConfig cfg(3);
    CHECK(cartan_pairing(cfg, 1, 1) == 2);
    CHECK(cartan_pairing(cfg, 1, 2) == -1);
    CHECK(cartan_pairing(cfg, 1, 3) == 0);
    CHECK_THROWS(cartan_pairing(cfg, 0, 1));
}

TEST_CASE("euler form basics") {
    KClass x(3), y(3);
    x.curve_mult = {1, 0, 0};
    y.curve_mult = {1, 0, 0};
    CHECK(euler_form(x, y) == 2);
    y.curve_mult = {0, 1, 0};
    CHECK(euler_form(x, y) == -1);
    KClass pt(3);
    pt.point_mult = 1;
    CHECK(euler_form(x, pt) == 0);
    CHECK(euler_form(pt, pt) == 0);
}

TEST_CASE("twist k action is a reflection") {
    KClass sigma(2);
    sigma.curve_mult = {1, 0};
    sigma.point_mult = 0;  // O_{C_1}(-1)
    KClass x(2);
    x.curve_mult = {1, 1};
    x.point_mult = 3;
    KClass once = twist_k_action(sigma, x);
    KClass twice = twist_k_action(sigma, once);
    CHECK(twice == x);
    // class examples: sigma = [O_C(a)] applied to itself negates
    KClass s2(1);
    s2.curve_mult = {1};
    s2.point_mult = 5;
    CHECK(twist_k_action(s2, s2) == -s2);
    // sigma = [O_C(a-1)], x = [O_C(a)] -> [O_C(a-2)]
    KClass sa(1), xa(1);
    sa.curve_mult = {1};
    sa.point_mult = 4;  // O_C(3)
    xa.curve_mult = {1};
    xa.point_mult = 5;  // O_C(4)
    KClass res = twist_k_action(sa, xa);
    // O_C(a-2)[1]: the shift negates the class
    CHECK(res.curve_mult == std::vector<long long>{-1});
    CHECK(res.point_mult == -3);
}

TEST_CASE("root lattice membership") {
    ChainConfig cfg(2);
    auto yes = root_lattice_member(cfg, PicElement({-2, 1}));
    REQUIRE(yes.has_value());
    CHECK(*yes == std::vector<long long>{1, 0});
    CHECK(!root_lattice_member(cfg, PicElement({1, 0})).has_value());
    ChainConfig c1(1);
    auto y1 = root_lattice_member(c1, PicElement({-2}));
    REQUIRE(y1.has_value());
    CHECK(*y1 == std::vector<long long>{1});
}

TEST_CASE("weight mod root residues") {
    ChainConfig cfg(2);
    CHECK(weight_mod_root(cfg, PicElement({-2, 1})) == 0);
    int g = weight_mod_root(cfg, PicElement({0, 1}));
    CHECK(g != 0);
    // additive and of order 3
    PicElement d({0, 1});
    CHECK((weight_mod_root(cfg, d + d) == (2 * g) % 3));
    ChainConfig c1(1);
    CHECK(weight_mod_root(c1, PicElement({-1})) == 1);
    // kernel = root lattice on a sample
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) {
            PicElement p({a, b});
            bool inroot = root_lattice_member(cfg, p).has_value();
            CHECK(inroot == (weight_mod_root(cfg, p) == 0));
        }
}

TEST_CASE("poly reversal") {
    PolyQ p(std::vector<Rat>{Rat(1), Rat(2)});  // 1 + 2z
    CHECK(p.eval_infinity(1) == Rat(2));
    CHECK(p.eval_infinity(2) == Rat(0));
    PolyQ r = p.reversed(2);  // z^2 * p(1/z) = z^2 + 2z
    CHECK(r.coeff(1) == Rat(2));
    CHECK(r.coeff(2) == Rat(1));
}
