#include "chaincalc/ext.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace chaincalc {

namespace {

std::mutex g_mu;
std::map<std::string, std::vector<SheafMorphism>> g_hom_cache;
std::map<std::string, CompTensor> g_comp_cache;
int g_d2_sign = 1;

std::string key_of(const ChainConfig& cfg, const SubchainLineBundle& r, const SubchainLineBundle& s) {
    std::ostringstream os;
    os << cfg.n << "|" << r.str() << "|" << s.str();
    return os.str();
}

}  // namespace

void set_d2_sign(int sign) { g_d2_sign = sign >= 0 ? 1 : -1; }
int d2_sign() { return g_d2_sign; }

void clear_ext_cache() {
    std::lock_guard<std::mutex> lk(g_mu);
    g_hom_cache.clear();
    g_comp_cache.clear();
}

const std::vector<SheafMorphism>& hom_basis_cached(const ChainConfig& cfg,
                                                   const SubchainLineBundle& r,
                                                   const SubchainLineBundle& s) {
    std::string key = key_of(cfg, r, s);
    {
        std::lock_guard<std::mutex> lk(g_mu);
        auto it = g_hom_cache.find(key);
        if (it != g_hom_cache.end()) return it->second;
    }
    auto basis = hom_space(embed(cfg, r), embed(cfg, s));
    std::lock_guard<std::mutex> lk(g_mu);
    return g_hom_cache.emplace(key, std::move(basis)).first->second;
}

size_t ext2_dim(const ChainConfig& cfg, const SubchainLineBundle& r, const SubchainLineBundle& s) {
    return hom_basis_cached(cfg, s, r).size();
}

ExtProfile ext_profile(const ChainConfig& cfg, const SubchainLineBundle& r,
                       const SubchainLineBundle& s) {
    ExtProfile p;
    p.hom = hom_basis_cached(cfg, r, s).size();
    p.ext2 = ext2_dim(cfg, r, s);
    p.chi = euler_form(k_class(cfg, r), k_class(cfg, s));
    long long e1 = static_cast<long long>(p.hom) + static_cast<long long>(p.ext2) - p.chi;
    if (e1 < 0) throw EngineError("ext_profile: negative ext1 (internal inconsistency)");
    p.ext1 = static_cast<size_t>(e1);
    return p;
}

const CompTensor& comp_tensor(const ChainConfig& cfg, const SubchainLineBundle& x,
                              const SubchainLineBundle& y, const SubchainLineBundle& z) {
    std::string key = key_of(cfg, x, y) + "||" + z.str();
    {
        std::lock_guard<std::mutex> lk(g_mu);
        auto it = g_comp_cache.find(key);
        if (it != g_comp_cache.end()) return it->second;
    }
    const auto& hyz = hom_basis_cached(cfg, y, z);
    const auto& hxy = hom_basis_cached(cfg, x, y);
    const auto& hxz = hom_basis_cached(cfg, x, z);
    CompTensor t(hyz.size(), std::vector<std::vector<Rat>>(hxy.size()));
    // flatten against the hxz coefficient layout once
    auto flatten = [&](const SheafMorphism& m) {
        std::vector<Rat> v;
        for (int i = 0; i < m.src.n; ++i)
            for (size_t k = 0; k < m.dst.degs[i].size(); ++k)
                for (size_t l = 0; l < m.src.degs[i].size(); ++l) {
                    int b = m.dst.degs[i][k] - m.src.degs[i][l];
                    for (int c = 0; c <= b; ++c) v.push_back(m.entries[i][k][l].coeff(static_cast<size_t>(c)));
                }
        return v;
    };
    size_t dim = 0;
    QMat sys(0, 0);
    if (!hxz.empty()) {
        auto probe = flatten(hxz[0]);
        dim = probe.size();
        sys = QMat(dim, hxz.size());
        for (size_t j = 0; j < hxz.size(); ++j) {
            auto col = flatten(hxz[j]);
            for (size_t i = 0; i < dim; ++i) sys.at(i, j) = col[i];
        }
    }
    for (size_t mu = 0; mu < hyz.size(); ++mu)
        for (size_t j = 0; j < hxy.size(); ++j) {
            auto comp = compose(hyz[mu], hxy[j]);
            if (hxz.empty()) {
                if (!comp.is_zero()) throw EngineError("comp_tensor: composite outside empty hom");
                t[mu][j] = {};
                continue;
            }
            auto target = flatten(comp);
            auto sol = solve(sys, target);
            if (!sol) throw EngineError("comp_tensor: composite outside hom space");
            t[mu][j] = *sol;
        }
    std::lock_guard<std::mutex> lk(g_mu);
    return g_comp_cache.emplace(key, std::move(t)).first->second;
}

std::vector<Rat> yoneda_left(const ChainConfig& cfg, const SubchainLineBundle& r,
                             const SubchainLineBundle& s, const SubchainLineBundle& t,
                             const std::vector<Rat>& f_coords, const std::vector<Rat>& eps) {
    // <eps o f, h> = <eps, f o h> for h in Hom(T, R); f o h through the tensor of (T, R, S)
    const auto& htr = hom_basis_cached(cfg, t, r);
    const auto& hts = hom_basis_cached(cfg, t, s);
    if (eps.size() != hts.size()) throw std::invalid_argument("yoneda_left: eps size");
    const CompTensor& ct = comp_tensor(cfg, t, r, s);  // [mu in Hom(R,S)][j in Hom(T,R)]
    std::vector<Rat> out(htr.size(), Rat(0));
    for (size_t j = 0; j < htr.size(); ++j) {
        Rat acc(0);
        for (size_t mu = 0; mu < f_coords.size(); ++mu) {
            if (f_coords[mu].is_zero()) continue;
            for (size_t i = 0; i < hts.size(); ++i)
                if (!eps[i].is_zero()) acc += f_coords[mu] * eps[i] * ct[mu][j][i];
        }
        out[j] = acc;
    }
    return out;
}

std::vector<Rat> yoneda_right(const ChainConfig& cfg, const SubchainLineBundle& s,
                              const SubchainLineBundle& t, const SubchainLineBundle& t2,
                              const std::vector<Rat>& g_coords, const std::vector<Rat>& eps) {
    // <g o eps, h> = <eps, h o g> for h in Hom(T2, S), g in Hom(T, T2)
    const auto& ht2s = hom_basis_cached(cfg, t2, s);
    const auto& hts = hom_basis_cached(cfg, t, s);
    if (eps.size() != hts.size()) throw std::invalid_argument("yoneda_right: eps size");
    const CompTensor& ct = comp_tensor(cfg, t, t2, s);  // [h_j in Hom(T2,S)][g_nu in Hom(T,T2)]
    std::vector<Rat> out(ht2s.size(), Rat(0));
    for (size_t j = 0; j < ht2s.size(); ++j) {
        Rat acc(0);
        for (size_t nu = 0; nu < g_coords.size(); ++nu) {
            if (g_coords[nu].is_zero()) continue;
            for (size_t i = 0; i < hts.size(); ++i)
                if (!eps[i].is_zero()) acc += g_coords[nu] * eps[i] * ct[j][nu][i];
        }
        out[j] = acc;
    }
    return out;
}

size_t ext1_independent(const ChainConfig& cfg, const SubchainLineBundle& r,
                        const SubchainLineBundle& s) {
    // Koszul route: R = O_D(lambda) gives Hom-sheaf = ker(S(-lam) -> S(-lam+D)) and
    // local Ext^1 sheaf = coker of the same multiplication by the section cutting D.
    std::vector<int> lam(static_cast<size_t>(cfg.n), 0);
    for (int c = r.s; c <= r.t; ++c) lam[c - 1] = r.deg_at(c);
    std::vector<int> dd(static_cast<size_t>(cfg.n), 0);
    for (int i = 1; i <= cfg.n; ++i) {
        int v = 0;
        if (r.contains(i)) {
            v = -2;
            if (r.contains(i - 1)) ++v;
            if (r.contains(i + 1)) ++v;
        } else {
            if (r.contains(i - 1)) ++v;
            if (r.contains(i + 1)) ++v;
        }
        dd[i - 1] = v;
    }
    PicElement lamneg;
    lamneg.degrees.assign(lam.begin(), lam.end());
    lamneg = -lamneg;
    LinkedSheaf A = tensor_pic(embed(cfg, s), lamneg);
    LinkedSheaf B = tensor_pic(A, PicElement(dd));
    SheafMorphism mult = zero_morphism(A, B);
    for (int i = s.s; i <= s.t; ++i) {
        int ci = i - 1;
        PolyQ entry;
        if (r.contains(i)) {
            entry = PolyQ();  // the section vanishes identically on D
        } else if (r.contains(i - 1)) {
            entry = PolyQ::monomial(1, Rat(1));  // zero at the left node, toward D
        } else {
            entry = PolyQ::constant(Rat(1));
        }
        mult.entries[ci][0][0] = entry;
    }
    if (!morphism_valid(mult)) throw EngineError("ext1_independent: bad Koszul section");
    auto ker = kernel(mult);
    auto cok = cokernel(mult);
    return h1(ker.kernel) + h0(cok.pure) + static_cast<size_t>(cok.torsion_total);
}

}  // namespace chaincalc
