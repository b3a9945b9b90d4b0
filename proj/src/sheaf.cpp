#include "chaincalc/sheaf.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace chaincalc {

namespace {

uint64_t splitmix(uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

using PolyMat = std::vector<std::vector<PolyQ>>;  // [dst rows][src cols]

int bound_of(const LinkedSheaf& dst, const LinkedSheaf& src, int curve, size_t k, size_t l) {
    return dst.degs[curve][k] - src.degs[curve][l];
}

size_t generic_rank(const PolyMat& m) {
    if (m.empty() || m[0].empty()) return 0;
    int maxdeg = 0;
    for (const auto& row : m)
        for (const auto& p : row) maxdeg = std::max(maxdeg, std::max(0, p.degree()));
    size_t lim = std::min(m.size(), m[0].size());
    size_t points = static_cast<size_t>(maxdeg) * lim + 1;
    size_t best = 0;
    long long z = 0;
    for (size_t t = 0; t < points && best < lim; ++t) {
        QMat ev(m.size(), m[0].size());
        for (size_t i = 0; i < m.size(); ++i)
            for (size_t j = 0; j < m[0].size(); ++j) {
                Rat v(0), pw(1);
                for (int d = 0; d <= m[i][j].degree(); ++d) {
                    v += m[i][j].coeff(static_cast<size_t>(d)) * pw;
                    pw *= Rat(z);
                }
                ev.at(i, j) = v;
            }
        best = std::max(best, rank(ev));
        z = z >= 0 ? -(z + 1) : -z;
    }
    return best;
}

struct CurveKernel {
    std::vector<int> degs;                 // kernel bundle degrees, descending
    std::vector<std::vector<PolyQ>> cols;  // per kernel summand, vector over src summands
};

// Minimal polynomial basis of the kernel subsheaf of a bundle map on P^1.
CurveKernel curve_kernel(const PolyMat& mat, const std::vector<int>& src_degs,
                         const std::vector<int>& dst_degs) {
    CurveKernel out;
    size_t r = src_degs.size();
    if (r == 0) return out;
    size_t rk_gen = (mat.empty() || mat[0].empty()) ? 0 : generic_rank(mat);
    size_t want = r - rk_gen;
    if (want == 0) return out;

    int e_hi = *std::max_element(src_degs.begin(), src_degs.end());
    int span = 0;
    for (int d : src_degs) span += std::abs(d) + 1;
    for (int d : dst_degs) span += std::abs(d) + 1;
    int maxdeg = 0;
    for (const auto& row : mat)
        for (const auto& p : row) maxdeg = std::max(maxdeg, std::max(0, p.degree()));
    int e_lo = e_hi - 4 * (span + maxdeg + static_cast<int>(r)) - 8;

    auto solve_level = [&](int e) {
        std::vector<std::pair<size_t, int>> layout;  // (summand, coeff index)
        for (size_t l = 0; l < r; ++l)
            for (int c = 0; c + e <= src_degs[l]; ++c) layout.push_back({l, c});
        std::vector<std::vector<Rat>> eq;
        size_t nd = dst_degs.size();
        for (size_t k = 0; k < nd; ++k) {
            int top = 0;
            for (size_t l = 0; l < r; ++l)
                top = std::max(top, std::max(0, mat[k][l].degree()) + std::max(0, src_degs[l] - e));
            for (int c = 0; c <= top; ++c) {
                std::vector<Rat> row(layout.size(), Rat(0));
                bool any = false;
                for (size_t u = 0; u < layout.size(); ++u) {
                    auto [l, cv] = layout[u];
                    if (c < cv) continue;
                    Rat coef = mat[k][l].coeff(static_cast<size_t>(c - cv));
                    if (!coef.is_zero()) {
                        row[u] = coef;
                        any = true;
                    }
                }
                if (any) eq.push_back(std::move(row));
            }
        }
        QMat sys(eq.size(), layout.size());
        for (size_t i = 0; i < eq.size(); ++i)
            for (size_t j = 0; j < layout.size(); ++j) sys.at(i, j) = eq[i][j];
        return std::pair(kernel_basis(sys), layout);
    };

    std::vector<std::pair<int, std::vector<PolyQ>>> gens;
    for (int e = e_hi; e >= e_lo && gens.size() < want; --e) {
        auto [kb, layout] = solve_level(e);
        if (kb.cols() == 0) continue;
        std::vector<std::vector<Rat>> old_vecs;
        for (const auto& [ej, col] : gens)
            for (int a = 0; a <= ej - e; ++a) {
                std::vector<Rat> v(layout.size(), Rat(0));
                for (size_t u = 0; u < layout.size(); ++u) {
                    auto [l, cv] = layout[u];
                    if (cv - a >= 0) v[u] = col[l].coeff(static_cast<size_t>(cv - a));
                }
                old_vecs.push_back(std::move(v));
            }
        QMat cur(old_vecs.size(), layout.size());
        for (size_t i = 0; i < old_vecs.size(); ++i)
            for (size_t j = 0; j < layout.size(); ++j) cur.at(i, j) = old_vecs[i][j];
        size_t base_rank = rank(cur);
        for (size_t cidx = 0; cidx < kb.cols() && gens.size() < want; ++cidx) {
            QMat row(1, layout.size());
            for (size_t j = 0; j < layout.size(); ++j) row.at(0, j) = kb.at(j, cidx);
            QMat trial = cur.vcat(row);
            if (rank(trial) > base_rank) {
                cur = trial;
                ++base_rank;
                std::vector<PolyQ> col(r);
                for (size_t u = 0; u < layout.size(); ++u) {
                    auto [l, cv] = layout[u];
                    if (!kb.at(u, cidx).is_zero())
                        col[l] = col[l] + PolyQ::monomial(static_cast<size_t>(cv), kb.at(u, cidx));
                }
                gens.push_back({e, std::move(col)});
            }
        }
    }
    if (gens.size() != want) throw EngineError("curve_kernel: incomplete minimal basis");
    std::stable_sort(gens.begin(), gens.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (auto& [e, col] : gens) {
        out.degs.push_back(e);
        out.cols.push_back(std::move(col));
    }
    return out;
}

QMat pair_space(const LinkedSheaf& e, int node) {
    const NodeLink& lk = e.links[node];
    size_t r1 = e.degs[node].size(), r2 = e.degs[node + 1].size();
    QMat sys(lk.c(), r1 + r2);
    for (size_t i = 0; i < lk.c(); ++i) {
        for (size_t j = 0; j < r1; ++j) sys.at(i, j) = lk.L.at(i, j);
        for (size_t j = 0; j < r2; ++j) sys.at(i, r1 + j) = -lk.M.at(i, j);
    }
    return kernel_basis(sys);
}

void replace_link_rows(NodeLink& lk, const QMat& rows, size_t r1, size_t r2) {
    QMat L(rows.rows(), r1), M(rows.rows(), r2);
    for (size_t i = 0; i < rows.rows(); ++i) {
        for (size_t j = 0; j < r1; ++j) L.at(i, j) = rows.at(i, j);
        for (size_t j = 0; j < r2; ++j) M.at(i, j) = -rows.at(i, r1 + j);
    }
    lk.L = std::move(L);
    lk.M = std::move(M);
}

PolyQ divide_by_z(const PolyQ& p) {
    if (!p.coeff(0).is_zero()) throw EngineError("divide_by_z: nonzero constant term");
    if (p.is_zero()) return p;
    std::vector<Rat> c;
    for (int i = 1; i <= p.degree(); ++i) c.push_back(p.coeff(static_cast<size_t>(i)));
    return PolyQ(std::move(c));
}

}  // namespace

// ---------------------------------------------------------------------------
// SubchainLineBundle

bool SubchainLineBundle::operator<(const SubchainLineBundle& o) const {
    if (s != o.s) return s < o.s;
    if (t != o.t) return t < o.t;
    return degs < o.degs;
}

std::string SubchainLineBundle::str() const {
    std::ostringstream os;
    os << "O[" << s << ".." << t << "](";
    for (size_t i = 0; i < degs.size(); ++i) os << (i ? "," : "") << degs[i];
    os << ")";
    return os.str();
}

SubchainLineBundle dualizing_sheaf(const ChainConfig& cfg) {
    if (cfg.n == 1) return SubchainLineBundle(1, 1, {-2});
    std::vector<int> d(cfg.n, 0);
    d.front() = -1;
    d.back() = -1;
    return SubchainLineBundle(1, cfg.n, std::move(d));
}

SubchainLineBundle tensor_pic(const SubchainLineBundle& r, const PicElement& L) {
    SubchainLineBundle out = r;
    for (int c = r.s; c <= r.t; ++c) out.degs[c - r.s] += L.degrees.at(c - 1);
    return out;
}

SubchainLineBundle flip_bundle(const ChainConfig& cfg, const SubchainLineBundle& r) {
    SubchainLineBundle out;
    out.s = cfg.n + 1 - r.t;
    out.t = cfg.n + 1 - r.s;
    out.degs.assign(r.degs.rbegin(), r.degs.rend());
    return out;
}

KClass k_class(const ChainConfig& cfg, const SubchainLineBundle& r) {
    KClass k(cfg.n);
    long long s = 0;
    for (int c = r.s; c <= r.t; ++c) {
        k.curve_mult[c - 1] = 1;
        s += r.deg_at(c);
    }
    k.point_mult = s + 1;
    return k;
}

int lex_compare(const SubchainLineBundle& r, const SubchainLineBundle& s) {
    if (r.s != s.s) throw std::invalid_argument("lex_compare: different left endpoints");
    int common = std::min(r.len(), s.len());
    for (int i = 0; i < common; ++i)
        if (r.degs[i] != s.degs[i]) return r.degs[i] > s.degs[i] ? 1 : -1;
    if (r.len() == s.len()) return 0;
    return r.len() < s.len() ? 1 : -1;  // shorter support is larger
}

// ---------------------------------------------------------------------------
// LinkedSheaf

LinkedSheaf::LinkedSheaf(int n_) : n(n_), degs(static_cast<size_t>(n_)) {
    if (n < 1) throw std::invalid_argument("LinkedSheaf: n must be >= 1");
    links.resize(static_cast<size_t>(n - 1));
    for (auto& lk : links) {
        lk.L = QMat(0, 0);
        lk.M = QMat(0, 0);
    }
}

bool LinkedSheaf::is_empty() const {
    for (const auto& d : degs)
        if (!d.empty()) return false;
    return true;
}

long long LinkedSheaf::chi() const {
    long long c = 0;
    for (const auto& d : degs)
        for (int v : d) c += v + 1;
    for (const auto& lk : links) c -= static_cast<long long>(lk.c());
    return c;
}

KClass LinkedSheaf::k() const {
    KClass out(n);
    for (int i = 0; i < n; ++i) out.curve_mult[i] = static_cast<long long>(degs[i].size());
    out.point_mult = chi();
    return out;
}

std::vector<int> LinkedSheaf::curve_ranks() const {
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) r[i] = static_cast<int>(degs[i].size());
    return r;
}

bool LinkedSheaf::supported_only(int s, int t) const {
    for (int i = 1; i <= n; ++i)
        if (!degs[i - 1].empty() && (i < s || i > t)) return false;
    return true;
}

void LinkedSheaf::validate() const {
    if (static_cast<int>(degs.size()) != n || static_cast<int>(links.size()) != n - 1)
        throw EngineError("LinkedSheaf: shape mismatch");
    for (int i = 0; i + 1 < n; ++i) {
        const NodeLink& lk = links[i];
        if (lk.L.rows() != lk.M.rows()) throw EngineError("LinkedSheaf: link row mismatch");
        if (lk.L.cols() != degs[i].size() || lk.M.cols() != degs[i + 1].size())
            throw EngineError("LinkedSheaf: link column mismatch");
        if (lk.c() > std::min(degs[i].size(), degs[i + 1].size()))
            throw EngineError("LinkedSheaf: link rank above component rank");
        if (lk.c()) {
            if (chaincalc::rank(lk.L) != lk.c() || chaincalc::rank(lk.M) != lk.c())
                throw EngineError("LinkedSheaf: degenerate link");
        }
    }
}

std::string LinkedSheaf::str() const {
    std::ostringstream os;
    os << "sheaf(n=" << n << ";";
    for (int i = 0; i < n; ++i) {
        os << " C" << i + 1 << ":[";
        for (size_t k = 0; k < degs[i].size(); ++k) os << (k ? "," : "") << degs[i][k];
        os << "]";
    }
    for (int i = 0; i + 1 < n; ++i) os << " c" << i + 1 << "=" << links[i].c();
    os << ")";
    return os.str();
}

LinkedSheaf embed(const ChainConfig& cfg, const SubchainLineBundle& r) {
    if (r.t > cfg.n) throw std::invalid_argument("embed: support outside the chain");
    LinkedSheaf e(cfg.n);
    for (int c = r.s; c <= r.t; ++c) e.degs[c - 1] = {r.deg_at(c)};
    for (int i = 0; i + 1 < cfg.n; ++i) {
        int curve = i + 1;
        if (curve >= r.s && curve + 1 <= r.t) {
            e.links[i].L = QMat(1, 1);
            e.links[i].M = QMat(1, 1);
            e.links[i].L.at(0, 0) = Rat(1);
            e.links[i].M.at(0, 0) = Rat(1);
        } else {
            e.links[i].L = QMat(0, e.degs[i].size());
            e.links[i].M = QMat(0, e.degs[i + 1].size());
        }
    }
    return e;
}

LinkedSheaf direct_sum(const LinkedSheaf& a, const LinkedSheaf& b) {
    if (a.n != b.n) throw std::invalid_argument("direct_sum: mismatched n");
    LinkedSheaf e(a.n);
    for (int i = 0; i < a.n; ++i) {
        e.degs[i] = a.degs[i];
        e.degs[i].insert(e.degs[i].end(), b.degs[i].begin(), b.degs[i].end());
    }
    for (int i = 0; i + 1 < a.n; ++i) {
        size_t ca = a.links[i].c(), cb = b.links[i].c();
        size_t ra = a.degs[i].size(), rb = b.degs[i].size();
        size_t sa = a.degs[i + 1].size(), sb = b.degs[i + 1].size();
        QMat L(ca + cb, ra + rb), M(ca + cb, sa + sb);
        for (size_t r = 0; r < ca; ++r) {
            for (size_t c = 0; c < ra; ++c) L.at(r, c) = a.links[i].L.at(r, c);
            for (size_t c = 0; c < sa; ++c) M.at(r, c) = a.links[i].M.at(r, c);
        }
        for (size_t r = 0; r < cb; ++r) {
            for (size_t c = 0; c < rb; ++c) L.at(ca + r, ra + c) = b.links[i].L.at(r, c);
            for (size_t c = 0; c < sb; ++c) M.at(ca + r, sa + c) = b.links[i].M.at(r, c);
        }
        e.links[i].L = std::move(L);
        e.links[i].M = std::move(M);
    }
    return e;
}

LinkedSheaf tensor_pic(const LinkedSheaf& e, const PicElement& L) {
    if (L.n() != e.n) throw std::invalid_argument("tensor_pic: mismatched n");
    LinkedSheaf out = e;
    for (int i = 0; i < e.n; ++i)
        for (auto& d : out.degs[i]) d += L.degrees[i];
    return out;
}

LinkedSheaf embed_sum(const ChainConfig& cfg, const std::vector<SubchainLineBundle>& parts) {
    LinkedSheaf acc(cfg.n);
    for (const auto& p : parts) acc = direct_sum(acc, embed(cfg, p));
    return acc;
}

// ---------------------------------------------------------------------------
// Morphisms

QMat SheafMorphism::fiber_left(int curve) const {
    size_t rd = dst.degs[curve].size(), rs = src.degs[curve].size();
    QMat m(rd, rs);
    for (size_t k = 0; k < rd; ++k)
        for (size_t l = 0; l < rs; ++l) m.at(k, l) = entries[curve][k][l].eval_zero();
    return m;
}

QMat SheafMorphism::fiber_right(int curve) const {
    size_t rd = dst.degs[curve].size(), rs = src.degs[curve].size();
    QMat m(rd, rs);
    for (size_t k = 0; k < rd; ++k)
        for (size_t l = 0; l < rs; ++l)
            m.at(k, l) = entries[curve][k][l].eval_infinity(bound_of(dst, src, curve, k, l));
    return m;
}

bool SheafMorphism::is_zero() const {
    for (const auto& cm : entries)
        for (const auto& row : cm)
            for (const auto& p : row)
                if (!p.is_zero()) return false;
    return true;
}

SheafMorphism SheafMorphism::scaled(const Rat& c) const {
    SheafMorphism out = *this;
    for (auto& cm : out.entries)
        for (auto& row : cm)
            for (auto& p : row) p = p.scaled(c);
    return out;
}

SheafMorphism SheafMorphism::operator+(const SheafMorphism& o) const {
    SheafMorphism out = *this;
    for (size_t i = 0; i < entries.size(); ++i)
        for (size_t k = 0; k < entries[i].size(); ++k)
            for (size_t l = 0; l < entries[i][k].size(); ++l)
                out.entries[i][k][l] = entries[i][k][l] + o.entries[i][k][l];
    return out;
}

SheafMorphism zero_morphism(const LinkedSheaf& src, const LinkedSheaf& dst) {
    SheafMorphism f;
    f.src = src;
    f.dst = dst;
    f.entries.resize(src.n);
    for (int i = 0; i < src.n; ++i)
        f.entries[i].assign(dst.degs[i].size(), std::vector<PolyQ>(src.degs[i].size()));
    return f;
}

SheafMorphism identity_morphism(const LinkedSheaf& e) {
    SheafMorphism f = zero_morphism(e, e);
    for (int i = 0; i < e.n; ++i)
        for (size_t k = 0; k < e.degs[i].size(); ++k) f.entries[i][k][k] = PolyQ::constant(Rat(1));
    return f;
}

SheafMorphism compose(const SheafMorphism& g, const SheafMorphism& f) {
    SheafMorphism out = zero_morphism(f.src, g.dst);
    for (int i = 0; i < f.src.n; ++i) {
        size_t a = g.dst.degs[i].size(), b = g.src.degs[i].size(), c = f.src.degs[i].size();
        for (size_t k = 0; k < a; ++k)
            for (size_t l = 0; l < c; ++l) {
                PolyQ acc;
                for (size_t m = 0; m < b; ++m) acc = acc + g.entries[i][k][m] * f.entries[i][m][l];
                out.entries[i][k][l] = acc;
            }
    }
    return out;
}

bool morphism_valid(const SheafMorphism& f) {
    for (int i = 0; i < f.src.n; ++i)
        for (size_t k = 0; k < f.dst.degs[i].size(); ++k)
            for (size_t l = 0; l < f.src.degs[i].size(); ++l) {
                const PolyQ& p = f.entries[i][k][l];
                if (!p.is_zero() && p.degree() > bound_of(f.dst, f.src, i, k, l)) return false;
            }
    for (int node = 0; node + 1 < f.src.n; ++node) {
        const NodeLink& lk = f.dst.links[node];
        if (lk.c() == 0) continue;
        QMat v = pair_space(f.src, node);
        QMat fr = f.fiber_right(node), fl = f.fiber_left(node + 1);
        size_t r1 = f.src.degs[node].size();
        for (size_t col = 0; col < v.cols(); ++col) {
            QMat x(r1, 1), y(f.src.degs[node + 1].size(), 1);
            for (size_t j = 0; j < r1; ++j) x.at(j, 0) = v.at(j, col);
            for (size_t j = 0; j < y.rows(); ++j) y.at(j, 0) = v.at(r1 + j, col);
            QMat lhs = lk.L * (fr * x) - lk.M * (fl * y);
            if (!lhs.is_zero()) return false;
        }
    }
    return true;
}

std::vector<SheafMorphism> hom_space(const LinkedSheaf& e, const LinkedSheaf& f) {
    if (e.n != f.n) throw std::invalid_argument("hom_space: mismatched n");
    // unknown layout with an offset table per (curve, k, l)
    std::vector<std::vector<std::vector<long long>>> offset(e.n);
    struct U {
        int curve;
        size_t k, l;
        int c;
    };
    std::vector<U> layout;
    for (int i = 0; i < e.n; ++i) {
        offset[i].assign(f.degs[i].size(), std::vector<long long>(e.degs[i].size(), -1));
        for (size_t k = 0; k < f.degs[i].size(); ++k)
            for (size_t l = 0; l < e.degs[i].size(); ++l) {
                int b = f.degs[i][k] - e.degs[i][l];
                if (b < 0) continue;
                offset[i][k][l] = static_cast<long long>(layout.size());
                for (int c = 0; c <= b; ++c) layout.push_back({i, k, l, c});
            }
    }
    size_t nu = layout.size();
    std::vector<std::vector<Rat>> rows;
    for (int node = 0; node + 1 < e.n; ++node) {
        const NodeLink& lk = f.links[node];
        if (lk.c() == 0) continue;
        QMat v = pair_space(e, node);
        size_t r1 = e.degs[node].size(), r2 = e.degs[node + 1].size();
        for (size_t col = 0; col < v.cols(); ++col) {
            for (size_t rho = 0; rho < lk.c(); ++rho) {
                std::vector<Rat> row(nu, Rat(0));
                bool any = false;
                for (size_t k = 0; k < f.degs[node].size(); ++k) {
                    if (lk.L.at(rho, k).is_zero()) continue;
                    for (size_t l = 0; l < r1; ++l) {
                        Rat xv = v.at(l, col);
                        if (xv.is_zero()) continue;
                        int b = f.degs[node][k] - e.degs[node][l];
                        if (b < 0) continue;
                        row[static_cast<size_t>(offset[node][k][l]) + static_cast<size_t>(b)] +=
                            lk.L.at(rho, k) * xv;
                        any = true;
                    }
                }
                for (size_t k = 0; k < f.degs[node + 1].size(); ++k) {
                    if (lk.M.at(rho, k).is_zero()) continue;
                    for (size_t l = 0; l < r2; ++l) {
                        Rat yv = v.at(r1 + l, col);
                        if (yv.is_zero()) continue;
                        int b = f.degs[node + 1][k] - e.degs[node + 1][l];
                        if (b < 0) continue;
                        row[static_cast<size_t>(offset[node + 1][k][l])] -= lk.M.at(rho, k) * yv;
                        any = true;
                    }
                }
                if (any) rows.push_back(std::move(row));
            }
        }
    }
    QMat sys(rows.size(), nu);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < nu; ++j) sys.at(i, j) = rows[i][j];
    QMat kb = kernel_basis(sys);
    std::vector<SheafMorphism> basis;
    for (size_t c = 0; c < kb.cols(); ++c) {
        SheafMorphism m = zero_morphism(e, f);
        for (size_t u = 0; u < nu; ++u) {
            if (kb.at(u, c).is_zero()) continue;
            const U& uu = layout[u];
            m.entries[uu.curve][uu.k][uu.l] =
                m.entries[uu.curve][uu.k][uu.l] + PolyQ::monomial(static_cast<size_t>(uu.c), kb.at(u, c));
        }
        basis.push_back(std::move(m));
    }
    return basis;
}

size_t hom_dim(const LinkedSheaf& e, const LinkedSheaf& f) { return hom_space(e, f).size(); }

std::vector<Rat> hom_coordinates(const SheafMorphism& f) {
    auto basis = hom_space(f.src, f.dst);
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
    auto target = flatten(f);
    QMat sys(target.size(), basis.size());
    for (size_t j = 0; j < basis.size(); ++j) {
        auto col = flatten(basis[j]);
        for (size_t i = 0; i < target.size(); ++i) sys.at(i, j) = col[i];
    }
    auto sol = solve(sys, target);
    if (!sol) throw EngineError("hom_coordinates: morphism outside hom space");
    return *sol;
}

size_t h0(const LinkedSheaf& e) {
    ChainConfig cfg(e.n);
    std::vector<int> zero(static_cast<size_t>(e.n), 0);
    return hom_dim(embed(cfg, SubchainLineBundle(1, e.n, zero)), e);
}

size_t h1(const LinkedSheaf& e) {
    long long v = static_cast<long long>(h0(e)) - e.chi();
    if (v < 0) throw EngineError("h1: negative dimension (invalid sheaf)");
    return static_cast<size_t>(v);
}

// ---------------------------------------------------------------------------
// Link normalization with carried morphisms
//
// A constraint row touching only one side of a node is a point-vanishing condition;
// it is absorbed by twisting the constrained summand down by one. `inc` (a morphism
// out of the sheaf) and `proj` (a morphism into it) are rewritten along the way.

namespace {

struct Normalizer {
    LinkedSheaf e;
    SheafMorphism* inc;   // src == e (columns follow the presentation)
    SheafMorphism* proj;  // dst == e (rows follow the presentation)

    void rotate(int ci, int side, const std::vector<Rat>& m, size_t& k0_out) {
        auto& degs = e.degs[ci];
        size_t r = degs.size();
        size_t k0 = r;
        for (size_t k = 0; k < r; ++k) {
            if (m[k].is_zero()) continue;
            if (k0 == r || degs[k] > degs[k0]) k0 = k;
        }
        if (k0 == r) throw EngineError("normalize_links: zero covector");
        QMat gl = QMat::identity(r), gr = QMat::identity(r);
        std::vector<std::pair<size_t, PolyQ>> gpoly;  // entries (k0, l)
        for (size_t l = 0; l < r; ++l) {
            if (l == k0 || m[l].is_zero()) continue;
            Rat c = -(m[l] / m[k0]);
            size_t delta = side == 0 ? 0 : static_cast<size_t>(degs[k0] - degs[l]);
            gpoly.push_back({l, PolyQ::monomial(delta, c)});
            if (side == 0) {
                gl.at(k0, l) = c;
                if (degs[k0] == degs[l]) gr.at(k0, l) = c;
            } else {
                gr.at(k0, l) = c;
                if (degs[k0] == degs[l]) gl.at(k0, l) = c;
            }
        }
        if (ci > 0) e.links[ci - 1].M = e.links[ci - 1].M * gl;
        if (ci + 1 < e.n) e.links[ci].L = e.links[ci].L * gr;
        if (inc) {
            // column op: col_l += g_{k0,l} * col_k0
            for (auto& [l, g] : gpoly)
                for (size_t row = 0; row < inc->entries[ci].size(); ++row)
                    inc->entries[ci][row][l] = inc->entries[ci][row][l] + g * inc->entries[ci][row][k0];
        }
        if (proj) {
            // row op with g^{-1}: row_k0 -= sum_l g_{k0,l} * row_l
            for (auto& [l, g] : gpoly)
                for (size_t col = 0; col < (proj->entries[ci].empty() ? 0 : proj->entries[ci][0].size()); ++col)
                    proj->entries[ci][k0][col] = proj->entries[ci][k0][col] - g * proj->entries[ci][l][col];
        }
        k0_out = k0;
    }

    void twist(int ci, int side, size_t k0) {
        e.degs[ci][k0] -= 1;
        if (inc) {
            if (side == 0)
                for (size_t row = 0; row < inc->entries[ci].size(); ++row)
                    inc->entries[ci][row][k0] = inc->entries[ci][row][k0] * PolyQ::monomial(1, Rat(1));
            // side == 1: entries unchanged, the bound grew by one
            inc->src = e;
        }
        if (proj) {
            if (side == 0) {
                size_t cols = proj->entries[ci].empty() ? 0 : proj->entries[ci][0].size();
                for (size_t col = 0; col < cols; ++col)
                    proj->entries[ci][k0][col] = divide_by_z(proj->entries[ci][k0][col]);
            } else {
                size_t cols = proj->entries[ci].empty() ? 0 : proj->entries[ci][0].size();
                for (size_t col = 0; col < cols; ++col)
                    if (proj->entries[ci][k0][col].degree() >
                        e.degs[ci][k0] - proj->src.degs[ci][col])
                        throw EngineError("normalize_links: projection exceeds twisted bound");
            }
            proj->dst = e;
        }
    }

    void permute(int ci, const std::vector<size_t>& perm) {
        size_t r = e.degs[ci].size();
        std::vector<int> nd(r);
        for (size_t k = 0; k < r; ++k) nd[k] = e.degs[ci][perm[k]];
        e.degs[ci] = nd;
        if (ci > 0) {
            QMat& M = e.links[ci - 1].M;
            QMat nm(M.rows(), r);
            for (size_t a = 0; a < M.rows(); ++a)
                for (size_t k = 0; k < r; ++k) nm.at(a, k) = M.at(a, perm[k]);
            M = std::move(nm);
        }
        if (ci + 1 < e.n) {
            QMat& L = e.links[ci].L;
            QMat nl(L.rows(), r);
            for (size_t a = 0; a < L.rows(); ++a)
                for (size_t k = 0; k < r; ++k) nl.at(a, k) = L.at(a, perm[k]);
            L = std::move(nl);
        }
        if (inc) {
            for (size_t row = 0; row < inc->entries[ci].size(); ++row) {
                std::vector<PolyQ> nr(r);
                for (size_t k = 0; k < r; ++k) nr[k] = inc->entries[ci][row][perm[k]];
                inc->entries[ci][row] = nr;
            }
            inc->src = e;
        }
        if (proj) {
            std::vector<std::vector<PolyQ>> np(r);
            for (size_t k = 0; k < r; ++k) np[k] = proj->entries[ci][perm[k]];
            proj->entries[ci] = np;
            proj->dst = e;
        }
    }

    void run() {
        bool changed = true;
        int guard = 0;
        while (changed) {
            if (++guard > 4096) throw EngineError("normalize_links: no convergence");
            changed = false;
            for (int node = 0; node + 1 < e.n && !changed; ++node) {
                NodeLink& lk = e.links[node];
                size_t r1 = e.degs[node].size(), r2 = e.degs[node + 1].size();
                if (lk.c() == 0) continue;
                QMat rows(lk.c(), r1 + r2);
                for (size_t i = 0; i < lk.c(); ++i) {
                    for (size_t j = 0; j < r1; ++j) rows.at(i, j) = lk.L.at(i, j);
                    for (size_t j = 0; j < r2; ++j) rows.at(i, r1 + j) = -lk.M.at(i, j);
                }
                size_t rk = rref(rows);
                if (rk < lk.c()) {
                    replace_link_rows(lk, rows.sub(0, 0, rk, r1 + r2), r1, r2);
                    changed = true;
                    continue;
                }
                for (size_t i = 0; i < lk.c() && !changed; ++i) {
                    bool lzero = true, mzero = true;
                    for (size_t j = 0; j < r1; ++j)
                        if (!rows.at(i, j).is_zero()) lzero = false;
                    for (size_t j = 0; j < r2; ++j)
                        if (!rows.at(i, r1 + j).is_zero()) mzero = false;
                    if (lzero && mzero) throw EngineError("normalize_links: zero constraint row");
                    if (!lzero && !mzero) continue;
                    int ci = lzero ? node + 1 : node;
                    int side = lzero ? 0 : 1;
                    std::vector<Rat> m(lzero ? r2 : r1);
                    for (size_t j = 0; j < m.size(); ++j)
                        m[j] = lzero ? rows.at(i, r1 + j) : rows.at(i, j);
                    size_t k0 = 0;
                    rotate(ci, side, m, k0);
                    // rebuild rows from the rotated link, pivot on the constrained column
                    NodeLink& cur = e.links[node];
                    QMat rr(cur.c(), r1 + r2);
                    for (size_t a = 0; a < cur.c(); ++a) {
                        for (size_t j = 0; j < r1; ++j) rr.at(a, j) = cur.L.at(a, j);
                        for (size_t j = 0; j < r2; ++j) rr.at(a, r1 + j) = -cur.M.at(a, j);
                    }
                    size_t piv_col = lzero ? r1 + k0 : k0;
                    // move pivot column first
                    QMat perm(rr.rows(), r1 + r2);
                    for (size_t a = 0; a < rr.rows(); ++a) {
                        perm.at(a, 0) = rr.at(a, piv_col);
                        size_t w = 1;
                        for (size_t j = 0; j < r1 + r2; ++j)
                            if (j != piv_col) perm.at(a, w++) = rr.at(a, j);
                    }
                    rref(perm);
                    if (perm.rows() == 0 || perm.at(0, 0).is_zero())
                        throw EngineError("normalize_links: constrained column untouched");
                    // rows 1.. have zero in the pivot column; drop row 0, map columns back
                    QMat kept(cur.c() - 1, r1 + r2);
                    for (size_t a = 1; a < cur.c(); ++a) {
                        size_t w = 1;
                        for (size_t j = 0; j < r1 + r2; ++j) {
                            if (j == piv_col)
                                kept.at(a - 1, j) = perm.at(a, 0);
                            else
                                kept.at(a - 1, j) = perm.at(a, w++);
                        }
                        if (!kept.at(a - 1, piv_col).is_zero())
                            throw EngineError("normalize_links: residual pivot entry");
                    }
                    replace_link_rows(e.links[node], kept, r1, r2);
                    twist(ci, side, k0);
                    changed = true;
                }
            }
        }
        // canonical summand order: decreasing degree per curve
        for (int i = 0; i < e.n; ++i) {
            size_t r = e.degs[i].size();
            std::vector<size_t> perm(r);
            std::iota(perm.begin(), perm.end(), 0);
            std::stable_sort(perm.begin(), perm.end(),
                             [&](size_t a, size_t b) { return e.degs[i][a] > e.degs[i][b]; });
            bool id = true;
            for (size_t k = 0; k < r; ++k)
                if (perm[k] != k) id = false;
            if (!id) permute(i, perm);
        }
        e.validate();
    }
};

}  // namespace

static LinkedSheaf normalize_links(LinkedSheaf e, SheafMorphism* inc = nullptr,
                                   SheafMorphism* proj = nullptr) {
    Normalizer nz{std::move(e), inc, proj};
    nz.run();
    if (inc) inc->src = nz.e;
    if (proj) proj->dst = nz.e;
    return nz.e;
}

// ---------------------------------------------------------------------------
// Kernel

KernelResult kernel(const SheafMorphism& f) {
    const LinkedSheaf& E = f.src;
    LinkedSheaf K(E.n);
    std::vector<CurveKernel> per_curve(static_cast<size_t>(E.n));
    for (int i = 0; i < E.n; ++i) {
        per_curve[i] = curve_kernel(f.entries[i], E.degs[i], f.dst.degs[i]);
        K.degs[i] = per_curve[i].degs;
    }
    SheafMorphism inc;
    inc.src = K;
    inc.dst = E;
    inc.entries.resize(static_cast<size_t>(E.n));
    for (int i = 0; i < E.n; ++i) {
        size_t r = E.degs[i].size(), rk = K.degs[i].size();
        inc.entries[i].assign(r, std::vector<PolyQ>(rk));
        for (size_t j = 0; j < rk; ++j)
            for (size_t l = 0; l < r; ++l) inc.entries[i][l][j] = per_curve[i].cols[j][l];
    }
    for (int node = 0; node + 1 < E.n; ++node) {
        const NodeLink& lk = E.links[node];
        QMat br = inc.fiber_right(node), bl = inc.fiber_left(node + 1);
        K.links[node].L = lk.L * br;
        K.links[node].M = lk.M * bl;
    }
    LinkedSheaf Kn = normalize_links(std::move(K), &inc, nullptr);
    inc.src = Kn;
    if (!morphism_valid(inc)) throw EngineError("kernel: invalid inclusion");
    return {Kn, inc};
}

// ---------------------------------------------------------------------------
// Cokernel

CokernelResult cokernel(const SheafMorphism& f) {
    const LinkedSheaf& F = f.dst;
    CokernelResult out;
    LinkedSheaf Q(F.n);
    SheafMorphism pr;
    pr.src = F;
    pr.entries.resize(static_cast<size_t>(F.n));
    for (int i = 0; i < F.n; ++i) {
        size_t rd = F.degs[i].size(), rs = f.src.degs[i].size();
        CurveKernel ck;
        if (rs == 0 || rd == 0) {
            ck.degs.resize(rd);
            ck.cols.assign(rd, std::vector<PolyQ>(rd));
            for (size_t k = 0; k < rd; ++k) {
                ck.degs[k] = -F.degs[i][k];
                ck.cols[k][k] = PolyQ::constant(Rat(1));
            }
        } else {
            PolyMat dual(rs, std::vector<PolyQ>(rd));
            for (size_t k = 0; k < rd; ++k)
                for (size_t l = 0; l < rs; ++l) dual[l][k] = f.entries[i][k][l];
            std::vector<int> dsrc(rd), ddst(rs);
            for (size_t k = 0; k < rd; ++k) dsrc[k] = -F.degs[i][k];
            for (size_t l = 0; l < rs; ++l) ddst[l] = -f.src.degs[i][l];
            ck = curve_kernel(dual, dsrc, ddst);
        }
        size_t rq = ck.degs.size();
        Q.degs[i].resize(rq);
        for (size_t m = 0; m < rq; ++m) Q.degs[i][m] = -ck.degs[m];
        pr.entries[i].assign(rq, std::vector<PolyQ>(rd));
        for (size_t m = 0; m < rq; ++m)
            for (size_t k = 0; k < rd; ++k) pr.entries[i][m][k] = ck.cols[m][k];
    }
    pr.dst = Q;
    for (int node = 0; node + 1 < F.n; ++node) {
        QMat v = pair_space(F, node);
        QMat r = pr.fiber_right(node), l = pr.fiber_left(node + 1);
        size_t r1 = F.degs[node].size();
        size_t q1 = Q.degs[node].size(), q2 = Q.degs[node + 1].size();
        QMat w(q1 + q2, v.cols());
        for (size_t col = 0; col < v.cols(); ++col) {
            for (size_t a = 0; a < q1; ++a) {
                Rat s(0);
                for (size_t j = 0; j < r1; ++j) s += r.at(a, j) * v.at(j, col);
                w.at(a, col) = s;
            }
            for (size_t a = 0; a < q2; ++a) {
                Rat s(0);
                for (size_t j = 0; j < F.degs[node + 1].size(); ++j) s += l.at(a, j) * v.at(r1 + j, col);
                w.at(q1 + a, col) = s;
            }
        }
        QMat ann = kernel_basis(w.transpose());
        replace_link_rows(Q.links[node], ann.transpose(), q1, q2);
    }
    LinkedSheaf Qn = normalize_links(std::move(Q), nullptr, &pr);
    pr.dst = Qn;
    out.pure = Qn;
    out.projection = pr;
    if (!morphism_valid(out.projection)) throw EngineError("cokernel: invalid projection");

    KernelResult K = kernel(f);
    out.torsion_total = K.kernel.chi() - f.src.chi() + F.chi() - out.pure.chi();
    if (out.torsion_total < 0) throw EngineError("cokernel: negative torsion length");
    if (out.torsion_total > 0) {
        for (int i = 0; i < F.n; ++i) {
            size_t rs = f.src.degs[i].size(), rd = F.degs[i].size();
            if (rs == 0 || rd == 0) continue;
            size_t rho = generic_rank(f.entries[i]);
            if (rho == 0) continue;
            auto located = [&](bool at_infinity) -> long long {
                int N = static_cast<int>(out.torsion_total) + 2;
                std::vector<std::vector<Rat>> cols;
                for (size_t l = 0; l < rs; ++l)
                    for (int a = 0; a < N; ++a) {
                        std::vector<Rat> col(static_cast<size_t>(N) * rd, Rat(0));
                        for (size_t k = 0; k < rd; ++k) {
                            PolyQ p = f.entries[i][k][l];
                            if (at_infinity) p = p.reversed(bound_of(F, f.src, i, k, l));
                            for (int c = 0; c + a < N; ++c)
                                col[k * static_cast<size_t>(N) + static_cast<size_t>(a + c)] =
                                    p.coeff(static_cast<size_t>(c));
                        }
                        cols.push_back(std::move(col));
                    }
                QMat m(static_cast<size_t>(N) * rd, cols.size());
                for (size_t j = 0; j < cols.size(); ++j)
                    for (size_t a = 0; a < m.rows(); ++a) m.at(a, j) = cols[j][a];
                long long dim_quot =
                    static_cast<long long>(N) * static_cast<long long>(rd) - static_cast<long long>(rank(m));
                return dim_quot - static_cast<long long>(N) * static_cast<long long>(rd - rho);
            };
            long long at0 = located(false), atinf = located(true);
            if (at0 > 0) out.torsion.push_back({i + 1, "z=0", at0});
            if (atinf > 0) out.torsion.push_back({i + 1, "z=inf", atinf});
        }
        long long located_sum = 0;
        for (const auto& t : out.torsion) located_sum += t.length;
        if (located_sum < out.torsion_total)
            out.torsion.push_back({0, "interior", out.torsion_total - located_sum});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Isomorphism testing

bool sheaves_isomorphic(const LinkedSheaf& a0, const LinkedSheaf& b0, SheafMorphism* witness) {
    if (a0.n != b0.n) return false;
    LinkedSheaf a = normalize_links(a0), b = normalize_links(b0);
    if (a.chi() != b.chi()) return false;
    for (int i = 0; i < a.n; ++i)
        if (a.degs[i] != b.degs[i]) return false;  // canonical order after normalization
    if (a.is_empty()) {
        if (witness) *witness = zero_morphism(a0, b0);
        return true;
    }
    auto basis = hom_space(a, b);
    if (basis.empty()) return false;
    auto injective = [&](const SheafMorphism& f) {
        for (int i = 0; i < a.n; ++i) {
            size_t r = a.degs[i].size();
            if (r == 0) continue;
            if (generic_rank(f.entries[i]) != r) return false;
        }
        return true;
    };
    uint64_t st = 0x5eed5eedull;
    for (size_t trial = 0; trial < 24 + basis.size(); ++trial) {
        SheafMorphism f = zero_morphism(a, b);
        if (trial < basis.size()) {
            f = basis[trial];
        } else {
            for (auto& g : basis) {
                long long c = static_cast<long long>(splitmix(st) % 19) - 9;
                if (c == 0) c = 1;
                f = f + g.scaled(Rat(c));
            }
        }
        if (injective(f)) {
            if (witness) *witness = f;  // witness between normalized presentations
            return true;
        }
    }
    return false;
}

LinkedSheaf conjugate_links(const LinkedSheaf& e, uint64_t seed) {
    LinkedSheaf out = e;
    uint64_t st = seed ^ 0xabcdef12345ull;
    for (auto& lk : out.links) {
        size_t c = lk.c();
        if (c == 0) continue;
        QMat u(c, c);
        while (true) {
            for (size_t i = 0; i < c; ++i)
                for (size_t j = 0; j < c; ++j) {
                    long long v = static_cast<long long>(splitmix(st) % 7) - 3;
                    u.at(i, j) = Rat(v);
                }
            if (inverse(u)) break;
        }
        lk.L = u * lk.L;
        lk.M = u * lk.M;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decomposition

namespace {

std::vector<SubchainLineBundle> sorted_multiset(std::vector<SubchainLineBundle> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

std::vector<SubchainLineBundle> decompose(const LinkedSheaf& e0) {
    LinkedSheaf e = normalize_links(e0);
    ChainConfig cfg(e.n);
    if (e.is_empty()) return {};
    int c = 1;
    while (e.degs[c - 1].empty()) ++c;

    // twist so that Hom(E, O_c) != 0 and Hom(E, O_c(-1)) = 0
    int lo = *std::min_element(e.degs[c - 1].begin(), e.degs[c - 1].end()) - 1;
    int hi = *std::max_element(e.degs[c - 1].begin(), e.degs[c - 1].end()) + 1;
    int d0 = lo;
    bool found = false;
    for (int d = lo; d <= hi; ++d) {
        if (hom_dim(e, embed(cfg, SubchainLineBundle::single(c, d))) > 0) {
            d0 = d;
            found = true;
            break;
        }
    }
    if (!found) throw EngineError("decompose: no threshold degree");
    std::vector<int> tw(static_cast<size_t>(e.n), 0);
    tw[c - 1] = -d0;
    PicElement L(tw);
    LinkedSheaf en = tensor_pic(e, L);

    auto lam = hom_space(en, embed(cfg, SubchainLineBundle::single(c, 0)));
    if (lam.empty()) throw EngineError("decompose: lost section after twist");
    KernelResult kr = kernel(lam.front());
    std::vector<SubchainLineBundle> mprime = decompose(kr.kernel);

    std::vector<std::vector<SubchainLineBundle>> candidates;
    {
        auto cand = mprime;
        cand.push_back(SubchainLineBundle::single(c, 0));
        candidates.push_back(sorted_multiset(cand));
    }
    std::vector<SubchainLineBundle> tried;
    for (size_t i = 0; i < mprime.size(); ++i) {
        const auto& r = mprime[i];
        if (r.s != c + 1) continue;
        bool dup = false;
        for (const auto& t : tried)
            if (t == r) dup = true;
        if (dup) continue;
        tried.push_back(r);
        std::vector<SubchainLineBundle> cand;
        for (size_t j = 0; j < mprime.size(); ++j)
            if (j != i) cand.push_back(mprime[j]);
        std::vector<int> nd;
        nd.push_back(0);
        nd.push_back(r.degs[0] + 1);
        for (size_t k = 1; k < r.degs.size(); ++k) nd.push_back(r.degs[k]);
        cand.push_back(SubchainLineBundle(c, r.t, std::move(nd)));
        candidates.push_back(sorted_multiset(cand));
    }
    std::vector<std::vector<SubchainLineBundle>> uniq;
    for (auto& cd : candidates) {
        bool dup = false;
        for (const auto& u : uniq)
            if (u == cd) dup = true;
        if (!dup) uniq.push_back(cd);
    }
    const std::vector<SubchainLineBundle>* winner = nullptr;
    for (const auto& cd : uniq) {
        if (sheaves_isomorphic(en, embed_sum(cfg, cd))) {
            winner = &cd;
            break;
        }
    }
    if (!winner) throw EngineError("decompose: no candidate matches (impure input?)");
    std::vector<SubchainLineBundle> out;
    for (const auto& r : *winner) out.push_back(tensor_pic(r, -L));
    return sorted_multiset(out);
}

}  // namespace chaincalc
