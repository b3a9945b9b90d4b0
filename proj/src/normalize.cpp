#include "chaincalc/normalize.hpp"

#include <algorithm>

namespace chaincalc {

namespace {

struct Single {
    SubchainLineBundle r;
    int degree = 0;
};

std::optional<Single> as_single(const DerivedObject& d) {
    if (d.profile.size() != 1) return std::nullopt;
    const auto& [p, sums] = *d.profile.begin();
    if (sums.size() != 1) return std::nullopt;
    return Single{sums[0], p};
}

std::vector<SubchainLineBundle> constituents(const DerivedObject& d) {
    std::vector<SubchainLineBundle> out;
    for (const auto& [p, sums] : d.profile) out.insert(out.end(), sums.begin(), sums.end());
    return out;
}

int max_deg_at(const DerivedObject& d, int curve) {
    bool any = false;
    int m = 0;
    for (const auto& [p, sums] : d.profile)
        for (const auto& r : sums)
            if (r.contains(curve)) {
                int v = r.deg_at(curve);
                if (!any || v > m) m = v;
                any = true;
            }
    if (!any) throw EngineError("max_deg_at: curve outside support");
    return m;
}

// letters for candidates are produced in coordinates where the maximal degree at
// each touched curve is zero; shift them back to the object's actual degrees
TwistWord shift_candidate(const DerivedObject& d, const TwistWord& w) {
    TwistWord out;
    for (const auto& l : w) {
        WordLetter nl = l;
        if (l.kind == WordLetter::Kind::Twist || l.kind == WordLetter::Kind::TwistInv) {
            nl.a = l.a + max_deg_at(d, l.curve);
        } else if (l.kind == WordLetter::Kind::SubTwist || l.kind == WordLetter::Kind::SubTwistInv) {
            for (int c = nl.sigma.s; c <= nl.sigma.t; ++c)
                nl.sigma.degs[c - nl.sigma.s] += max_deg_at(d, c);
        }
        out.push_back(nl);
    }
    return out;
}

struct PlateauInfo {
    int s = 0, t = 0;
};

std::optional<PlateauInfo> find_plateau(const ChainConfig& cfg, const DerivedObject& d) {
    auto l = l_profile(cfg, d);
    auto at = [&](int i) -> long long { return (i >= 1 && i <= cfg.n) ? l[i - 1] : 0; };
    for (int s = 1; s <= cfg.n; ++s) {
        if (at(s) == 0 || at(s - 1) >= at(s)) continue;
        int t = s;
        while (t + 1 <= cfg.n && at(t + 1) == at(s)) ++t;
        if (at(t + 1) < at(s)) return PlateauInfo{s, t};
    }
    return std::nullopt;
}

}  // namespace

TwistWord lemmaA_choose(const ChainConfig& cfg, const DerivedObject& alpha, int curve) {
    // classify the constituents at the curve in normalized degrees
    int delta = max_deg_at(alpha, curve);
    long long r2 = 0, r3 = 0, r4 = 0, r2d = 0, r4d = 0;
    bool common_deg_set = false;
    int common_deg = 0;
    bool common_ok = true;
    for (const auto& r : constituents(alpha)) {
        if (!r.contains(curve)) continue;
        int deg = r.deg_at(curve) - delta;  // in {0, -1}
        bool left = r.s < curve, right = r.t > curve;
        if (left && right) continue;                       // through type
        if (!left && !right) {                             // isolated
            ++r4;
            if (deg == -1) ++r4d;
            if (!common_deg_set) {
                common_deg = deg;
                common_deg_set = true;
            } else if (common_deg != deg)
                common_ok = false;
        } else {                                           // one-sided
            if (deg == 0) ++r2;
            else ++r3;
            if (!common_deg_set) {
                common_deg = deg;
                common_deg_set = true;
            } else if (common_deg != deg)
                common_ok = false;
        }
    }
    std::vector<TwistWord> cands;
    if (r4 > 0 && (r2 + r3) > 0 && common_ok && common_deg_set)
        cands.push_back({WordLetter::T(curve, common_deg - 1)});
    if (r2 > r3) cands.push_back({WordLetter::T(curve, -1)});
    if (r2 < r3) cands.push_back({WordLetter::T(curve, -2)});
    cands.push_back({WordLetter::T(curve, -1)});
    cands.push_back({WordLetter::T(curve, -2)});
    cands.push_back({WordLetter::T(curve, 0)});
    cands.push_back({WordLetter::T(curve, -3)});
    long long l0 = l_value(alpha);
    for (const auto& c : cands) {
        TwistWord w = shift_candidate(alpha, c);
        try {
            DerivedObject out = apply_word(cfg, w, alpha);
            if (l_value(out) < l0) return w;
        } catch (const EngineError&) {
            continue;
        }
    }
    throw EngineError("lemmaA_choose: no length-decreasing twist at the curve");
}

TwistWord lemmaB_choose(const ChainConfig& cfg, const DerivedObject& alpha, int s, int t) {
    std::vector<TwistWord> cands;
    auto add = [&](TwistWord w) { cands.push_back(std::move(w)); };
    add({WordLetter::T(s, -1)});
    add({WordLetter::T(s, -2)});
    add({WordLetter::T(t, -1)});
    add({WordLetter::T(t, -2)});
    // Phi-chain of the middle lemma: T_t(-2) first, then -1 letters working left
    {
        TwistWord w;
        if (t == s + 1) {
            w.push_back(WordLetter::T(t, -2));
        } else {
            w.push_back(WordLetter::T(t, -2));
            for (int l = t - 1; l >= s + 1; --l) w.push_back(WordLetter::T(l, -1));
        }
        add(w);
        TwistWord w2 = w;
        w2.push_back(WordLetter::T(s, -1));
        add(w2);
    }
    // mirrored chain
    {
        TwistWord w;
        if (t == s + 1) {
            w.push_back(WordLetter::T(s, -2));
        } else {
            w.push_back(WordLetter::T(s, -2));
            for (int l = s + 1; l <= t - 1; ++l) w.push_back(WordLetter::T(l, -1));
        }
        add(w);
        TwistWord w2 = w;
        w2.push_back(WordLetter::T(t, -1));
        add(w2);
    }
    // primed chains
    {
        TwistWord w;
        w.push_back(WordLetter::Tinv(t, -1));
        for (int l = t - 1; l >= s + 1; --l) w.push_back(WordLetter::Tinv(l, -1));
        add(w);
        TwistWord w2 = w;
        w2.push_back(WordLetter::Tinv(s, -1));
        add(w2);
    }
    long long l0 = l_value(alpha);
    for (const auto& c : cands) {
        TwistWord w = shift_candidate(alpha, c);
        try {
            DerivedObject out = apply_word(cfg, w, alpha);
            if (l_value(out) < l0) return w;
        } catch (const EngineError&) {
            continue;
        }
    }
    throw EngineError("lemmaB_choose: no length-decreasing word on the plateau");
}

ReductionTrace reduce_spherical(const ChainConfig& cfg, const DerivedObject& alpha, int window_s,
                                int window_t) {
    if (window_t == 0) window_t = cfg.n;
    ReductionTrace tr;
    tr.result = alpha;
    long long guard = l_value(alpha) + 8;
    while (l_value(tr.result) > 1) {
        if (--guard < 0) throw EngineError("reduce_spherical: no progress");
        if (!tr.result.profile.empty() && !constituents(tr.result).empty()) {
            // support must stay inside the window for restricted reductions
            for (const auto& r : constituents(tr.result))
                if (r.s < window_s || r.t > window_t)
                    throw EngineError("reduce_spherical: support left the window");
        }
        auto pl = find_plateau(cfg, tr.result);
        if (!pl) throw EngineError("reduce_spherical: no plateau");
        TwistWord letters = (pl->s == pl->t) ? lemmaA_choose(cfg, tr.result, pl->s)
                                             : lemmaB_choose(cfg, tr.result, pl->s, pl->t);
        ReductionStep step;
        step.letters = letters;
        step.l_before = l_value(tr.result);
        DerivedObject next = apply_word(cfg, letters, tr.result);
        step.l_after = l_value(next);
        step.tag = (pl->s == pl->t) ? "lemmaA@" + std::to_string(pl->s)
                                    : "lemmaB@[" + std::to_string(pl->s) + "," + std::to_string(pl->t) + "]";
        if (step.l_after >= step.l_before) throw EngineError("reduce_spherical: length did not drop");
        tr.result = next;
        for (const auto& l : letters) tr.word.push_back(l);
        tr.steps.push_back(std::move(step));
    }
    return tr;
}

namespace {

// apply candidate words to (alpha, beta); accept the first with l(beta) strictly
// smaller and l(alpha) still 1
struct PairState {
    DerivedObject alpha, beta;
};

bool try_pair_candidates(const ChainConfig& cfg, PairState& st, const std::vector<TwistWord>& cands,
                         ReductionTrace& tr, const std::string& tag) {
    long long l0 = l_value(st.beta);
    for (const auto& w0 : cands) {
        TwistWord w = shift_candidate(st.beta, w0);
        try {
            DerivedObject nb = apply_word(cfg, w, st.beta);
            if (l_value(nb) >= l0) continue;
            DerivedObject na = apply_word(cfg, w, st.alpha);
            if (l_value(na) != 1) continue;
            st.alpha = na;
            st.beta = nb;
            ReductionStep step;
            step.letters = w;
            step.l_before = l0;
            step.l_after = l_value(nb);
            step.tag = tag;
            tr.steps.push_back(step);
            for (const auto& l : w) tr.word.push_back(l);
            return true;
        } catch (const EngineError&) {
            continue;
        }
    }
    return false;
}

TwistWord flip_letters(const ChainConfig& cfg, const TwistWord& w) {
    TwistWord out;
    for (const auto& l : w) {
        WordLetter nl = l;
        if (l.kind == WordLetter::Kind::Twist || l.kind == WordLetter::Kind::TwistInv)
            nl.curve = cfg.n + 1 - l.curve;
        else if (l.kind == WordLetter::Kind::SubTwist || l.kind == WordLetter::Kind::SubTwistInv)
            nl.sigma = flip_bundle(cfg, l.sigma);
        out.push_back(nl);
    }
    return out;
}

}  // namespace

ReductionTrace a1_reduce(const ChainConfig& cfg, const DerivedObject& alpha0,
                         const DerivedObject& beta0) {
    ReductionTrace tr;
    PairState st{alpha0, beta0};
    long long guard = l_value(beta0) + 8;
    while (l_value(st.beta) > 1) {
        if (--guard < 0) throw EngineError("a1_reduce: no progress");
        auto cs = constituents(st.beta);
        int b = cs.front().s;
        int a = max_deg_at(st.beta, b);
        TwistWord w{WordLetter::T(b, a - 1)};
        DerivedObject nb = apply_word(cfg, w, st.beta);
        DerivedObject na = apply_word(cfg, w, st.alpha);
        if (l_value(nb) >= l_value(st.beta) || l_value(na) != 1)
            throw EngineError("a1_reduce: claimed decrease failed");
        ReductionStep step;
        step.letters = w;
        step.l_before = l_value(st.beta);
        step.l_after = l_value(nb);
        step.tag = "a1";
        tr.steps.push_back(step);
        for (const auto& l : w) tr.word.push_back(l);
        st.alpha = na;
        st.beta = nb;
    }
    // endgame: align (O(a)[i], O(a-1)[i])
    auto sa = as_single(st.alpha), sb = as_single(st.beta);
    if (!sa || !sb) throw EngineError("a1_reduce: endpoints not single");
    if (sa->r.s != sb->r.s) throw EngineError("a1_reduce: endpoints on different curves");
    if (!(sb->degree == sa->degree && sb->r.degs[0] == sa->r.degs[0] - 1)) {
        // the other (4.1) solution: beta = O(a+1)[i-2]; one more twist aligns it
        TwistWord w{WordLetter::T(sa->r.s, sa->r.degs[0])};
        DerivedObject na = apply_word(cfg, w, st.alpha);
        DerivedObject nb = apply_word(cfg, w, st.beta);
        ReductionStep step;
        step.letters = w;
        step.l_before = l_value(st.beta);
        step.l_after = l_value(nb);
        step.tag = "a1-align";
        tr.steps.push_back(step);
        for (const auto& l : w) tr.word.push_back(l);
        st.alpha = na;
        st.beta = nb;
        sa = as_single(st.alpha);
        sb = as_single(st.beta);
        if (!sa || !sb || sa->r.s != sb->r.s || sb->degree != sa->degree ||
            sb->r.degs[0] != sa->r.degs[0] - 1)
            throw EngineError("a1_reduce: endpoint contract failed");
    }
    tr.result = st.beta;
    return tr;
}

PairTrace reduce_pair(const ChainConfig& cfg, const DerivedObject& alpha0, const DerivedObject& beta0,
                      int window_s, int window_t) {
    if (window_t == 0) window_t = cfg.n;
    PairTrace out;
    ReductionTrace& tr = out.trace;
    PairState st{alpha0, beta0};
    // stage 1: make alpha a single shifted line bundle
    {
        ReductionTrace t1 = reduce_spherical(cfg, st.alpha, window_s, window_t);
        st.alpha = t1.result;
        st.beta = apply_word(cfg, t1.word, st.beta);
        for (const auto& s : t1.steps) tr.steps.push_back(s);
        for (const auto& l : t1.word) tr.word.push_back(l);
    }
    long long guard = 4 * l_value(st.beta) + 24;
    while (l_value(st.beta) > 1) {
        if (--guard < 0) throw EngineError("reduce_pair: no progress");
        auto sa = as_single(st.alpha);
        if (!sa) throw EngineError("reduce_pair: alpha left the normal form");
        int b = sa->r.s;
        for (const auto& r : constituents(st.beta))
            if (r.s < window_s || r.t > window_t)
                throw EngineError("reduce_pair: support left the window");

        // case: a constituent of beta disjoint from C_b (distance >= 2)
        const SubchainLineBundle* far_piece = nullptr;
        for (const auto& r : constituents(st.beta))
            if (r.t < b - 1 || r.s > b + 1) {
                far_piece = &r;
                break;
            }
        if (far_piece) {
            // one reduction step confined to the support of that piece
            DerivedObject sub = st.beta;
            auto pl = find_plateau(cfg, sub);
            // restrict the plateau search to the far piece's support
            int fs = far_piece->s, ft = far_piece->t;
            auto lp = l_profile(cfg, sub);
            auto at = [&](int i) -> long long { return (i >= 1 && i <= cfg.n) ? lp[i - 1] : 0; };
            std::optional<PlateauInfo> win;
            for (int s = fs; s <= ft && !win; ++s) {
                if (at(s) == 0 || at(s - 1) >= at(s)) continue;
                int t = s;
                while (t + 1 <= ft && at(t + 1) == at(s)) ++t;
                if (at(t + 1) < at(s) && t <= ft) win = PlateauInfo{s, t};
            }
            if (win) {
                try {
                    TwistWord letters = (win->s == win->t)
                                            ? lemmaA_choose(cfg, st.beta, win->s)
                                            : lemmaB_choose(cfg, st.beta, win->s, win->t);
                    long long l0 = l_value(st.beta);
                    DerivedObject nb = apply_word(cfg, letters, st.beta);
                    DerivedObject na = apply_word(cfg, letters, st.alpha);
                    if (l_value(nb) < l0 && l_value(na) == 1) {
                        ReductionStep step;
                        step.letters = letters;
                        step.l_before = l0;
                        step.l_after = l_value(nb);
                        step.tag = "R0-window";
                        tr.steps.push_back(step);
                        for (const auto& l : letters) tr.word.push_back(l);
                        st.alpha = na;
                        st.beta = nb;
                        continue;
                    }
                } catch (const EngineError&) {
                }
            }
            // fall through to the touching cases if the window step failed
        }

        bool right_touch = false, left_touch = false, all_contain = true;
        for (const auto& r : constituents(st.beta)) {
            if (r.s == b + 1) right_touch = true;
            if (r.t == b - 1) left_touch = true;
            if (!r.contains(b)) all_contain = false;
        }

        // support confined to C_b: the A_1 base case
        bool only_b = true;
        for (const auto& r : constituents(st.beta))
            if (!(r.s == b && r.t == b)) only_b = false;
        if (only_b) {
            ReductionTrace t2 = a1_reduce(cfg, st.alpha, st.beta);
            st.beta = t2.result;
            st.alpha = apply_word(cfg, t2.word, st.alpha);
            for (const auto& s : t2.steps) tr.steps.push_back(s);
            for (const auto& l : t2.word) tr.word.push_back(l);
            continue;
        }

        std::vector<TwistWord> cands;
        auto add = [&](std::initializer_list<WordLetter> ls) { cands.push_back(TwistWord(ls)); };
        if (left_touch && !right_touch) {
            // mirror of the right-touch case
            std::vector<TwistWord> mirror;
            int mb = cfg.n + 1 - b;
            (void)mb;
            // build right-touch candidates at b in flipped coordinates and flip letters
            std::vector<TwistWord> rc;
            rc.push_back({WordLetter::T(b - 1, -1), WordLetter::T(b, 0)});
            rc.push_back({WordLetter::T(b - 1, -2), WordLetter::T(b, 0)});
            rc.push_back({WordLetter::T(b - 1, -2), WordLetter::T(b, -1)});
            rc.push_back({WordLetter::Ts(SubchainLineBundle(b - 1, b, {-2, -1}))});
            rc.push_back({WordLetter::TsInv(SubchainLineBundle(b - 1, b, {0, 0}))});
            rc.push_back({WordLetter::T(b - 1, -1), WordLetter::T(b, -1)});
            rc.push_back({WordLetter::T(b, -1)});
            rc.push_back({WordLetter::T(b, -2)});
            rc.push_back({WordLetter::T(b, 0)});
            for (auto& w : rc) cands.push_back(w);
        } else if (right_touch && left_touch) {
            // case (iii): subchain twists across the left node first
            add({WordLetter::Ts(SubchainLineBundle(b - 1, b, {-1, -1}))});
            add({WordLetter::TsInv(SubchainLineBundle(b - 1, b, {0, 0}))});
            add({WordLetter::T(b - 1, -2), WordLetter::T(b, -1)});
            add({WordLetter::Ts(SubchainLineBundle(b, b + 1, {-1, -1}))});
            add({WordLetter::TsInv(SubchainLineBundle(b, b + 1, {0, 0}))});
            add({WordLetter::T(b + 1, -2), WordLetter::T(b, -1)});
        } else if (right_touch) {
            add({WordLetter::T(b + 1, -1), WordLetter::T(b, 0)});
            add({WordLetter::T(b + 1, -2), WordLetter::T(b, 0)});
            add({WordLetter::T(b + 1, -2), WordLetter::T(b, -1)});
            add({WordLetter::Ts(SubchainLineBundle(b, b + 1, {-1, -2}))});
            add({WordLetter::TsInv(SubchainLineBundle(b, b + 1, {0, 0}))});
            add({WordLetter::T(b + 1, -1), WordLetter::T(b, -1)});
            add({WordLetter::T(b, -1)});
            add({WordLetter::T(b, -2)});
            add({WordLetter::T(b, 0)});
            // chains toward the far end of the touchers
            int bpp = b;
            for (const auto& r : constituents(st.beta)) bpp = std::max(bpp, r.t);
            if (bpp > b + 1) {
                TwistWord chain;
                chain.push_back(WordLetter::T(bpp, -2));
                for (int l = bpp - 1; l >= b + 1; --l) chain.push_back(WordLetter::T(l, -1));
                cands.push_back(chain);
                TwistWord chain2 = chain;
                chain2.push_back(WordLetter::T(b, 0));
                cands.push_back(chain2);
            }
        } else {
            // case (i): everything contains C_b
            (void)all_contain;
            add({WordLetter::T(b, -1)});
            add({WordLetter::T(b, -2)});
            add({WordLetter::T(b, 0)});
        }
        if (try_pair_candidates(cfg, st, cands, tr, "pair-case")) continue;
        // last resort: an unrestricted reduction step on beta keeping l(alpha) = 1
        auto pl = find_plateau(cfg, st.beta);
        if (pl) {
            try {
                TwistWord letters = (pl->s == pl->t) ? lemmaA_choose(cfg, st.beta, pl->s)
                                                     : lemmaB_choose(cfg, st.beta, pl->s, pl->t);
                long long l0 = l_value(st.beta);
                DerivedObject nb = apply_word(cfg, letters, st.beta);
                DerivedObject na = apply_word(cfg, letters, st.alpha);
                if (l_value(nb) < l0 && l_value(na) == 1) {
                    ReductionStep step;
                    step.letters = letters;
                    step.l_before = l0;
                    step.l_after = l_value(nb);
                    step.tag = "pair-fallback";
                    tr.steps.push_back(step);
                    for (const auto& l : letters) tr.word.push_back(l);
                    st.alpha = na;
                    st.beta = nb;
                    continue;
                }
            } catch (const EngineError&) {
            }
        }
        throw EngineError("reduce_pair: exhausted the case words");
    }
    // endgame on a single curve
    {
        auto sa = as_single(st.alpha), sb = as_single(st.beta);
        if (!sa || !sb) throw EngineError("reduce_pair: endpoints not single");
        if (sa->r.s != sb->r.s || sb->degree != sa->degree ||
            sb->r.degs[0] != sa->r.degs[0] - 1) {
            ReductionTrace t2 = a1_reduce(cfg, st.alpha, st.beta);
            st.beta = t2.result;
            st.alpha = apply_word(cfg, t2.word, st.alpha);
            for (const auto& s : t2.steps) tr.steps.push_back(s);
            for (const auto& l : t2.word) tr.word.push_back(l);
        }
    }
    auto sa = as_single(st.alpha), sb = as_single(st.beta);
    if (!sa || !sb || sa->r.s != sb->r.s || sb->degree != sa->degree ||
        sb->r.degs[0] != sa->r.degs[0] - 1)
        throw EngineError("reduce_pair: endpoint contract failed");
    out.alpha = st.alpha;
    out.beta = st.beta;
    out.curve = sa->r.s;
    out.shift = -sa->degree;
    out.a = sa->r.degs[0];
    tr.result = st.beta;
    return out;
}

TwistWord NormalForm::as_word(const ChainConfig& cfg) const {
    TwistWord w;
    if (!pic.is_zero()) w.push_back(WordLetter::L(pic));
    if (flip) w.push_back(WordLetter::FlipLetter());
    if (shift != 0) w.push_back(WordLetter::ShiftLetter(shift));
    for (const auto& l : b_word) w.push_back(l);
    (void)cfg;
    return w;
}

FactorizationResult normalize_autoequivalence(const ChainConfig& cfg, const TwistWord& w) {
    FactorizationResult res;
    TwistWord psi;  // accumulated B-normalizer, applied after w
    int lo = 1, hi = cfg.n;
    for (int stage = 1; stage <= cfg.n; ++stage) {
        // probe the first remaining curve through the current composite
        int probe = lo;
        TwistWord composite = w;
        for (const auto& l : psi) composite.push_back(l);
        DerivedObject pa = apply_word(cfg, composite, sheaf_object(cfg, SubchainLineBundle::single(probe, 0)));
        DerivedObject pb =
            apply_word(cfg, composite, sheaf_object(cfg, SubchainLineBundle::single(probe, -1)));
        PairTrace pt = reduce_pair(cfg, pa, pb, lo, hi);
        for (const auto& l : pt.trace.word) psi.push_back(l);
        if (stage < cfg.n) {
            if (pt.curve != lo && pt.curve != hi)
                throw EngineError("normalize_autoequivalence: landing curve not at a window end");
            if (pt.curve == hi)
                --hi;
            else
                ++lo;
        }
    }
    // read off the residual Pic/flip/shift from the probe images
    TwistWord composite = w;
    for (const auto& l : psi) composite.push_back(l);
    std::vector<int> curve_img(static_cast<size_t>(cfg.n) + 1, 0);
    std::vector<int> deg_img(static_cast<size_t>(cfg.n) + 1, 0);
    std::vector<int> shift_img(static_cast<size_t>(cfg.n) + 1, 0);
    for (int i = 1; i <= cfg.n; ++i) {
        DerivedObject img =
            apply_word(cfg, composite, sheaf_object(cfg, SubchainLineBundle::single(i, -1)));
        auto s = as_single(img);
        if (!s) throw EngineError("normalize_autoequivalence: probe image not a shifted bundle");
        curve_img[i] = s->r.s;
        deg_img[i] = s->r.degs[0];
        shift_img[i] = -s->degree;
    }
    bool flip = cfg.n > 1 && curve_img[1] == cfg.n;
    for (int i = 1; i <= cfg.n; ++i) {
        int expect = flip ? cfg.n + 1 - i : i;
        if (curve_img[i] != expect)
            throw EngineError("normalize_autoequivalence: probe permutation is not a chain symmetry");
        if (shift_img[i] != shift_img[1])
            throw EngineError("normalize_autoequivalence: inconsistent probe shifts");
    }
    NormalForm nf;
    nf.flip = flip;
    nf.shift = shift_img[1];
    std::vector<int> L(static_cast<size_t>(cfg.n), 0);
    for (int i = 1; i <= cfg.n; ++i) L[curve_img[i] - 1] = deg_img[i] + 1;
    nf.pic = PicElement(L);
    nf.b_word = inverse_word(psi);
    res.nf = nf;
    // certification: same K matrix and the same action on the default test set
    TwistWord cand = nf.as_word(cfg);
    if (!(word_k_matrix(cfg, w) == word_k_matrix(cfg, cand))) {
        res.certified = false;
        res.witness = "K-matrix";
        return res;
    }
    for (const auto& obj : default_test_set(cfg)) {
        DerivedObject a = apply_word(cfg, w, obj);
        DerivedObject b = apply_word(cfg, cand, obj);
        bool same = a.e_known && b.e_known ? objects_isomorphic(cfg, a, b) : a.profile == b.profile;
        if (!same) {
            res.certified = false;
            res.witness = obj.str();
            return res;
        }
    }
    res.certified = true;
    return res;
}

TwistWord conjugate_twist(const ChainConfig& cfg, const TwistWord& phi, const DerivedObject& sigma) {
    DerivedObject img = apply_word(cfg, phi, sigma);
    ReductionTrace tr = reduce_spherical(cfg, img);
    auto s = as_single(tr.result);
    if (!s) throw EngineError("conjugate_twist: reduction endpoint not a line bundle");
    TwistWord out = tr.word;
    out.push_back(WordLetter::T(s->r.s, s->r.degs[0]));
    TwistWord inv = inverse_word(tr.word);
    for (const auto& l : inv) out.push_back(l);
    return out;
}

}  // namespace chaincalc
