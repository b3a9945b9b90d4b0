#include "chaincalc/word.hpp"

#include <sstream>

#include "chaincalc/twist.hpp"

namespace chaincalc {

WordLetter WordLetter::T(int curve, int a) {
    WordLetter l;
    l.kind = Kind::Twist;
    l.curve = curve;
    l.a = a;
    return l;
}
WordLetter WordLetter::Tinv(int curve, int a) {
    WordLetter l = T(curve, a);
    l.kind = Kind::TwistInv;
    return l;
}
WordLetter WordLetter::Ts(const SubchainLineBundle& sigma) {
    WordLetter l;
    l.kind = Kind::SubTwist;
    l.sigma = sigma;
    return l;
}
WordLetter WordLetter::TsInv(const SubchainLineBundle& sigma) {
    WordLetter l = Ts(sigma);
    l.kind = Kind::SubTwistInv;
    return l;
}
WordLetter WordLetter::L(const PicElement& p) {
    WordLetter l;
    l.kind = Kind::Pic;
    l.pic = p;
    return l;
}
WordLetter WordLetter::FlipLetter() {
    WordLetter l;
    l.kind = Kind::Flip;
    return l;
}
WordLetter WordLetter::ShiftLetter(int k) {
    WordLetter l;
    l.kind = Kind::Shift;
    l.shift = k;
    return l;
}

SubchainLineBundle WordLetter::twist_bundle() const {
    if (kind == Kind::Twist || kind == Kind::TwistInv) return SubchainLineBundle::single(curve, a);
    if (kind == Kind::SubTwist || kind == Kind::SubTwistInv) return sigma;
    throw std::invalid_argument("twist_bundle: not a twist letter");
}

std::string WordLetter::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Twist:
            os << "T(" << curve << "," << a << ")";
            break;
        case Kind::TwistInv:
            os << "T'(" << curve << "," << a << ")";
            break;
        case Kind::SubTwist:
        case Kind::SubTwistInv:
            os << (kind == Kind::SubTwist ? "Ts(" : "Ts'(") << sigma.s << "," << sigma.t << ";";
            for (size_t i = 0; i < sigma.degs.size(); ++i) os << (i ? " " : "") << sigma.degs[i];
            os << ")";
            break;
        case Kind::Pic: {
            os << "L(";
            for (size_t i = 0; i < pic.degrees.size(); ++i) os << (i ? " " : "") << pic.degrees[i];
            os << ")";
            break;
        }
        case Kind::Flip:
            os << "flip";
            break;
        case Kind::Shift:
            os << "shift(" << shift << ")";
            break;
    }
    return os.str();
}

std::string word_str(const TwistWord& w) {
    std::ostringstream os;
    for (size_t i = 0; i < w.size(); ++i) os << (i ? " " : "") << w[i].str();
    return os.str();
}

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            out.push_back(std::stoi(cur));
            cur.clear();
        }
    };
    for (char c : s) {
        if (c == ' ' || c == ',') {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return out;
}

}  // namespace

TwistWord parse_word(const ChainConfig& cfg, const std::string& text) {
    TwistWord w;
    size_t i = 0;
    auto fail = [&](const std::string& m) { throw std::invalid_argument("parse_word: " + m); };
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        auto grab_args = [&](size_t start) {
            size_t open = text.find('(', start);
            if (open == std::string::npos) fail("expected (");
            size_t close = text.find(')', open);
            if (close == std::string::npos) fail("expected )");
            std::string inside = text.substr(open + 1, close - open - 1);
            i = close + 1;
            return inside;
        };
        if (text.compare(i, 4, "flip") == 0) {
            w.push_back(WordLetter::FlipLetter());
            i += 4;
        } else if (text.compare(i, 5, "shift") == 0) {
            auto args = parse_int_list(grab_args(i));
            if (args.size() != 1) fail("shift(k)");
            w.push_back(WordLetter::ShiftLetter(args[0]));
        } else if (text.compare(i, 3, "Ts'") == 0 || text.compare(i, 3, "Ts(") == 0 ||
                   text.compare(i, 2, "Ts") == 0) {
            bool inv = text.compare(i, 3, "Ts'") == 0;
            std::string inside = grab_args(i);
            auto semi = inside.find(';');
            if (semi == std::string::npos) fail("Ts(s,t;degs)");
            auto st = parse_int_list(inside.substr(0, semi));
            auto degs = parse_int_list(inside.substr(semi + 1));
            if (st.size() != 2) fail("Ts(s,t;degs)");
            SubchainLineBundle sb(st[0], st[1], degs);
            w.push_back(inv ? WordLetter::TsInv(sb) : WordLetter::Ts(sb));
        } else if (text.compare(i, 2, "T'") == 0) {
            auto args = parse_int_list(grab_args(i));
            if (args.size() != 2) fail("T'(l,a)");
            w.push_back(WordLetter::Tinv(args[0], args[1]));
        } else if (text[i] == 'T') {
            auto args = parse_int_list(grab_args(i));
            if (args.size() != 2) fail("T(l,a)");
            w.push_back(WordLetter::T(args[0], args[1]));
        } else if (text[i] == 'L') {
            auto args = parse_int_list(grab_args(i));
            if (static_cast<int>(args.size()) != cfg.n) fail("L needs n degrees");
            w.push_back(WordLetter::L(PicElement(args)));
        } else {
            fail("unknown letter at: " + text.substr(i));
        }
    }
    for (const auto& l : w)
        if (l.is_twist_kind()) {
            auto b = l.twist_bundle();
            if (b.t > cfg.n) fail("twist outside the chain");
        }
    return w;
}

TwistWord inverse_word(const TwistWord& w) {
    TwistWord out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        WordLetter l = *it;
        switch (l.kind) {
            case WordLetter::Kind::Twist:
                l.kind = WordLetter::Kind::TwistInv;
                break;
            case WordLetter::Kind::TwistInv:
                l.kind = WordLetter::Kind::Twist;
                break;
            case WordLetter::Kind::SubTwist:
                l.kind = WordLetter::Kind::SubTwistInv;
                break;
            case WordLetter::Kind::SubTwistInv:
                l.kind = WordLetter::Kind::SubTwist;
                break;
            case WordLetter::Kind::Pic:
                l.pic = -l.pic;
                break;
            case WordLetter::Kind::Flip:
                break;
            case WordLetter::Kind::Shift:
                l.shift = -l.shift;
                break;
        }
        out.push_back(l);
    }
    return out;
}

namespace {
bool letters_cancel(const WordLetter& a, const WordLetter& b) {
    auto inv_kind = [](WordLetter::Kind k) {
        switch (k) {
            case WordLetter::Kind::Twist: return WordLetter::Kind::TwistInv;
            case WordLetter::Kind::TwistInv: return WordLetter::Kind::Twist;
            case WordLetter::Kind::SubTwist: return WordLetter::Kind::SubTwistInv;
            case WordLetter::Kind::SubTwistInv: return WordLetter::Kind::SubTwist;
            default: return k;
        }
    };
    if (a.is_twist_kind() && b.is_twist_kind())
        return inv_kind(a.kind) == b.kind && a.twist_bundle() == b.twist_bundle();
    return false;
}
}  // namespace

TwistWord simplify_word(const TwistWord& w) {
    TwistWord out;
    for (const auto& l : w) {
        if (l.kind == WordLetter::Kind::Shift && l.shift == 0) continue;
        if (l.kind == WordLetter::Kind::Pic && l.pic.is_zero()) continue;
        if (!out.empty() && letters_cancel(out.back(), l)) {
            out.pop_back();
            continue;
        }
        if (!out.empty() && out.back().kind == WordLetter::Kind::Pic &&
            l.kind == WordLetter::Kind::Pic) {
            out.back().pic = out.back().pic + l.pic;
            if (out.back().pic.is_zero()) out.pop_back();
            continue;
        }
        if (!out.empty() && out.back().kind == WordLetter::Kind::Shift &&
            l.kind == WordLetter::Kind::Shift) {
            out.back().shift += l.shift;
            if (out.back().shift == 0) out.pop_back();
            continue;
        }
        out.push_back(l);
    }
    return out;
}

QMat letter_k_matrix(const ChainConfig& cfg, const WordLetter& l) {
    size_t n = static_cast<size_t>(cfg.n);
    QMat m = QMat::identity(n + 1);
    switch (l.kind) {
        case WordLetter::Kind::Twist:
        case WordLetter::Kind::TwistInv:
        case WordLetter::Kind::SubTwist:
        case WordLetter::Kind::SubTwistInv: {
            KClass sk = k_class(cfg, l.twist_bundle());
            // reflection x -> x - chi(sigma, x) sigma; chi kills the point class
            for (size_t col = 0; col < n; ++col) {
                KClass basis(cfg.n);
                basis.curve_mult[col] = 1;
                long long chi = euler_form(sk, basis);
                for (size_t row = 0; row < n; ++row)
                    m.at(row, col) = m.at(row, col) - Rat(chi * sk.curve_mult[row]);
                m.at(n, col) = m.at(n, col) - Rat(chi * sk.point_mult);
            }
            break;
        }
        case WordLetter::Kind::Pic: {
            for (size_t col = 0; col < n; ++col)
                m.at(n, col) = Rat(l.pic.degrees[col]);  // [O_{C_i}(-1)] -> +d_i [O_x]
            break;
        }
        case WordLetter::Kind::Flip: {
            m = QMat(n + 1, n + 1);
            for (size_t i = 0; i < n; ++i) m.at(i, n - 1 - i) = Rat(1);
            m.at(n, n) = Rat(1);
            break;
        }
        case WordLetter::Kind::Shift: {
            if (l.shift % 2 != 0) m = m.scaled(Rat(-1));
            break;
        }
    }
    return m;
}

QMat word_k_matrix(const ChainConfig& cfg, const TwistWord& w) {
    QMat m = QMat::identity(static_cast<size_t>(cfg.n) + 1);
    for (const auto& l : w) m = letter_k_matrix(cfg, l) * m;  // applied left to right
    return m;
}

TwistWord phi0_word(const ChainConfig& cfg) {
    TwistWord w;
    for (int l = 1; l <= cfg.n; ++l) w.push_back(WordLetter::T(l, -1));
    std::vector<int> d(static_cast<size_t>(cfg.n), 0);
    d.back() = 1;
    w.push_back(WordLetter::L(PicElement(d)));
    // Phi_0 = T_{O_{C_1}(-1)} o ... o T_{O_{C_n}(-1)} o tensor: tensor acts first,
    // so reading the applied-left-to-right word it comes before the twists reversed.
    TwistWord applied;
    applied.push_back(w.back());
    for (int l = cfg.n; l >= 1; --l) applied.push_back(WordLetter::T(l, -1));
    return applied;
}

WordLetter omega_twist_letter(const ChainConfig& cfg, bool inverse) {
    SubchainLineBundle w = dualizing_sheaf(cfg);
    return inverse ? WordLetter::TsInv(w) : WordLetter::Ts(w);
}

namespace {

SubchainLineBundle subchain_omega(int s, int t) {
    if (s == t) return SubchainLineBundle(s, s, {-2});
    std::vector<int> d(static_cast<size_t>(t - s + 1), 0);
    d.front() = -1;
    d.back() = -1;
    return SubchainLineBundle(s, t, d);
}

void append(TwistWord& w, const TwistWord& x) {
    for (const auto& l : x) w.push_back(l);
}

// Rewrite over {T(i,-1) : s <= i <= t} and T_{omega_{[s,t]}} (and inverses), by
// induction on the window: letters away from an end are rewritten in the shrunken
// window and the shrunken dualizing twist is peeled back with the end generator.
TwistWord rewrite_in_window(const ChainConfig& cfg, const WordLetter& letter, int s, int t) {
    if (!letter.is_twist_kind()) throw std::invalid_argument("rewrite: not a twist letter");
    if (letter.kind == WordLetter::Kind::TwistInv || letter.kind == WordLetter::Kind::SubTwistInv) {
        WordLetter fwd = letter;
        fwd.kind = letter.kind == WordLetter::Kind::TwistInv ? WordLetter::Kind::Twist
                                                             : WordLetter::Kind::SubTwist;
        return inverse_word(rewrite_in_window(cfg, fwd, s, t));
    }
    if (letter.kind == WordLetter::Kind::SubTwist) {
        const SubchainLineBundle& sg = letter.sigma;
        if (!(sg == subchain_omega(sg.s, sg.t)))
            throw std::invalid_argument("rewrite: unsupported subchain twist");
        if (sg.s == s && sg.t == t) return {letter};
        throw EngineError("rewrite: dualizing twist outside the window");
    }
    int l = letter.curve, a = letter.a;
    if (l < s || l > t) throw std::invalid_argument("rewrite: letter outside window");
    if (a == -1) return {WordLetter::T(l, -1)};
    if (s == t) {
        if (a == -2) return {WordLetter::Ts(subchain_omega(l, l))};
        // conjugate by tensor O_X(mC): T_{O(a)} = Phi o T_{O(a+2m)} o Phi^{-1},
        // Phi = tensor O_X(mC); tensor O_X(C) itself is T(l,-1) then T(l,-2)
        int target = (a % 2 == 0) ? -2 : -1;
        int m = (target - a) / 2;
        TwistWord tensor_c;
        tensor_c.push_back(WordLetter::T(l, -1));
        append(tensor_c, rewrite_in_window(cfg, WordLetter::T(l, -2), s, t));
        TwistWord phi, phi_inv;
        for (int i = 0; i < std::abs(m); ++i)
            append(m > 0 ? phi : phi_inv, tensor_c);
        {
            TwistWord inv = inverse_word(tensor_c);
            for (int i = 0; i < std::abs(m); ++i) append(m > 0 ? phi_inv : phi, inv);
        }
        TwistWord out;
        append(out, phi_inv);
        append(out, rewrite_in_window(cfg, WordLetter::T(l, target), s, t));
        append(out, phi);
        return out;
    }
    // window of length >= 2: rewrite inside the shrunken window missing one end,
    // then substitute its dualizing twist
    bool drop_left = (l > s);
    int ss = drop_left ? s + 1 : s;
    int tt = drop_left ? t : t - 1;
    TwistWord inner = rewrite_in_window(cfg, letter, ss, tt);
    SubchainLineBundle sub_omega = subchain_omega(ss, tt);
    int peel = drop_left ? s : t;
    TwistWord subst;
    subst.push_back(WordLetter::T(peel, -1));
    subst.push_back(WordLetter::Ts(subchain_omega(s, t)));
    subst.push_back(WordLetter::Tinv(peel, -1));
    TwistWord subst_inv = inverse_word(subst);
    TwistWord out;
    for (const auto& x : inner) {
        if (x.kind == WordLetter::Kind::SubTwist && x.sigma == sub_omega)
            append(out, subst);
        else if (x.kind == WordLetter::Kind::SubTwistInv && x.sigma == sub_omega)
            append(out, subst_inv);
        else
            out.push_back(x);
    }
    return out;
}

}  // namespace

TwistWord rewrite_to_B(const ChainConfig& cfg, const WordLetter& letter) {
    return simplify_word(rewrite_in_window(cfg, letter, 1, cfg.n));
}

TwistWord rewrite_word_to_B(const ChainConfig& cfg, const TwistWord& w) {
    TwistWord out;
    for (const auto& l : w) {
        auto r = rewrite_to_B(cfg, l);
        for (const auto& x : r) out.push_back(x);
    }
    return out;
}

std::vector<DerivedObject> default_test_set(const ChainConfig& cfg) {
    std::vector<DerivedObject> out;
    for (int i = 1; i <= cfg.n; ++i) out.push_back(sheaf_object(cfg, SubchainLineBundle::single(i, -1)));
    out.push_back(sheaf_object(cfg, dualizing_sheaf(cfg)));
    for (int i = 1; i <= cfg.n; ++i) out.push_back(sheaf_object(cfg, SubchainLineBundle::single(i, 0)));
    for (int i = 1; i + 1 <= cfg.n; ++i)
        out.push_back(sheaf_object(cfg, SubchainLineBundle(i, i + 1, {0, -1})));
    return out;
}

RelationReport check_relation(const ChainConfig& cfg, const TwistWord& w1, const TwistWord& w2,
                              bool objects_level) {
    RelationReport rep;
    if (!(word_k_matrix(cfg, w1) == word_k_matrix(cfg, w2))) {
        rep.pass = false;
        rep.witness = "K-matrix";
        return rep;
    }
    if (!objects_level) return rep;
    for (const auto& obj : default_test_set(cfg)) {
        DerivedObject a = apply_word(cfg, w1, obj);
        DerivedObject b = apply_word(cfg, w2, obj);
        bool same = a.e_known && b.e_known ? objects_isomorphic(cfg, a, b) : a.profile == b.profile;
        if (!same) {
            rep.pass = false;
            rep.witness = obj.str();
            return rep;
        }
    }
    return rep;
}

}  // namespace chaincalc
