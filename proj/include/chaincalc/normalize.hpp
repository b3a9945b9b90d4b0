#pragma once

#include "chaincalc/twist.hpp"

namespace chaincalc {

// One reduction step: the chosen letters, the length bookkeeping and a tag
// naming which reduction rule fired.
struct ReductionStep {
    TwistWord letters;
    long long l_before = 0, l_after = 0;
    std::string tag;
};

struct ReductionTrace {
    std::vector<ReductionStep> steps;
    TwistWord word;        // concatenation of all steps, applied left to right
    DerivedObject result;  // the reduced object
};

// Reduce a spherical object to a single shifted line bundle O_{C_b}(a)[i].
// The optional window restricts the chosen twists to curves in [s, t].
ReductionTrace reduce_spherical(const ChainConfig& cfg, const DerivedObject& alpha,
                                int window_s = 1, int window_t = 0 /* 0 = n */);

// Letter choosers for an isolated maximal plateau (Lemma A) and for a wider
// plateau (Lemma B); both certified by replay in reduce_spherical.
TwistWord lemmaA_choose(const ChainConfig& cfg, const DerivedObject& alpha, int curve);
TwistWord lemmaB_choose(const ChainConfig& cfg, const DerivedObject& alpha, int s, int t);

struct PairTrace {
    ReductionTrace trace;       // letters applied to both objects
    DerivedObject alpha, beta;  // the reduced endpoints
    int curve = 0;              // landing curve
    int shift = 0;              // common shift of the endpoints
    int a = 0;                  // endpoint degrees (a, a-1)
};

// Normalize a pair (alpha, beta) = Phi(O_{C_1}), Phi(O_{C_1}(-1)) to
// (O_{C_b}(a)[i], O_{C_b}(a-1)[i]). The optional window restricts all letters.
PairTrace reduce_pair(const ChainConfig& cfg, const DerivedObject& alpha, const DerivedObject& beta,
                      int window_s = 1, int window_t = 0);

// A_1 specialization (support confined to one curve).
ReductionTrace a1_reduce(const ChainConfig& cfg, const DerivedObject& alpha,
                         const DerivedObject& beta);

// Normal form of Theorem-style factorization: a B-interior word, a Pic twist, an
// optional flip and a shift.
struct NormalForm {
    TwistWord b_word;
    PicElement pic;
    bool flip = false;
    int shift = 0;
    TwistWord as_word(const ChainConfig& cfg) const;
};

struct FactorizationResult {
    NormalForm nf;
    bool certified = false;
    std::string witness;  // failing object when certification fails
};

FactorizationResult normalize_autoequivalence(const ChainConfig& cfg, const TwistWord& w);

}  // namespace chaincalc
