#pragma once

#include <string>
#include <vector>

#include "chaincalc/object.hpp"

namespace chaincalc {

// Letters of words in <B, Pic X, flip, shift>. Applied left to right.
struct WordLetter {
    enum class Kind { Twist, TwistInv, SubTwist, SubTwistInv, Pic, Flip, Shift };
    Kind kind = Kind::Twist;
    int curve = 1;              // Twist(Inv)
    int a = -1;                 // Twist(Inv) degree
    SubchainLineBundle sigma;   // SubTwist(Inv)
    PicElement pic;             // Pic
    int shift = 0;              // Shift

    static WordLetter T(int curve, int a);
    static WordLetter Tinv(int curve, int a);
    static WordLetter Ts(const SubchainLineBundle& sigma);
    static WordLetter TsInv(const SubchainLineBundle& sigma);
    static WordLetter L(const PicElement& p);
    static WordLetter FlipLetter();
    static WordLetter ShiftLetter(int k);

    std::string str() const;
    bool is_twist_kind() const {
        return kind == Kind::Twist || kind == Kind::TwistInv || kind == Kind::SubTwist ||
               kind == Kind::SubTwistInv;
    }
    SubchainLineBundle twist_bundle() const;  // sigma of a twist letter
    bool twist_inverse() const { return kind == Kind::TwistInv || kind == Kind::SubTwistInv; }
};

using TwistWord = std::vector<WordLetter>;

std::string word_str(const TwistWord& w);
TwistWord parse_word(const ChainConfig& cfg, const std::string& text);  // throws on bad syntax
TwistWord inverse_word(const TwistWord& w);

// Cancel adjacent mutually inverse letters (and merge Pic/shift runs).
TwistWord simplify_word(const TwistWord& w);

// Action on K_Z(X) = Z^{n+1} in the basis ([O_{C_i}(-1)], [O_x]).
QMat letter_k_matrix(const ChainConfig& cfg, const WordLetter& l);
QMat word_k_matrix(const ChainConfig& cfg, const TwistWord& w);

// Phi_0 = T_{O_{C_1}(-1)} ... T_{O_{C_n}(-1)} tensor O_X(0,...,0,1), as an applied-left-to-right word.
TwistWord phi0_word(const ChainConfig& cfg);

// Dualizing-sheaf twist as a subchain twist letter.
WordLetter omega_twist_letter(const ChainConfig& cfg, bool inverse = false);

// Rewrite a twist letter as a word over the B generators {T(l,-1), T_{omega_Z}} and
// their inverses, certified by the caller on the object test set.
TwistWord rewrite_to_B(const ChainConfig& cfg, const WordLetter& letter);
TwistWord rewrite_word_to_B(const ChainConfig& cfg, const TwistWord& w);

// Default object test set: O_{C_i}(-1), omega_Z, O_{C_i}(0), one length-2 bundle per node.
std::vector<DerivedObject> default_test_set(const ChainConfig& cfg);

struct RelationReport {
    bool pass = true;
    std::string witness;  // distinguishing object on failure
};
RelationReport check_relation(const ChainConfig& cfg, const TwistWord& w1, const TwistWord& w2,
                              bool objects_level);

// T_{phi(sigma)} as a conjugated single-curve twist word.
TwistWord conjugate_twist(const ChainConfig& cfg, const TwistWord& phi, const DerivedObject& sigma);

}  // namespace chaincalc
