#pragma once

#include <map>
#include <optional>

#include "chaincalc/ext.hpp"

namespace chaincalc {

// Block matrix of connecting classes between two consecutive cohomology degrees:
// block (i, j) holds the coordinates of a class in Ext^2(R_j^p, R_i^{p-1}) against
// the dual of the cached hom basis of Hom(R_i^{p-1}, R_j^p).
using EBlocks = std::vector<std::vector<std::vector<Rat>>>;

// Object of the derived category: graded Sigma(Z) profile plus e-class data.
struct DerivedObject {
    int n = 1;
    std::map<int, std::vector<SubchainLineBundle>> profile;
    std::map<int, EBlocks> e;  // e[p]: blocks from degree p to p-1
    bool e_known = true;       // false when only the profile is tracked

    bool empty() const { return profile.empty(); }
    int min_degree() const;
    int max_degree() const;
    std::string str() const;
};

// Canonicalize (sort summands per degree, permute e-blocks, drop empty degrees).
DerivedObject make_object(const ChainConfig& cfg,
                          std::map<int, std::vector<SubchainLineBundle>> profile,
                          std::map<int, EBlocks> e, bool e_known = true);

DerivedObject sheaf_object(const ChainConfig& cfg, const SubchainLineBundle& r, int degree = 0);

// Shape validation; with `spherical_candidate` also the rigidity constraints
// (mutual Ext^1 vanishing and the degree-gap bound on shared curves).
void validate_object(const ChainConfig& cfg, const DerivedObject& d, bool spherical_candidate);

long long l_value(const DerivedObject& d);
std::vector<long long> l_profile(const ChainConfig& cfg, const DerivedObject& d);  // per curve
KClass k_class_of(const ChainConfig& cfg, const DerivedObject& d);
std::vector<long long> c1_of(const ChainConfig& cfg, const DerivedObject& d);

DerivedObject shift_object(const DerivedObject& d, int k);
DerivedObject direct_sum_object(const ChainConfig& cfg, const DerivedObject& a, const DerivedObject& b);
DerivedObject tensor_pic_object(const ChainConfig& cfg, const DerivedObject& d, const PicElement& L);
DerivedObject flip_object(const ChainConfig& cfg, const DerivedObject& d);

struct SphericalVerdict {
    bool spherical = false;
    std::string reason;  // failed condition on rejection
};
SphericalVerdict is_spherical(const ChainConfig& cfg, const DerivedObject& d);

// Hom^k(A, B) dimensions via the E3 page of the hom spectral sequence.
std::map<int, size_t> hom_dims(const ChainConfig& cfg, const DerivedObject& a, const DerivedObject& b);

// Split along a two-block partition of every degree's summands (true = block 1).
struct SplitResult {
    bool split = false;
    DerivedObject first, second;
    int obstruction_degree = 0;
    size_t obstruction_row = 0, obstruction_col = 0;  // block indices when !split
};
SplitResult try_split(const ChainConfig& cfg, const DerivedObject& d,
                      const std::map<int, std::vector<int>>& partition);

bool objects_isomorphic(const ChainConfig& cfg, const DerivedObject& a, const DerivedObject& b);

// Resolve the canonical extension 0 -> subs -> E -> quots -> 0 with the maximal
// nonsplit gluing forced by rigidity: glue rules derived from the restriction
// sequences compute the middles, and an independent enumeration of rigid
// candidates (rank vector, chi and the width-one degree band are the invariants)
// cross-checks the result. Throws on ambiguity.
std::vector<SubchainLineBundle> glue_extension(
    const ChainConfig& cfg, const std::vector<SubchainLineBundle>& subs,
    const std::vector<SubchainLineBundle>& quots,
    const std::vector<std::vector<SubchainLineBundle>>& context);

// All internally rigid candidate multisets with the extension invariants.
std::vector<std::vector<SubchainLineBundle>> rigid_profile_candidates(
    const ChainConfig& cfg, const std::vector<SubchainLineBundle>& pieces);

// Search for spherical e-class data on a profile; empty optional when none found.
std::optional<std::map<int, EBlocks>> solve_spherical_e(
    const ChainConfig& cfg, const std::map<int, std::vector<SubchainLineBundle>>& profile);

}  // namespace chaincalc
