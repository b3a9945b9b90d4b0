#pragma once

#include "chaincalc/object.hpp"
#include "chaincalc/word.hpp"

namespace chaincalc {

// Twist of a Sigma(Z) sheaf by the closed-form table (the known formulas for
// single-curve twists). Returns nothing when the configuration is not tabulated.
std::optional<DerivedObject> twist_table(const ChainConfig& cfg, const SubchainLineBundle& sigma,
                                         bool inverse, const SubchainLineBundle& r);

// Generic route: evaluation kernels/cokernels plus the filtration spectral
// sequence, with the gluing resolved by rigidity. Also the certification oracle
// for the table.
DerivedObject cone_twist_sheaf(const ChainConfig& cfg, const SubchainLineBundle& sigma,
                               bool inverse, const SubchainLineBundle& r);

// Full twist of an object (profile + e classes). `via_table` picks the closed
// formulas when applicable, else the generic route.
DerivedObject cone_twist(const ChainConfig& cfg, const SubchainLineBundle& sigma, bool inverse,
                         const DerivedObject& d, bool via_table = true);

DerivedObject apply_letter(const ChainConfig& cfg, const WordLetter& l, const DerivedObject& d,
                           bool via_table = true);
DerivedObject apply_word(const ChainConfig& cfg, const TwistWord& w, const DerivedObject& d,
                         bool via_table = true);

// Induced map on the twists of source and target of a morphism between
// single-degree sheaf objects (functoriality carrier for the supported class).
struct TwistedMorphism {
    DerivedObject src, dst;
    int degree = 0;           // cohomological placement of the carried map
    SheafMorphism map;        // between the realized cohomology sheaves at `degree`
};
TwistedMorphism twist_on_morphism(const ChainConfig& cfg, const SubchainLineBundle& sigma,
                                  const SheafMorphism& f);

// Run cross-checks on every twist (k-class reflection, the l inequality,
// sphericality transport). On by default; fuzz harnesses may disable for speed.
void set_twist_checks(bool on);
bool twist_checks();

}  // namespace chaincalc
