#pragma once

#include "chaincalc/sheaf.hpp"

namespace chaincalc {

// Hom/Ext dimensions between Sigma(Z) sheaves over the ambient surface.
// ext2(R,S) is modeled as hom(S,R)^ (Serre duality with trivial dualizing data
// along the chain); ext1 comes from the Euler identity chi = hom - ext1 + ext2.
struct ExtProfile {
    size_t hom = 0, ext1 = 0, ext2 = 0;
    long long chi = 0;
};

ExtProfile ext_profile(const ChainConfig& cfg, const SubchainLineBundle& r,
                       const SubchainLineBundle& s);

// Cached hom bases between embeds of Sigma(Z) sheaves (process-wide, synchronized).
const std::vector<SheafMorphism>& hom_basis_cached(const ChainConfig& cfg,
                                                   const SubchainLineBundle& r,
                                                   const SubchainLineBundle& s);

// Ext^2(R,S) = Hom(S,R)^: classes are coordinate vectors against the dual of the
// cached hom basis of Hom(S,R).
size_t ext2_dim(const ChainConfig& cfg, const SubchainLineBundle& r, const SubchainLineBundle& s);

// Yoneda composition through duality.
//   left:  f in Hom(R,S) (coordinates), eps in Ext^2(S,T)  ->  eps . f in Ext^2(R,T)
//   right: g in Hom(T,T') (coordinates), eps in Ext^2(S,T) ->  g . eps in Ext^2(S,T')
std::vector<Rat> yoneda_left(const ChainConfig& cfg, const SubchainLineBundle& r,
                             const SubchainLineBundle& s, const SubchainLineBundle& t,
                             const std::vector<Rat>& f_coords, const std::vector<Rat>& eps);
std::vector<Rat> yoneda_right(const ChainConfig& cfg, const SubchainLineBundle& s,
                              const SubchainLineBundle& t, const SubchainLineBundle& t2,
                              const std::vector<Rat>& g_coords, const std::vector<Rat>& eps);

// Composition tensor in the cached hom bases: entry [mu][j] is the coordinate
// vector of f_mu o h_j in Hom(X,Z), for f_mu in Hom(Y,Z) and h_j in Hom(X,Y).
using CompTensor = std::vector<std::vector<std::vector<Rat>>>;
const CompTensor& comp_tensor(const ChainConfig& cfg, const SubchainLineBundle& x,
                              const SubchainLineBundle& y, const SubchainLineBundle& z);

// Independent count of ext1 from the local-to-global data:
// h^1 of the sheaf Hom plus h^0 of the local Ext^1 sheaf of the Koszul resolution.
size_t ext1_independent(const ChainConfig& cfg, const SubchainLineBundle& r,
                        const SubchainLineBundle& s);

// Optional global sign flip of the d2 convention (experiments only).
void set_d2_sign(int sign);
int d2_sign();

void clear_ext_cache();

}  // namespace chaincalc
