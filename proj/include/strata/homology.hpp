// First extension and torsion spaces, computed from the canonical minimal
// projective cover so that every basis choice is deterministic.
#pragma once

#include "strata/module.hpp"

namespace strata {

struct ShortExactSequence {
  Morphism inj;   // N -> E
  Morphism surj;  // E -> M
  void check_valid() const;  // mono + epi + im(inj) = ker(surj)
};

// Ext^1(M, N) presented as Hom(Omega M, N) modulo restrictions of
// Hom(P0, N) along the syzygy inclusion.
struct ExtSpace {
  Module m, n;
  Morphism cover;                        // P0 ->> M (canonical)
  Module omega;                          // ker(cover)
  Morphism omega_inc;                    // Omega -> P0
  std::vector<Morphism> cocycles;        // canonical basis of Hom(Omega, N)
  Matrix restriction_rows;               // RREF image of Hom(P0,N) in cocycle coords
  std::vector<std::size_t> class_coords; // non-pivot coordinates: one per Ext class
  std::size_t dim() const { return class_coords.size(); }
  // Representative cocycle of the k-th basis class.
  const Morphism& basis_cocycle(std::size_t k) const { return cocycles[class_coords[k]]; }
};

ExtSpace ext1_space(const Module& m, const Module& n);
std::size_t ext1_dim(const Module& m, const Module& n);

// The extension 0 -> N -> E -> M -> 0 with E = (N + P0) / {(-c(w), w)}.
ShortExactSequence realize_extension(const ExtSpace& es, const Morphism& cocycle);

bool is_split(const ShortExactSequence& s);

// Base change along f: M' -> M (new sequence ends in M').
ShortExactSequence pullback(const ShortExactSequence& s, const Morphism& f);
// Cobase change along g: N -> N' (new sequence starts at N').
ShortExactSequence pushout(const ShortExactSequence& s, const Morphism& g);

// Solves inc * h = g where inc is injective and im(g) lies inside im(inc).
Morphism factor_through_inclusion(const Morphism& inc, const Morphism& g);

// Induced map on a quotient: given the projection pr of x by the collapsed
// submodule w, and s: x -> y vanishing on w, returns sbar with sbar * pr = s.
Morphism descend_through_quotient(const Module& x, const Submodule& w,
                                  const Module& quot, const Morphism& pr,
                                  const Morphism& s);

// X tensor_A Z for a right module X (presented over the opposite algebra)
// and a left module Z, as a quotient of the vector-space tensor product.
struct TensorSpace {
  std::size_t dim = 0;
  Matrix collapsed;  // RREF rows of the balancing subspace in X_tot*Z_tot coords
};
TensorSpace tensor_space(const Module& x_op, const Module& z);

// dim Tor_1^A(X, Y) = dim ker(X (x) Omega Y -> X (x) P0), using that the
// cover P0 is flat.
std::size_t tor1_dim(const Module& x_op, const Module& y);

}  // namespace strata
