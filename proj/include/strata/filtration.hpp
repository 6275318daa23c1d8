// Certified filtrations: decide whether a module is filtered by a family,
// rearrange filtrations into ordered ones, read off the bottom index, and
// peel the bottom layer.  Every emitted certificate is re-verified.
#pragma once

#include "strata/homology.hpp"

#include <optional>

namespace strata {

// Raised when a computation that is guaranteed to succeed under the standing
// hypotheses of the ambient construction fails on the given input.
struct HypothesisViolation : std::runtime_error {
  explicit HypothesisViolation(const std::string& what) : std::runtime_error(what) {}
};

// Linear order on family indices [0, t): order[k] is the k-th smallest index.
struct LinearOrder {
  std::vector<std::size_t> order;
  std::vector<std::size_t> rank;  // rank[i] = position of index i

  static LinearOrder natural(std::size_t t);
  static LinearOrder of_positions(std::vector<std::size_t> order);
  bool less(std::size_t i, std::size_t j) const { return rank[i] < rank[j]; }
  bool less_equal(std::size_t i, std::size_t j) const { return rank[i] <= rank[j]; }
  std::size_t size() const { return order.size(); }
};

struct FactorWitness {
  std::size_t family_index = 0;
  Morphism iso;  // family[family_index] -> canonical factor module of the step
};

struct FiltrationCertificate {
  Module x;
  std::vector<Submodule> chain;        // chain.front() = 0, chain.back() = x
  std::vector<FactorWitness> factors;  // factors[k] describes chain[k+1]/chain[k]
  bool ordered = false;                // factor positions non-decreasing
  std::size_t length() const { return factors.size(); }
};

// Canonical presentation of a chain-step factor; all witnesses target this.
struct FactorPresentation {
  Module factor;     // upper/lower
  Module quotient;   // x/lower
  Morphism project;  // x -> quotient
  Morphism include;  // factor -> quotient
};
FactorPresentation filtration_factor(const Module& x, const Submodule& lower,
                                     const Submodule& upper);

// Image and preimage of graded subspaces along a morphism (both are
// automatically action-stable).
Submodule push_submodule(const Morphism& f, const Submodule& s);
Submodule preimage_submodule(const Morphism& f, const Submodule& u);

// Full independent re-check: nesting, action stability, factor isomorphisms,
// and (when the flag is set) ordering.  Throws InvariantError on failure;
// pass the order whenever the certificate claims to be ordered.
void verify_certificate(const FiltrationCertificate& c, const std::vector<Module>& family,
                        const LinearOrder* ord = nullptr);

enum class MembershipStatus { Filtered, NotFiltered, Undecided };
std::string membership_status_string(MembershipStatus s);

struct MembershipResult {
  MembershipStatus status = MembershipStatus::Undecided;
  std::optional<FiltrationCertificate> certificate;
  std::string note;
};

// Bottom-up depth-first search: at each stage enumerate monomorphisms from a
// family member (smallest order position first) into the current quotient and
// recurse.  Enumeration over a prime field runs over hom coefficient rays,
// (p^h - 1)/(p - 1) candidates, while they fit the remaining budget; beyond
// that (and over the rationals with h > 1) it falls back to seeded sampling
// and a failed search reports Undecided instead of NotFiltered.
MembershipResult filtration_membership(const Module& x, const std::vector<Module>& family,
                                       const LinearOrder& ord, const SearchLimits& limits);

// Rearranges the factors into non-decreasing order positions by repeatedly
// splitting the two-step extension at each inversion.  The split is computed,
// never assumed; a non-split inversion raises HypothesisViolation naming the
// offending pair of family indices.
FiltrationCertificate reorder_filtration(const FiltrationCertificate& c,
                                         const std::vector<Module>& family,
                                         const LinearOrder& ord);

// Membership followed by reordering; throws InputError when membership fails.
FiltrationCertificate ordered_certificate(const Module& x, const std::vector<Module>& family,
                                          const LinearOrder& ord, const SearchLimits& limits);

// Bottom index of an ordered filtration (independent of the filtration).
std::size_t min_index(const Module& x, const std::vector<Module>& family,
                      const LinearOrder& ord, const SearchLimits& limits);

struct PeelResult {
  std::size_t bottom_index = 0;  // family index of the peeled bottom factor
  ShortExactSequence sequence;   // 0 -> family[bottom] -> X -> X' -> 0
  FiltrationCertificate rest;    // ordered certificate of X', one step shorter
};
PeelResult peel_bottom(const Module& x, const std::vector<Module>& family,
                       const LinearOrder& ord, const SearchLimits& limits);

// Splices certificates of the outer terms of a short exact sequence into a
// certificate of the middle term (sub's factors below quot's factors).
FiltrationCertificate splice_certificates(const ShortExactSequence& s,
                                          const FiltrationCertificate& sub,
                                          const FiltrationCertificate& quot,
                                          const std::vector<Module>& family);

struct KernelChainResult {
  MembershipStatus status = MembershipStatus::Undecided;
  Module kernel;
  Morphism inclusion;  // kernel -> domain of the composite
  std::optional<FiltrationCertificate> certificate;
  std::string note;
};

// Certifies the kernel of epis[0] * epis[1] * ... * epis[n-1] (epis[j] maps
// X_{j+1} onto X_j) by splicing certificates of the individual kernels.
KernelChainResult kernel_chain_certificate(const std::vector<Morphism>& epis,
                                           const std::vector<Module>& family,
                                           const LinearOrder& ord,
                                           const SearchLimits& limits);

}  // namespace strata
