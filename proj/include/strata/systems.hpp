// Axiomatic verification of the three stratifying-system notions over a
// fixed family of modules and linear order, plus the inductive construction
// of a companion family Q from a family satisfying the pre-system axioms:
//
//   pre-system (ppcs):  (a) End(Psi(i)) is a division ring,
//                       (b) Hom(Psi(i), Psi(j)) = 0 for i < j,
//                       (c) Ext^1(Psi(i), Psi(j)) = 0 for i < j.
//   full system (pcs):  Q(i) indecomposable, (a), (b), and
//                       (c) an epi Q(i) ->> Psi(i) whose kernel is filtered
//                           by {Psi(j) : j <= i},
//                       (d) Ext^1(Q(i), Psi(j)) = 0 for all i, j.
//   Ext-injective stratifying system (ess): Y(i) indecomposable,
//                       (a) Hom(Theta(i), Theta(j)) = 0 for i > j,
//                       (b) a mono Theta(i) -> Y(i) whose cokernel is
//                           filtered by {Theta(j) : j < i},
//                       (c) Ext^1(Theta(i), Y(j)) = 0 for all i, j.
#pragma once

#include "strata/filtration.hpp"

namespace strata {

// Outcome of one axiom check.  Failures carry a concrete witness: the
// offending pair, a dimension count, or the exhausted search description.
struct AxiomResult {
  std::string axiom;  // stable identifier, e.g. "endo-division", "hom-vanishing"
  Verdict verdict = Verdict::Undecided;
  std::string detail;
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // offending / served (i, j)
  std::optional<ShortExactSequence> sequence;               // attached presentation
  std::optional<FiltrationCertificate> certificate;  // filtration of kernel/cokernel
  std::vector<std::size_t> certificate_family;  // global indices the certificate is against
};

struct SystemVerdict {
  std::string kind;  // "ppcs" | "pcs" | "ess"
  bool passed = false;
  Verdict verdict = Verdict::Undecided;  // Yes iff every axiom is Yes
  std::vector<AxiomResult> axioms;
  const AxiomResult* find(const std::string& axiom) const;
  std::string summary() const;  // one line per axiom
};

// Exact decision procedure for "End(m) is a division ring".  Looks for an
// element whose minimal polynomial either factors (yielding explicit zero
// divisors) or is irreducible of degree dim End(m) (yielding a primitive
// element).  Complete over prime fields; over the rationals high-degree
// irreducibility may stay undecided, reported in the note.
struct DivisionRingReport {
  Verdict verdict = Verdict::Undecided;
  std::size_t end_dim = 0;
  std::string note;
};
DivisionRingReport end_is_division_ring(const Module& m, const SearchLimits& limits);

SystemVerdict verify_ppcs(const std::vector<Module>& psi, const LinearOrder& ord,
                          const SearchLimits& limits);
SystemVerdict verify_pcs(const std::vector<Module>& psi, const std::vector<Module>& q,
                         const LinearOrder& ord, const SearchLimits& limits);
SystemVerdict verify_ess(const std::vector<Module>& theta, const std::vector<Module>& y,
                         const LinearOrder& ord, const SearchLimits& limits);

// One extension step of the construction below: a verified non-split
// sequence 0 -> psi[base_index] -> middle -> previous -> 0 whose middle is
// checked indecomposable and carries an ordered filtration certificate.
struct ConstructionStep {
  std::size_t base_index = 0;
  ShortExactSequence sequence;
  Module middle;
  Verdict indecomposable = Verdict::Undecided;
  FiltrationCertificate middle_certificate;
};

// Everything recorded while serving one family index.
struct IndexTrace {
  std::size_t index = 0;
  std::vector<ConstructionStep> steps;
  Module q;                                          // final module for the index
  std::optional<ShortExactSequence> presentation;    // 0 -> Z -> Q(i) -> Psi(i) -> 0
  std::optional<FiltrationCertificate> kernel_certificate;
  std::vector<std::size_t> kernel_family;  // global indices for the kernel certificate
};

struct ConstructionResult {
  bool constructed = false;
  Verdict verdict = Verdict::Undecided;  // No = hypothesis violated, Undecided = capped
  std::vector<Module> q;
  std::vector<IndexTrace> traces;
  std::optional<SystemVerdict> closure;  // full re-verification of (psi, q)
  std::string note;
  std::optional<std::size_t> divergent_index;
  std::vector<std::vector<std::size_t>> divergence_dims;  // growing chain, oldest first
};

// Builds Q by successive extensions: for each index, while the obstruction
// group Ext^1(X, psi[m]) against the current order-minimal member m is
// nonzero, the first canonical basis class is realized and the middle
// replaces X.  Chains longer than limits.cap abort with a divergence report.
ConstructionResult construct_q(const std::vector<Module>& psi, const LinearOrder& ord,
                               const SearchLimits& limits);

// Whether every nonzero homomorphism k -> x is injective.  The direct route
// enumerates the hom space (exhaustive when the scalar-ray count fits the
// budget); the transport route grants the property from an ordered
// filtration of x whose factors all sit at or above k's position, given the
// directed hom-vanishing of the family.  `provenance` records which route
// answered.
struct MonoOrZeroResult {
  Verdict verdict = Verdict::Undecided;
  std::string provenance;  // "vacuous" | "enumeration" | "sampling" | "transport"
  std::optional<Morphism> counterexample;
};
MonoOrZeroResult mono_or_zero_class(const Module& k, const Module& x,
                                    const SearchLimits& limits);
MonoOrZeroResult mono_or_zero_by_transport(std::size_t lambda,
                                           const std::vector<Module>& family,
                                           const LinearOrder& ord,
                                           const FiltrationCertificate& cert);

}  // namespace strata
