// Finite-dimensional left modules over a presented algebra, given by one
// vector space per idempotent and one matrix per algebra generator.  All
// maps act on column vectors; composition is right-to-left.
#pragma once

#include "strata/algebra.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace strata {

struct SearchLimits {
  std::uint64_t budget = 1'000'000;  // randomized/candidate iterations per search
  std::size_t cap = 50;              // construction length cap (chains, towers)
  std::uint64_t seed = 1;            // RNG seed; equal seeds reproduce runs
};

enum class Verdict { Yes, No, Undecided };
std::string verdict_string(Verdict v);

class Module {
 public:
  AlgebraPtr alg;
  std::vector<std::size_t> dims;  // one per idempotent
  std::vector<Matrix> action;     // per generator g: dims[tgt g] x dims[src g]

  std::size_t total_dim() const;
  std::size_t offset(std::size_t vertex) const;  // block start in total coords
  const Field& field() const { return alg->field; }
  bool is_zero() const { return total_dim() == 0; }

  Matrix act_generator(std::size_t g) const { return action[g]; }
  // Action of a basis element as a block matrix dims[tgt b] x dims[src b].
  Matrix act_basis(std::size_t b) const;
  // Action embedded in total coordinates (total x total).
  Matrix act_basis_total(std::size_t b) const;
  Matrix act_total(const SparseVec& v) const;

  void check_valid() const;  // shapes + multiplicativity on all basis pairs
  std::string to_bytes() const;  // canonical serialization (memo keys)
};

// True when both modules are over the same (or identically presented)
// algebra and have identical dimension vectors and action matrices.
bool same_module(const Module& a, const Module& b);
bool algebras_compatible(const AlgebraPtr& a, const AlgebraPtr& b);

class Morphism {
 public:
  Module src, tgt;
  std::vector<Matrix> mats;  // per vertex: tgt.dims[v] x src.dims[v]

  Matrix total() const;
  bool is_zero() const;
  void check_valid() const;  // shape + intertwines every generator
};

Morphism zero_morphism(const Module& src, const Module& tgt);
Morphism identity_morphism(const Module& m);
Morphism compose(const Morphism& f, const Morphism& g);  // f after g
Morphism morphism_add(const Morphism& a, const Morphism& b);
Morphism morphism_scale(const Morphism& a, const Scalar& s);
bool is_injective_morphism(const Morphism& f);
bool is_surjective_morphism(const Morphism& f);
bool is_isomorphism_morphism(const Morphism& f);
std::optional<Morphism> inverse_morphism(const Morphism& f);
// Evaluates a polynomial at an endomorphism.
Morphism poly_of_endo(const Poly& p, const Morphism& f);

// Canonical basis of Hom(M, N): kernel of the intertwining system in a fixed
// unknown order, so equal inputs give byte-identical bases.
std::vector<Morphism> hom_space(const Module& m, const Module& n);

// Morphism entries flattened vertex-major then row-major into a single row;
// this is the coordinate order of hom_space bases.
Matrix morphism_entries_row(const Morphism& f);
// One row per morphism (all must share source and target shapes).
Matrix stack_morphism_entries(const Field& f, const std::vector<Morphism>& fs);

// Graded subspace of a module, stable under the action; rows[v] holds the
// reduced row echelon basis of the piece at vertex v.
struct Submodule {
  std::vector<Matrix> rows;
  std::size_t total_rank() const;
  std::vector<std::size_t> ranks() const;
};

Submodule zero_submodule(const Module& m);
Submodule full_submodule(const Module& m);
// Smallest submodule containing the given total-coordinate row vectors.
Submodule submodule_closure(const Module& m, const Matrix& seed_rows_total);
Submodule submodule_sum(const Module& m, const Submodule& a, const Submodule& b);
Submodule submodule_intersect(const Module& m, const Submodule& a, const Submodule& b);
bool submodule_contains_sub(const Submodule& outer, const Submodule& inner);
// Canonical total-coordinate row basis (blocks stacked in vertex order).
Matrix submodule_total_rows(const Module& m, const Submodule& s);

Submodule kernel_submodule(const Morphism& f);   // inside f.src
Submodule image_submodule(const Morphism& f);    // inside f.tgt

// The submodule as a module of its own, with the inclusion morphism.
std::pair<Module, Morphism> submodule_to_module(const Module& m, const Submodule& s);
// The quotient, with the projection morphism.
std::pair<Module, Morphism> quotient_by_submodule(const Module& m, const Submodule& s);

Module kernel_module(const Morphism& f, Morphism* inclusion = nullptr);
Module image_module(const Morphism& f, Morphism* inclusion = nullptr);
Module cokernel_module(const Morphism& f, Morphism* projection = nullptr);

Module direct_sum(const std::vector<Module>& parts,
                  std::vector<Morphism>* injections = nullptr,
                  std::vector<Morphism>* projections = nullptr);

// Sum of the images of all morphisms X -> M.
Submodule trace_submodule(const Module& x, const Module& m);
Submodule trace_submodule_many(const std::vector<Module>& xs, const Module& m);

Submodule radical_submodule(const Module& m);
Submodule socle_submodule(const Module& m);
std::pair<Module, Morphism> top_module(const Module& m);  // M/rad M with projection

Module projective_module(const AlgebraPtr& alg, std::size_t i);  // A e_i
Module simple_module(const AlgebraPtr& alg, std::size_t i);
Module injective_module(const AlgebraPtr& alg, std::size_t i);   // D(e_i A)
Module regular_module(const AlgebraPtr& alg);                    // sum of all A e_i

// Contravariant duality: a module over A becomes one over the given
// presentation of the opposite algebra, with transposed action.
Module dual_module(const Module& m, const AlgebraPtr& opposite);
// D(f): D(tgt f) -> D(src f).
Morphism dual_morphism(const Morphism& f, const AlgebraPtr& opposite);

// Projective cover P(top M) ->> M (canonical lift of the top).
Morphism projective_cover(const Module& m);
Module syzygy(const Module& m);  // kernel of the projective cover

// Builds a graded module from matrices acting on an ungraded space: the
// space is split by the idempotent projectors and the action restricted.
// vertex_rows receives, per vertex, the chosen row basis of e_i V.
Module module_from_global_action(const AlgebraPtr& alg, std::size_t ambient_dim,
                                 const std::function<Matrix(std::size_t)>& act_of_basis,
                                 std::vector<Matrix>* vertex_rows = nullptr);

// Random quotient of a random sum of projectives (every module arises so).
Module random_module(const AlgebraPtr& alg, Rng& rng, std::size_t max_summands = 3);

// --- Endomorphism analysis -------------------------------------------------

// Radical of End(M) as row space over the hom-basis coordinates, certified
// via the trace bilinear form.  Requires characteristic 0 or p > dim M;
// returns nullopt otherwise.
std::optional<Matrix> end_radical_rows(const Module& m,
                                       const std::vector<Morphism>& end_basis);

enum class SplitOutcome {
  SplitFound,              // part1/part2 decompose M
  Indecomposable,          // certified
  DecomposableNoWitness,   // certified decomposable, no split found in budget
  Exhausted                // search budget spent without a certificate
};

struct SplitResult {
  SplitOutcome outcome;
  Submodule part1, part2;
  std::string note;
};

SplitResult find_split(const Module& m, const SearchLimits& limits);

Verdict is_indecomposable(const Module& m, const SearchLimits& limits,
                          std::string* note = nullptr);

struct Decomposition {
  Verdict verdict;
  std::vector<Module> summands;
  std::vector<Morphism> injections;   // summand -> M
  std::vector<Morphism> projections;  // M -> summand, with proj*inj = id
  std::string note;
};

Decomposition decompose(const Module& m, const SearchLimits& limits);

// Exact when both decompositions certify; otherwise may be Undecided.
Verdict is_isomorphic(const Module& a, const Module& b, const SearchLimits& limits,
                      Morphism* iso = nullptr);

}  // namespace strata
