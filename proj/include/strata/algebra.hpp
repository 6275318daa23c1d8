// Finite-dimensional basic algebras presented by a basis and structure
// constants, typically arising as bound quiver algebras kQ/I.
//
// Composition is fixed right-to-left throughout: the product b_i * b_j means
// "b_j applied first".  Path words are stored in application order (first
// factor applied first) and printed right-to-left joined by '*', so the word
// [a, b] prints as "b*a".
#pragma once

#include "strata/linalg.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace strata {

struct Arrow {
  std::string label;
  std::size_t src = 0, tgt = 0;  // 0-based vertex ids
};

struct Quiver {
  std::size_t num_vertices = 0;
  std::vector<Arrow> arrows;
};

// One term of a relation: coeff * (path given as arrow ids in application
// order).  A relation is the statement "sum of terms = 0".
struct RelationTerm {
  Scalar coeff;
  std::vector<std::size_t> word;
};
using Relation = std::vector<RelationTerm>;

struct BasisElement {
  std::string label;
  std::size_t src = 0, tgt = 0;       // e_tgt * b * e_src = b
  std::vector<std::size_t> word;      // generator indices, application order;
                                      // empty exactly for the idempotents
};

// Sparse vector over the algebra basis: sorted by index, no zero entries.
using SparseVec = std::vector<std::pair<std::size_t, Scalar>>;

SparseVec sparse_normalize(SparseVec v);
SparseVec sparse_add(const SparseVec& a, const SparseVec& b);
SparseVec sparse_scale(const SparseVec& a, const Scalar& s);

class Algebra {
 public:
  Field field;
  std::size_t num_idempotents = 0;
  std::vector<BasisElement> basis;        // [0, num_idempotents) are the e_i
  std::vector<std::size_t> generators;    // basis indices; with the
                                          // idempotents they generate A, and
                                          // they generate rad A as an ideal
  std::vector<std::vector<SparseVec>> mult;  // mult[i][j] = b_i * b_j
  std::optional<Quiver> quiver;           // present for bound quiver algebras
  std::string name;

  std::size_t dim() const { return basis.size(); }
  const SparseVec& product(std::size_t i, std::size_t j) const;
  SparseVec multiply(const SparseVec& a, const SparseVec& b) const;
  // Product of generators applied in application order; word must be nonempty.
  SparseVec word_product(const std::vector<std::size_t>& word) const;
  // dim x dim matrix of x -> b_i * x in basis coordinates (columns = images).
  Matrix left_mult_matrix(std::size_t i) const;
  Matrix right_mult_matrix(std::size_t i) const;
  Matrix dense_row(const SparseVec& v) const;  // 1 x dim
  SparseVec sparse_from_dense(const Matrix& row) const;

  // Verifies the presentation invariants: orthogonal idempotents summing to
  // the identity, grading of all products, associativity, nilpotency of the
  // span of non-idempotent basis elements (hence that span is rad A), and
  // that each basis element is reproduced by its generator word.
  void check_valid() const;
};

using AlgebraPtr = std::shared_ptr<const Algebra>;

// Quotient of the path algebra kQ by the two-sided ideal generated by the
// relations, computed by saturating the ideal in degreewise truncations.
// Stops at the first degree N <= degree_bound where no live degree-N paths
// remain or all lie in the ideal.  Exact whenever the ideal is admissible;
// in particular exact for length-homogeneous relations.  Relations mixing
// path lengths are accepted only with every term of length >= 2, and for
// such ideals admissibility itself is assumed, not verified.
Algebra build_bound_quiver_algebra(const Field& field, const Quiver& quiver,
                                   const std::vector<Relation>& relations,
                                   std::size_t degree_bound = 30,
                                   std::string name = "");

// Generic presentation from explicit data; runs check_valid.
Algebra make_algebra(const Field& field, std::size_t num_idempotents,
                     std::vector<BasisElement> basis,
                     std::vector<std::vector<SparseVec>> mult,
                     std::vector<std::size_t> generators, std::string name);

// Same basis, reversed multiplication (and reversed quiver/words if present).
Algebra opposite_algebra(const Algebra& a);

}  // namespace strata
