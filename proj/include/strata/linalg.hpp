// Exact linear algebra over a prime field F_p or the rationals.
//
// Every scalar carries its field; mixing fields in one operation is an error.
// Subspaces of k^n are represented by matrices whose rows form the reduced
// row echelon basis (zero rows dropped, pivots strictly increasing, pivot
// entries 1, pivot columns cleared).  That form is unique, so two subspaces
// are equal iff their representations are byte-equal.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Bad user-supplied data (files, flags, malformed presentations).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A verified internal invariant or a caller-asserted hypothesis failed.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FieldKind { Prime, Rationals };

struct Field {
  FieldKind kind = FieldKind::Prime;
  std::uint32_t modulus = 101;  // prime; ignored for rationals

  static Field fp(std::uint32_t p);
  static Field rationals();
  bool operator==(const Field&) const = default;
  std::string to_string() const;
};

class Scalar {
 public:
  Scalar() = default;  // zero over default field; assign before use
  static Scalar zero(const Field& f);
  static Scalar one(const Field& f);
  static Scalar of_int(const Field& f, long long v);
  static Scalar of_rational(const Field& f, const Rational& q);

  const Field& field() const { return field_; }
  bool is_zero() const;
  bool is_one() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar operator-() const;
  Scalar inverse() const;
  bool operator==(const Scalar& o) const;
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  std::uint64_t fp_value() const { return v_; }
  const Rational& rational_value() const { return q_; }
  std::string to_string() const;

 private:
  Field field_{};
  std::uint64_t v_ = 0;  // canonical representative in [0, p)
  Rational q_{};         // canonical reduced fraction
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(const Field& f, std::size_t rows, std::size_t cols);  // zero matrix
  static Matrix identity(const Field& f, std::size_t n);
  static Matrix from_rows(const Field& f, std::size_t rows, std::size_t cols,
                          std::vector<long long> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Field& field() const { return field_; }
  Scalar& at(std::size_t r, std::size_t c);
  const Scalar& at(std::size_t r, std::size_t c) const;

  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix scale(const Scalar& s) const;
  Matrix transpose() const;
  bool is_zero() const;
  bool operator==(const Matrix& o) const;
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  Matrix hstack(const Matrix& o) const;  // [this | o]
  Matrix vstack(const Matrix& o) const;  // [this ; o]
  Matrix submatrix(std::size_t r0, std::size_t c0, std::size_t nr,
                   std::size_t nc) const;
  Matrix row(std::size_t r) const;
  Matrix col(std::size_t c) const;

  Scalar trace() const;
  std::string to_string() const;
  std::string to_bytes() const;  // canonical serialization (memo keys)

 private:
  Field field_{};
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Scalar> data_;  // row-major
};

// Canonical reduced row echelon form of the row space.
struct Echelon {
  Matrix basis;                     // zero rows dropped
  std::vector<std::size_t> pivots;  // pivot column of each basis row
};

Echelon rref(const Matrix& rows);
std::size_t rank(const Matrix& m);
Matrix row_space(const Matrix& m);  // rref(m).basis

// Rows spanning {x : A x = 0} (x as column; returned as rows), canonical.
Matrix kernel_basis(const Matrix& A);

// X with A X = B, columnwise; nullopt if any column is inconsistent.
std::optional<Matrix> solve(const Matrix& A, const Matrix& B);
std::optional<Matrix> inverse(const Matrix& m);

// Subspace helpers.  All "space" arguments are row bases (not necessarily
// reduced); results are canonical.
bool in_row_space(const Echelon& space, const Matrix& row_vec);
bool subspace_contains(const Matrix& outer_rows, const Matrix& inner_rows);
Matrix sum_rowspaces(const Matrix& a, const Matrix& b);
Matrix intersect_rowspaces(const Matrix& a, const Matrix& b);
// Coordinates c (row) with c * rows = vec, if any.
std::optional<Matrix> coordinates_in_rows(const Matrix& rows,
                                          const Matrix& vec);
// Standard basis vectors at the non-pivot coordinates: a deterministic
// complement of the given echelon space inside k^ambient.
Matrix complement_pivots(const Echelon& e, std::size_t ambient);

// Dense univariate polynomials, used for minimal polynomials of
// endomorphisms and their factorization.
struct Poly {
  Field field{};
  std::vector<Scalar> c;  // c[i] = coefficient of T^i; no trailing zeros

  static Poly zero(const Field& f);
  static Poly from_coeffs(const Field& f, std::vector<Scalar> cs);
  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 if zero
  bool is_zero() const { return c.empty(); }
  Scalar eval(const Scalar& x) const;
  std::string to_string() const;
};

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b);
Poly poly_gcd(const Poly& a, const Poly& b);  // monic
Poly poly_derivative(const Poly& a);
Poly poly_make_monic(const Poly& a);
Poly poly_pow_mod(const Poly& base, const BigInt& exp, const Poly& mod);

// Minimal polynomial of a square matrix (monic).
Poly minimal_polynomial(const Matrix& A);

// Deterministic RNG used by every randomized search; the engine sequence is
// fixed by the standard, so runs with equal seeds are reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  std::uint64_t below(std::uint64_t n) { return n ? eng_() % n : 0; }
  Scalar scalar(const Field& f);          // fp: uniform; rationals: small int
  Scalar nonzero_scalar(const Field& f);

 private:
  std::mt19937_64 eng_;
};

// Factorization into monic irreducible powers.  Exact over F_p; over the
// rationals only rational roots are split off and `complete` may be false.
struct PolyFactors {
  std::vector<std::pair<Poly, int>> factors;  // (monic irreducible, mult)
  bool complete = true;
};
PolyFactors factor_poly(const Poly& p, Rng& rng);

}  // namespace strata
