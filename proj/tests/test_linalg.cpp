#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "strata/linalg.hpp"

using namespace strata;

namespace {
const Field F101 = Field::fp(101);
const Field QQ = Field::rationals();
}  // namespace

TEST_CASE("prime field scalar arithmetic") {
  Scalar a = Scalar::of_int(F101, 57);
  Scalar b = Scalar::of_int(F101, 90);
  CHECK((a + b).fp_value() == 46);   // 147 mod 101
  CHECK((a * b).fp_value() == 80);   // 5130 mod 101 = 5130 - 50*101 = 80
  CHECK((a - b).fp_value() == 68);   // -33 mod 101
  CHECK((-a).fp_value() == 44);
  CHECK((a * a.inverse()).is_one());
  CHECK(Scalar::of_int(F101, -1).fp_value() == 100);
  CHECK_THROWS_AS((void)Field::fp(100), InputError);
}

TEST_CASE("rational scalar arithmetic is exact") {
  Scalar a = Scalar::of_rational(QQ, Rational(1, 3));
  Scalar b = Scalar::of_rational(QQ, Rational(1, 6));
  CHECK((a + b).rational_value() == Rational(1, 2));
  CHECK((a / b).rational_value() == Rational(2));
  // A famously float-hostile sum: 0.1 + 0.2 == 0.3 exactly here.
  Scalar x = Scalar::of_rational(QQ, Rational(1, 10));
  Scalar y = Scalar::of_rational(QQ, Rational(2, 10));
  CHECK((x + y).rational_value() == Rational(3, 10));
}

TEST_CASE("rational reduction into a prime field") {
  // 1/2 mod 101 = 51 since 2*51 = 102 = 1.
  Scalar s = Scalar::of_rational(F101, Rational(1, 2));
  CHECK(s.fp_value() == 51);
  CHECK_THROWS_AS((void)Scalar::of_rational(F101, Rational(1, 101)), InputError);
}

TEST_CASE("rref canonical form: frozen 3x4 example over F_101") {
  // rows: (2,4,6,8),(1,3,5,7),(3,7,11,15); rank 2.
  // Hand reduction: R1/2=(1,2,3,4); R2-R1=(0,1,2,3); clear: (1,0,-1,-2).
  Matrix m = Matrix::from_rows(F101, 3, 4, {2, 4, 6, 8, 1, 3, 5, 7, 3, 7, 11, 15});
  Echelon e = rref(m);
  CHECK(e.basis.rows() == 2);
  CHECK(e.pivots == std::vector<std::size_t>{0, 1});
  Matrix expect = Matrix::from_rows(F101, 2, 4, {1, 0, -1, -2, 0, 1, 2, 3});
  CHECK(e.basis == expect);
}

TEST_CASE("rref over rationals avoids any rounding") {
  Matrix m(QQ, 2, 2);
  m.at(0, 0) = Scalar::of_rational(QQ, Rational(1, 3));
  m.at(0, 1) = Scalar::of_rational(QQ, Rational(1, 7));
  m.at(1, 0) = Scalar::of_rational(QQ, Rational(2, 3));
  m.at(1, 1) = Scalar::of_rational(QQ, Rational(2, 7));
  Echelon e = rref(m);  // second row is twice the first
  CHECK(e.basis.rows() == 1);
  CHECK(e.basis.at(0, 0).is_one());
  CHECK(e.basis.at(0, 1).rational_value() == Rational(3, 7));
}

TEST_CASE("kernel basis is canonical and annihilates") {
  // A = [[1,2,3],[4,5,6]] over F_101: kernel is spanned by (1,-2,1).
  Matrix A = Matrix::from_rows(F101, 2, 3, {1, 2, 3, 4, 5, 6});
  Matrix K = kernel_basis(A);
  CHECK(K.rows() == 1);
  CHECK((A * K.transpose()).is_zero());
  // Canonical: free column 2 carries coefficient 1.
  CHECK(K.at(0, 2).is_one());
  CHECK(K.at(0, 0).fp_value() == 1);
  CHECK(K.at(0, 1).fp_value() == 99);  // -2
}

TEST_CASE("solve and inverse") {
  Matrix A = Matrix::from_rows(F101, 2, 2, {1, 2, 3, 4});
  Matrix B = Matrix::from_rows(F101, 2, 1, {5, 6});
  auto X = solve(A, B);
  REQUIRE(X.has_value());
  CHECK(A * *X == B);
  auto Ainv = inverse(A);
  REQUIRE(Ainv.has_value());
  CHECK(A * *Ainv == Matrix::identity(F101, 2));
  // Singular matrix with inconsistent rhs.
  Matrix S = Matrix::from_rows(F101, 2, 2, {1, 2, 2, 4});
  Matrix b2 = Matrix::from_rows(F101, 2, 1, {1, 0});
  CHECK(!solve(S, b2).has_value());
  CHECK(!inverse(S).has_value());
  // Singular but consistent: solution exists.
  Matrix b3 = Matrix::from_rows(F101, 2, 1, {1, 2});
  auto X3 = solve(S, b3);
  REQUIRE(X3.has_value());
  CHECK(S * *X3 == b3);
}

TEST_CASE("row space membership, sums, intersections") {
  Matrix a = Matrix::from_rows(F101, 2, 4, {1, 0, 1, 0, 0, 1, 0, 1});
  Matrix b = Matrix::from_rows(F101, 2, 4, {1, 1, 1, 1, 0, 0, 1, 1});
  CHECK(subspace_contains(a, Matrix::from_rows(F101, 1, 4, {3, 5, 3, 5})));
  CHECK(!subspace_contains(a, Matrix::from_rows(F101, 1, 4, {1, 0, 0, 0})));
  Matrix s = sum_rowspaces(a, b);
  CHECK(s.rows() == 3);
  Matrix i = intersect_rowspaces(a, b);
  CHECK(i.rows() == 1);
  // dim(a) + dim(b) = dim(sum) + dim(intersection).
  CHECK(rank(a) + rank(b) == s.rows() + i.rows());
  CHECK(subspace_contains(a, i));
  CHECK(subspace_contains(b, i));
  // Intersection of a space with itself is itself (canonical equality).
  CHECK(intersect_rowspaces(a, a) == row_space(a));
}

TEST_CASE("coordinates_in_rows recovers coefficients") {
  Matrix rows = Matrix::from_rows(F101, 2, 3, {1, 2, 3, 0, 1, 1});
  Matrix v = Matrix::from_rows(F101, 1, 3, {2, 5, 7});  // 2*r0 + 1*r1
  auto c = coordinates_in_rows(rows, v);
  REQUIRE(c.has_value());
  CHECK(*c * rows == v);
  CHECK(c->at(0, 0).fp_value() == 2);
  CHECK(c->at(0, 1).fp_value() == 1);
  CHECK(!coordinates_in_rows(rows, Matrix::from_rows(F101, 1, 3, {0, 0, 1})).has_value());
}

TEST_CASE("complement of pivots spans the quotient") {
  Matrix a = Matrix::from_rows(F101, 1, 3, {1, 5, 0});
  Echelon e = rref(a);
  Matrix c = complement_pivots(e, 3);
  CHECK(c.rows() == 2);
  CHECK(rank(e.basis.vstack(c)) == 3);
}

TEST_CASE("polynomial division, gcd, evaluation") {
  // f = T^3 - 1, g = T - 1 over F_101: f = (T-1)(T^2+T+1).
  Poly f = Poly::from_coeffs(F101, {Scalar::of_int(F101, -1), Scalar::zero(F101),
                                    Scalar::zero(F101), Scalar::one(F101)});
  Poly g = Poly::from_coeffs(F101, {Scalar::of_int(F101, -1), Scalar::one(F101)});
  auto [q, r] = poly_divmod(f, g);
  CHECK(r.is_zero());
  CHECK(q.degree() == 2);
  CHECK(poly_mul(q, g).c == f.c);
  CHECK(poly_gcd(f, g).c == poly_make_monic(g).c);
  CHECK(f.eval(Scalar::one(F101)).is_zero());
  CHECK(f.eval(Scalar::of_int(F101, 2)).fp_value() == 7);
}

TEST_CASE("minimal polynomial: frozen examples") {
  // Nilpotent Jordan block of size 3: min poly T^3.
  Matrix N = Matrix::from_rows(F101, 3, 3, {0, 1, 0, 0, 0, 1, 0, 0, 0});
  Poly mu = minimal_polynomial(N);
  CHECK(mu.degree() == 3);
  CHECK(mu.c[0].is_zero());
  CHECK(mu.c[1].is_zero());
  CHECK(mu.c[2].is_zero());
  CHECK(mu.c[3].is_one());

  // Identity: min poly T - 1 regardless of size.
  Poly mi = minimal_polynomial(Matrix::identity(F101, 4));
  CHECK(mi.degree() == 1);
  CHECK(mi.c[0].fp_value() == 100);

  // diag(1,2) over Q: (T-1)(T-2) = T^2 - 3T + 2.
  Matrix D(QQ, 2, 2);
  D.at(0, 0) = Scalar::of_int(QQ, 1);
  D.at(1, 1) = Scalar::of_int(QQ, 2);
  Poly md = minimal_polynomial(D);
  CHECK(md.degree() == 2);
  CHECK(md.c[0].rational_value() == Rational(2));
  CHECK(md.c[1].rational_value() == Rational(-3));
}

TEST_CASE("minimal polynomial annihilates its matrix (fuzz)") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + rng.below(5);
    Matrix A(F101, n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) A.at(i, j) = rng.scalar(F101);
    Poly mu = minimal_polynomial(A);
    // Evaluate mu(A).
    Matrix acc(F101, n, n);
    Matrix pw = Matrix::identity(F101, n);
    for (std::size_t i = 0; i < mu.c.size(); ++i) {
      acc = acc + pw.scale(mu.c[i]);
      pw = pw * A;
    }
    CHECK(acc.is_zero());
    CHECK(mu.degree() >= 1);
    CHECK(mu.c.back().is_one());
  }
}

TEST_CASE("factorization over F_p: frozen and fuzzed") {
  Rng rng(11);
  // T^2 + 1 over F_101: 10^2 = 100 = -1, so roots +-10; factors (T-10)(T+10).
  Poly f = Poly::from_coeffs(F101, {Scalar::one(F101), Scalar::zero(F101), Scalar::one(F101)});
  PolyFactors pf = factor_poly(f, rng);
  CHECK(pf.complete);
  REQUIRE(pf.factors.size() == 2);
  CHECK(pf.factors[0].first.degree() == 1);
  CHECK(pf.factors[1].first.degree() == 1);
  std::vector<std::uint64_t> roots;
  for (auto& [p, m] : pf.factors) {
    CHECK(m == 1);
    roots.push_back((-p.c[0]).fp_value());
  }
  std::sort(roots.begin(), roots.end());
  CHECK(roots == std::vector<std::uint64_t>{10, 91});

  // T^2 + 2 over F_101 is irreducible (-2 is a non-residue mod 101).
  Poly g = Poly::from_coeffs(F101, {Scalar::of_int(F101, 2), Scalar::zero(F101), Scalar::one(F101)});
  PolyFactors pg = factor_poly(g, rng);
  REQUIRE(pg.factors.size() == 1);
  CHECK(pg.factors[0].first.degree() == 2);
  CHECK(pg.factors[0].second == 1);

  // (T-3)^2 (T^2+2): multiplicity detected.
  Poly lin = Poly::from_coeffs(F101, {Scalar::of_int(F101, -3), Scalar::one(F101)});
  Poly h = poly_mul(poly_mul(lin, lin), g);
  PolyFactors ph = factor_poly(h, rng);
  REQUIRE(ph.factors.size() == 2);
  int total_deg = 0;
  for (auto& [p, m] : ph.factors) total_deg += p.degree() * m;
  CHECK(total_deg == 4);

  // Fuzz: product of factors reproduces the input (monic).
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t deg = 1 + rng.below(6);
    std::vector<Scalar> cs(deg + 1, Scalar::zero(F101));
    for (std::size_t i = 0; i < deg; ++i) cs[i] = rng.scalar(F101);
    cs[deg] = Scalar::one(F101);
    Poly p = Poly::from_coeffs(F101, std::move(cs));
    PolyFactors fac = factor_poly(p, rng);
    CHECK(fac.complete);
    Poly prod = Poly::from_coeffs(F101, {Scalar::one(F101)});
    for (auto& [q, m] : fac.factors)
      for (int i = 0; i < m; ++i) prod = poly_mul(prod, q);
    CHECK(prod.c == p.c);
  }
}

TEST_CASE("factorization over F_2 by trial division") {
  const Field F2 = Field::fp(2);
  Rng rng(3);
  // T^2 + T + 1 is the unique irreducible quadratic over F_2.
  Poly f = Poly::from_coeffs(F2, {Scalar::one(F2), Scalar::one(F2), Scalar::one(F2)});
  PolyFactors pf = factor_poly(f, rng);
  REQUIRE(pf.factors.size() == 1);
  CHECK(pf.factors[0].first.degree() == 2);
  // T^4 + T^2 = T^2 (T+1)^2 over F_2.
  Poly g = Poly::from_coeffs(F2, {Scalar::zero(F2), Scalar::zero(F2), Scalar::one(F2),
                                  Scalar::zero(F2), Scalar::one(F2)});
  PolyFactors pg = factor_poly(g, rng);
  int total = 0;
  for (auto& [p, m] : pg.factors) {
    CHECK(p.degree() == 1);
    total += m;
  }
  CHECK(total == 4);
}

TEST_CASE("factorization over Q splits rational roots") {
  Rng rng(5);
  // (T - 1/2)(T^2 + 1): root 1/2 found, quadratic left (not certified).
  Poly lin = Poly::from_coeffs(QQ, {Scalar::of_rational(QQ, Rational(-1, 2)), Scalar::one(QQ)});
  Poly quad = Poly::from_coeffs(QQ, {Scalar::one(QQ), Scalar::zero(QQ), Scalar::one(QQ)});
  PolyFactors pf = factor_poly(poly_mul(lin, quad), rng);
  bool found_root = false;
  for (auto& [p, m] : pf.factors)
    if (p.degree() == 1 && p.eval(Scalar::of_rational(QQ, Rational(1, 2))).is_zero())
      found_root = true;
  CHECK(found_root);
}

TEST_CASE("rng determinism across instances") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  Rng c(42);
  std::vector<std::uint64_t> seq;
  for (int i = 0; i < 5; ++i) seq.push_back(c.below(1000));
  Rng d(42);
  for (int i = 0; i < 5; ++i) CHECK(d.below(1000) == seq[static_cast<std::size_t>(i)]);
}

TEST_CASE("matrix serialization differs for different matrices") {
  Matrix a = Matrix::from_rows(F101, 1, 2, {1, 2});
  Matrix b = Matrix::from_rows(F101, 1, 2, {1, 3});
  Matrix c = Matrix::from_rows(F101, 2, 1, {1, 2});
  CHECK(a.to_bytes() != b.to_bytes());
  CHECK(a.to_bytes() != c.to_bytes());
  CHECK(a.to_bytes() == Matrix::from_rows(F101, 1, 2, {1, 2}).to_bytes());
}
