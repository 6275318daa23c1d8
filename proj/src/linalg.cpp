#include "strata/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace strata {

namespace {

[[noreturn]] void die(const std::string& msg) { throw InvariantError(msg); }

void require_same_field(const Field& a, const Field& b, const char* what) {
  if (!(a == b)) die(std::string("field mismatch in ") + what);
}

std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  b %= p;
  while (e) {
    if (e & 1) r = (r * b) % p;
    b = (b * b) % p;
    e >>= 1;
  }
  return r;
}

bool is_prime_u32(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

Field Field::fp(std::uint32_t p) {
  if (!is_prime_u32(p)) throw InputError("field modulus must be prime, got " + std::to_string(p));
  return Field{FieldKind::Prime, p};
}

Field Field::rationals() { return Field{FieldKind::Rationals, 0}; }

std::string Field::to_string() const {
  return kind == FieldKind::Prime ? "F_" + std::to_string(modulus) : "Q";
}

Scalar Scalar::zero(const Field& f) {
  Scalar s;
  s.field_ = f;
  return s;
}

Scalar Scalar::one(const Field& f) { return of_int(f, 1); }

Scalar Scalar::of_int(const Field& f, long long v) {
  Scalar s;
  s.field_ = f;
  if (f.kind == FieldKind::Prime) {
    long long m = v % static_cast<long long>(f.modulus);
    if (m < 0) m += f.modulus;
    s.v_ = static_cast<std::uint64_t>(m);
  } else {
    s.q_ = Rational(v);
  }
  return s;
}

Scalar Scalar::of_rational(const Field& f, const Rational& q) {
  if (f.kind == FieldKind::Prime) {
    // Reduce numerator/denominator mod p; denominator must be invertible.
    BigInt num = boost::multiprecision::numerator(q);
    BigInt den = boost::multiprecision::denominator(q);
    BigInt p(f.modulus);
    BigInt n = num % p;
    if (n < 0) n += p;
    BigInt d = den % p;
    if (d < 0) d += p;
    if (d == 0) throw InputError("rational with denominator divisible by field characteristic");
    Scalar sn = of_int(f, static_cast<long long>(n));
    Scalar sd = of_int(f, static_cast<long long>(d));
    return sn / sd;
  }
  Scalar s;
  s.field_ = f;
  s.q_ = q;
  return s;
}

bool Scalar::is_zero() const {
  return field_.kind == FieldKind::Prime ? v_ == 0 : q_.is_zero();
}

bool Scalar::is_one() const {
  return field_.kind == FieldKind::Prime ? v_ == 1 : q_ == 1;
}

Scalar Scalar::operator+(const Scalar& o) const {
  require_same_field(field_, o.field_, "scalar +");
  Scalar r;
  r.field_ = field_;
  if (field_.kind == FieldKind::Prime)
    r.v_ = (v_ + o.v_) % field_.modulus;
  else
    r.q_ = q_ + o.q_;
  return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
  require_same_field(field_, o.field_, "scalar -");
  Scalar r;
  r.field_ = field_;
  if (field_.kind == FieldKind::Prime)
    r.v_ = (v_ + field_.modulus - o.v_) % field_.modulus;
  else
    r.q_ = q_ - o.q_;
  return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
  require_same_field(field_, o.field_, "scalar *");
  Scalar r;
  r.field_ = field_;
  if (field_.kind == FieldKind::Prime)
    r.v_ = (v_ * o.v_) % field_.modulus;
  else
    r.q_ = q_ * o.q_;
  return r;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::operator-() const {
  Scalar r;
  r.field_ = field_;
  if (field_.kind == FieldKind::Prime)
    r.v_ = v_ == 0 ? 0 : field_.modulus - v_;
  else
    r.q_ = -q_;
  return r;
}

Scalar Scalar::inverse() const {
  if (is_zero()) die("division by zero scalar");
  Scalar r;
  r.field_ = field_;
  if (field_.kind == FieldKind::Prime)
    r.v_ = mod_pow(v_, field_.modulus - 2, field_.modulus);
  else
    r.q_ = 1 / q_;
  return r;
}

bool Scalar::operator==(const Scalar& o) const {
  require_same_field(field_, o.field_, "scalar ==");
  return field_.kind == FieldKind::Prime ? v_ == o.v_ : q_ == o.q_;
}

std::string Scalar::to_string() const {
  if (field_.kind == FieldKind::Prime) return std::to_string(v_);
  return q_.str();
}

Matrix::Matrix(const Field& f, std::size_t rows, std::size_t cols)
    : field_(f), rows_(rows), cols_(cols), data_(rows * cols, Scalar::zero(f)) {}

Matrix Matrix::identity(const Field& f, std::size_t n) {
  Matrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Scalar::one(f);
  return m;
}

Matrix Matrix::from_rows(const Field& f, std::size_t rows, std::size_t cols,
                         std::vector<long long> entries) {
  if (entries.size() != rows * cols) die("from_rows: entry count mismatch");
  Matrix m(f, rows, cols);
  for (std::size_t i = 0; i < entries.size(); ++i)
    m.data_[i] = Scalar::of_int(f, entries[i]);
  return m;
}

Scalar& Matrix::at(std::size_t r, std::size_t c) {
  if (r >= rows_ || c >= cols_) die("matrix index out of range");
  return data_[r * cols_ + c];
}

const Scalar& Matrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) die("matrix index out of range");
  return data_[r * cols_ + c];
}

Matrix Matrix::operator*(const Matrix& o) const {
  require_same_field(field_, o.field_, "matrix *");
  if (cols_ != o.rows_) die("matrix product shape mismatch");
  Matrix r(field_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Scalar& a = data_[i * cols_ + k];
      if (a.is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        const Scalar& b = o.data_[k * o.cols_ + j];
        if (b.is_zero()) continue;
        r.data_[i * o.cols_ + j] = r.data_[i * o.cols_ + j] + a * b;
      }
    }
  return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
  require_same_field(field_, o.field_, "matrix +");
  if (rows_ != o.rows_ || cols_ != o.cols_) die("matrix sum shape mismatch");
  Matrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = r.data_[i] + o.data_[i];
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  require_same_field(field_, o.field_, "matrix -");
  if (rows_ != o.rows_ || cols_ != o.cols_) die("matrix difference shape mismatch");
  Matrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = r.data_[i] - o.data_[i];
  return r;
}

Matrix Matrix::scale(const Scalar& s) const {
  Matrix r = *this;
  for (auto& x : r.data_) x = x * s;
  return r;
}

Matrix Matrix::transpose() const {
  Matrix r(field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Scalar& s) { return s.is_zero(); });
}

bool Matrix::operator==(const Matrix& o) const {
  if (!(field_ == o.field_) || rows_ != o.rows_ || cols_ != o.cols_) return false;
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (data_[i] != o.data_[i]) return false;
  return true;
}

Matrix Matrix::hstack(const Matrix& o) const {
  require_same_field(field_, o.field_, "hstack");
  if (rows_ != o.rows_) die("hstack row mismatch");
  Matrix r(field_, rows_, cols_ + o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
    for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
  }
  return r;
}

Matrix Matrix::vstack(const Matrix& o) const {
  require_same_field(field_, o.field_, "vstack");
  if (o.rows_ == 0) {
    Matrix r = *this;
    return r;
  }
  if (rows_ == 0) return o.cols_ == cols_ || cols_ == 0 ? o : (die("vstack col mismatch"), o);
  if (cols_ != o.cols_) die("vstack col mismatch");
  Matrix r(field_, rows_ + o.rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
  for (std::size_t i = 0; i < o.rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(rows_ + i, j) = o.at(i, j);
  return r;
}

Matrix Matrix::submatrix(std::size_t r0, std::size_t c0, std::size_t nr,
                         std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) die("submatrix out of range");
  Matrix r(field_, nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) r.at(i, j) = at(r0 + i, c0 + j);
  return r;
}

Matrix Matrix::row(std::size_t r) const { return submatrix(r, 0, 1, cols_); }
Matrix Matrix::col(std::size_t c) const { return submatrix(0, c, rows_, 1); }

Scalar Matrix::trace() const {
  if (rows_ != cols_) die("trace of non-square matrix");
  Scalar t = Scalar::zero(field_);
  for (std::size_t i = 0; i < rows_; ++i) t = t + at(i, i);
  return t;
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) os << "; ";
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) os << " ";
      os << at(i, j).to_string();
    }
  }
  os << "]";
  return os.str();
}

std::string Matrix::to_bytes() const {
  std::ostringstream os;
  os << field_.to_string() << ":" << rows_ << "x" << cols_ << ":";
  for (const auto& s : data_) os << s.to_string() << ",";
  return os.str();
}

Echelon rref(const Matrix& rows) {
  Matrix m = rows;
  const Field& f = m.field();
  std::size_t nr = m.rows(), nc = m.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < nc && r < nr; ++c) {
    std::size_t sel = nr;
    for (std::size_t i = r; i < nr; ++i)
      if (!m.at(i, c).is_zero()) {
        sel = i;
        break;
      }
    if (sel == nr) continue;
    if (sel != r)
      for (std::size_t j = 0; j < nc; ++j) std::swap(m.at(sel, j), m.at(r, j));
    Scalar inv = m.at(r, c).inverse();
    for (std::size_t j = c; j < nc; ++j) m.at(r, j) = m.at(r, j) * inv;
    for (std::size_t i = 0; i < nr; ++i) {
      if (i == r) continue;
      Scalar factor = m.at(i, c);
      if (factor.is_zero()) continue;
      for (std::size_t j = c; j < nc; ++j)
        m.at(i, j) = m.at(i, j) - factor * m.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  Echelon e;
  e.basis = Matrix(f, r, nc);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < nc; ++j) e.basis.at(i, j) = m.at(i, j);
  e.pivots = std::move(pivots);
  return e;
}

std::size_t rank(const Matrix& m) { return rref(m).basis.rows(); }

Matrix row_space(const Matrix& m) { return rref(m).basis; }

Matrix kernel_basis(const Matrix& A) {
  // Solve A x = 0: echelonize A, then read off one basis vector per free
  // column; canonical because rref is and free columns are scanned in order.
  Echelon e = rref(A);
  const Field& f = A.field();
  std::size_t n = A.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Matrix K(f, free_cols.size(), n);
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    std::size_t fc = free_cols[k];
    K.at(k, fc) = Scalar::one(f);
    for (std::size_t i = 0; i < e.pivots.size(); ++i)
      K.at(k, e.pivots[i]) = -e.basis.at(i, fc);
  }
  // Already reduced: each free column is a pivot of K with entry 1 and is
  // zero in every other row, and rows are sorted by that pivot.
  return K;
}

std::optional<Matrix> solve(const Matrix& A, const Matrix& B) {
  require_same_field(A.field(), B.field(), "solve");
  if (A.rows() != B.rows()) die("solve shape mismatch");
  Echelon e = rref(A.hstack(B));
  std::size_t n = A.cols(), m = B.cols();
  // Inconsistent iff some pivot lands in the B block.
  for (auto c : e.pivots)
    if (c >= n) return std::nullopt;
  Matrix X(A.field(), n, m);
  for (std::size_t i = 0; i < e.pivots.size(); ++i)
    for (std::size_t j = 0; j < m; ++j) X.at(e.pivots[i], j) = e.basis.at(i, n + j);
  return X;
}

std::optional<Matrix> inverse(const Matrix& m) {
  if (m.rows() != m.cols()) die("inverse of non-square matrix");
  auto x = solve(m, Matrix::identity(m.field(), m.rows()));
  if (!x) return std::nullopt;
  if (rank(m) != m.rows()) return std::nullopt;
  return x;
}

bool in_row_space(const Echelon& space, const Matrix& row_vec) {
  if (row_vec.rows() != 1) die("in_row_space expects a single row");
  Matrix v = row_vec;
  for (std::size_t i = 0; i < space.pivots.size(); ++i) {
    Scalar c = v.at(0, space.pivots[i]);
    if (c.is_zero()) continue;
    for (std::size_t j = 0; j < v.cols(); ++j)
      v.at(0, j) = v.at(0, j) - c * space.basis.at(i, j);
  }
  return v.is_zero();
}

bool subspace_contains(const Matrix& outer_rows, const Matrix& inner_rows) {
  Echelon e = rref(outer_rows);
  for (std::size_t i = 0; i < inner_rows.rows(); ++i)
    if (!in_row_space(e, inner_rows.row(i))) return false;
  return true;
}

Matrix sum_rowspaces(const Matrix& a, const Matrix& b) {
  return row_space(a.vstack(b));
}

Matrix intersect_rowspaces(const Matrix& a, const Matrix& b) {
  // Zassenhaus: echelonize [A|A ; B|0]; rows with zero left block carry the
  // intersection in the right block.
  require_same_field(a.field(), b.field(), "intersect_rowspaces");
  if (a.cols() != b.cols()) die("intersect_rowspaces width mismatch");
  std::size_t n = a.cols();
  const Field& f = a.field();
  Matrix top = a.hstack(a);
  Matrix bot = b.hstack(Matrix(f, b.rows(), n));
  Echelon e = rref(top.vstack(bot));
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < e.basis.rows(); ++i) {
    bool left_zero = true;
    for (std::size_t j = 0; j < n && left_zero; ++j)
      if (!e.basis.at(i, j).is_zero()) left_zero = false;
    if (left_zero) keep.push_back(i);
  }
  Matrix r(f, keep.size(), n);
  for (std::size_t k = 0; k < keep.size(); ++k)
    for (std::size_t j = 0; j < n; ++j) r.at(k, j) = e.basis.at(keep[k], n + j);
  return row_space(r);
}

std::optional<Matrix> coordinates_in_rows(const Matrix& rows, const Matrix& vec) {
  if (vec.rows() != 1 || vec.cols() != rows.cols()) die("coordinates_in_rows shape mismatch");
  // c * rows = vec  <=>  rows^T c^T = vec^T.
  auto x = solve(rows.transpose(), vec.transpose());
  if (!x) return std::nullopt;
  return x->transpose();
}

Matrix complement_pivots(const Echelon& e, std::size_t ambient) {
  const Field& f = e.basis.field();
  std::vector<bool> is_pivot(ambient, false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < ambient; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Matrix r(f, free_cols.size(), ambient);
  for (std::size_t k = 0; k < free_cols.size(); ++k)
    r.at(k, free_cols[k]) = Scalar::one(f);
  return r;
}

Poly Poly::zero(const Field& f) {
  Poly p;
  p.field = f;
  return p;
}

Poly Poly::from_coeffs(const Field& f, std::vector<Scalar> cs) {
  Poly p;
  p.field = f;
  p.c = std::move(cs);
  while (!p.c.empty() && p.c.back().is_zero()) p.c.pop_back();
  return p;
}

Scalar Poly::eval(const Scalar& x) const {
  Scalar r = Scalar::zero(field);
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

std::string Poly::to_string() const {
  if (c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i].is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || !c[i].is_one()) os << c[i].to_string();
    if (i >= 1) {
      if (!c[i].is_one()) os << "*";
      os << "T";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

Poly poly_add(const Poly& a, const Poly& b) {
  require_same_field(a.field, b.field, "poly_add");
  std::vector<Scalar> cs(std::max(a.c.size(), b.c.size()), Scalar::zero(a.field));
  for (std::size_t i = 0; i < a.c.size(); ++i) cs[i] = cs[i] + a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) cs[i] = cs[i] + b.c[i];
  return Poly::from_coeffs(a.field, std::move(cs));
}

Poly poly_sub(const Poly& a, const Poly& b) {
  require_same_field(a.field, b.field, "poly_sub");
  std::vector<Scalar> cs(std::max(a.c.size(), b.c.size()), Scalar::zero(a.field));
  for (std::size_t i = 0; i < a.c.size(); ++i) cs[i] = cs[i] + a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) cs[i] = cs[i] - b.c[i];
  return Poly::from_coeffs(a.field, std::move(cs));
}

Poly poly_mul(const Poly& a, const Poly& b) {
  require_same_field(a.field, b.field, "poly_mul");
  if (a.is_zero() || b.is_zero()) return Poly::zero(a.field);
  std::vector<Scalar> cs(a.c.size() + b.c.size() - 1, Scalar::zero(a.field));
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j)
      cs[i + j] = cs[i + j] + a.c[i] * b.c[j];
  }
  return Poly::from_coeffs(a.field, std::move(cs));
}

std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b) {
  require_same_field(a.field, b.field, "poly_divmod");
  if (b.is_zero()) die("polynomial division by zero");
  Poly r = a;
  std::vector<Scalar> q(a.c.size() > b.c.size() ? a.c.size() - b.c.size() + 1 : 1,
                        Scalar::zero(a.field));
  Scalar lead_inv = b.c.back().inverse();
  while (!r.is_zero() && r.degree() >= b.degree()) {
    std::size_t shift = static_cast<std::size_t>(r.degree() - b.degree());
    Scalar coef = r.c.back() * lead_inv;
    q[shift] = q[shift] + coef;
    for (std::size_t i = 0; i < b.c.size(); ++i)
      r.c[shift + i] = r.c[shift + i] - coef * b.c[i];
    while (!r.c.empty() && r.c.back().is_zero()) r.c.pop_back();
  }
  return {Poly::from_coeffs(a.field, std::move(q)), r};
}

Poly poly_make_monic(const Poly& a) {
  if (a.is_zero()) return a;
  Scalar inv = a.c.back().inverse();
  Poly r = a;
  for (auto& x : r.c) x = x * inv;
  return r;
}

Poly poly_gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    Poly r = poly_divmod(x, y).second;
    x = y;
    y = r;
  }
  return poly_make_monic(x);
}

Poly poly_derivative(const Poly& a) {
  if (a.c.size() <= 1) return Poly::zero(a.field);
  std::vector<Scalar> cs(a.c.size() - 1, Scalar::zero(a.field));
  for (std::size_t i = 1; i < a.c.size(); ++i)
    cs[i - 1] = a.c[i] * Scalar::of_int(a.field, static_cast<long long>(i));
  return Poly::from_coeffs(a.field, std::move(cs));
}

Poly poly_pow_mod(const Poly& base, const BigInt& exp, const Poly& mod) {
  Poly r = Poly::from_coeffs(base.field, {Scalar::one(base.field)});
  Poly b = poly_divmod(base, mod).second;
  BigInt e = exp;
  while (e > 0) {
    if ((e & 1) != 0) r = poly_divmod(poly_mul(r, b), mod).second;
    b = poly_divmod(poly_mul(b, b), mod).second;
    e >>= 1;
  }
  return r;
}

Poly minimal_polynomial(const Matrix& A) {
  if (A.rows() != A.cols()) die("minimal polynomial of non-square matrix");
  const Field& f = A.field();
  std::size_t n = A.rows();
  if (n == 0) return Poly::from_coeffs(f, {Scalar::one(f)});
  // Stack vec(A^0), vec(A^1), ... until linearly dependent; the first
  // dependence gives the minimal polynomial coefficients.
  std::vector<Matrix> powers;
  Matrix cur = Matrix::identity(f, n);
  Matrix flat(f, 0, n * n);
  for (std::size_t d = 0; d <= n; ++d) {
    Matrix vec_row(f, 1, n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) vec_row.at(0, i * n + j) = cur.at(i, j);
    // Dependence test: is vec(A^d) in the span of earlier powers?
    auto coords = coordinates_in_rows(flat, vec_row);
    if (coords && d > 0) {
      std::vector<Scalar> cs(d + 1, Scalar::zero(f));
      for (std::size_t i = 0; i < d; ++i) cs[i] = -coords->at(0, i);
      cs[d] = Scalar::one(f);
      return Poly::from_coeffs(f, std::move(cs));
    }
    if (coords && d == 0) {
      // Zero-dimensional edge handled above; identity dependent only if n==0.
      die("unexpected dependence at degree 0");
    }
    flat = flat.vstack(vec_row);
    powers.push_back(cur);
    cur = cur * A;
  }
  // Dependence is guaranteed at degree <= n by Cayley-Hamilton.
  Matrix vec_row(f, 1, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) vec_row.at(0, i * n + j) = cur.at(i, j);
  auto coords = coordinates_in_rows(flat, vec_row);
  if (!coords) die("minimal polynomial: no dependence up to dimension bound");
  std::size_t d = n + 1;
  (void)d;
  std::vector<Scalar> cs(flat.rows() + 1, Scalar::zero(f));
  for (std::size_t i = 0; i < flat.rows(); ++i) cs[i] = -coords->at(0, i);
  cs[flat.rows()] = Scalar::one(f);
  return Poly::from_coeffs(f, std::move(cs));
}

Scalar Rng::scalar(const Field& f) {
  if (f.kind == FieldKind::Prime)
    return Scalar::of_int(f, static_cast<long long>(below(f.modulus)));
  // Small integers suffice for randomized searches over the rationals.
  return Scalar::of_int(f, static_cast<long long>(below(21)) - 10);
}

Scalar Rng::nonzero_scalar(const Field& f) {
  for (;;) {
    Scalar s = scalar(f);
    if (!s.is_zero()) return s;
  }
}

namespace {

// Equal-degree splitting (Cantor-Zassenhaus) of a squarefree product of
// irreducibles all of degree d, over F_p with p odd.
void equal_degree_split(const Poly& f, int d, Rng& rng,
                        std::vector<Poly>& out) {
  const Field& F = f.field;
  if (f.degree() == d) {
    out.push_back(poly_make_monic(f));
    return;
  }
  BigInt p(F.modulus);
  BigInt e = (boost::multiprecision::pow(p, static_cast<unsigned>(d)) - 1) / 2;
  for (;;) {
    // Random polynomial of degree < deg f.
    std::vector<Scalar> cs(static_cast<std::size_t>(f.degree()), Scalar::zero(F));
    for (auto& x : cs) x = rng.scalar(F);
    Poly a = Poly::from_coeffs(F, std::move(cs));
    if (a.is_zero() || a.degree() < 1) continue;
    Poly g = poly_gcd(a, f);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree_split(g, d, rng, out);
      equal_degree_split(poly_divmod(f, g).first, d, rng, out);
      return;
    }
    Poly b = poly_pow_mod(a, e, f);
    b = poly_sub(b, Poly::from_coeffs(F, {Scalar::one(F)}));
    g = poly_gcd(b, f);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree_split(g, d, rng, out);
      equal_degree_split(poly_divmod(f, g).first, d, rng, out);
      return;
    }
  }
}

// Trial-division factorization by all monic polynomials of increasing degree;
// exponential, used only for p = 2 where Cantor-Zassenhaus needs the
// characteristic-2 variant.  Degrees stay tiny (bounded by module dims).
void factor_by_trial_division(Poly f, std::vector<std::pair<Poly, int>>& out) {
  const Field& F = f.field;
  std::uint64_t p = F.modulus;
  int d = 1;
  while (f.degree() > 0) {
    if (f.degree() < 2 * d) {
      out.emplace_back(poly_make_monic(f), 1);
      break;
    }
    // Enumerate monic candidates of degree d.
    bool found = false;
    std::uint64_t count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (std::uint64_t code = 0; code < count; ++code) {
      std::vector<Scalar> cs(static_cast<std::size_t>(d) + 1, Scalar::zero(F));
      std::uint64_t c = code;
      for (int i = 0; i < d; ++i) {
        cs[static_cast<std::size_t>(i)] = Scalar::of_int(F, static_cast<long long>(c % p));
        c /= p;
      }
      cs[static_cast<std::size_t>(d)] = Scalar::one(F);
      Poly cand = Poly::from_coeffs(F, std::move(cs));
      int mult = 0;
      for (;;) {
        auto [q, r] = poly_divmod(f, cand);
        if (!r.is_zero()) break;
        f = q;
        ++mult;
      }
      if (mult > 0) {
        out.emplace_back(cand, mult);
        found = true;
        if (f.degree() < d) break;
      }
    }
    if (!found) ++d;
  }
}

}  // namespace

PolyFactors factor_poly(const Poly& p_in, Rng& rng) {
  PolyFactors result;
  Poly f = poly_make_monic(p_in);
  const Field& F = f.field;
  if (f.degree() <= 0) return result;

  if (F.kind == FieldKind::Rationals) {
    // Split off rational roots (num divides |c0|, den divides |lead| after
    // clearing denominators); remaining factor may stay composite.
    for (;;) {
      if (f.degree() <= 0) break;
      if (f.degree() == 1) {
        result.factors.emplace_back(f, 1);
        f = Poly::from_coeffs(F, {Scalar::one(F)});
        break;
      }
      // Clear denominators to get integer coefficients.
      BigInt lcm_den = 1;
      for (const auto& s : f.c) {
        BigInt d = boost::multiprecision::denominator(s.rational_value());
        lcm_den = boost::multiprecision::lcm(lcm_den, d);
      }
      std::vector<BigInt> ic;
      for (const auto& s : f.c) {
        Rational v = s.rational_value() * Rational(lcm_den);
        ic.push_back(boost::multiprecision::numerator(v));
      }
      BigInt c0 = ic.front();
      BigInt lead = ic.back();
      bool found = false;
      if (c0 == 0) {
        // Root at zero.
        Poly lin = Poly::from_coeffs(F, {Scalar::zero(F), Scalar::one(F)});
        int mult = 0;
        for (;;) {
          auto [q, r] = poly_divmod(f, lin);
          if (!r.is_zero()) break;
          f = q;
          ++mult;
        }
        result.factors.emplace_back(lin, mult);
        found = true;
      } else {
        auto divisors = [](BigInt n) {
          n = boost::multiprecision::abs(n);
          std::vector<BigInt> ds;
          for (BigInt d = 1; d * d <= n; ++d)
            if (n % d == 0) {
              ds.push_back(d);
              ds.push_back(n / d);
            }
          return ds;
        };
        std::vector<BigInt> nums = divisors(c0), dens = divisors(lead);
        for (const auto& nu : nums) {
          for (const auto& de : dens) {
            for (int sign = 1; sign >= -1 && !found; sign -= 2) {
              Rational root = Rational(sign * nu, de);
              Scalar rs = Scalar::of_rational(F, root);
              if (!f.eval(rs).is_zero()) continue;
              Poly lin = Poly::from_coeffs(F, {-rs, Scalar::one(F)});
              int mult = 0;
              for (;;) {
                auto [q, r] = poly_divmod(f, lin);
                if (!r.is_zero()) break;
                f = q;
                ++mult;
              }
              result.factors.emplace_back(lin, mult);
              found = true;
            }
            if (found) break;
          }
          if (found) break;
        }
      }
      if (!found) break;
    }
    if (f.degree() > 0) {
      result.factors.emplace_back(f, 1);
      result.complete = false;  // leftover factor not certified irreducible
    }
    return result;
  }

  if (F.modulus == 2) {
    factor_by_trial_division(f, result.factors);
    return result;
  }

  // Squarefree decomposition via repeated gcd with the derivative.  In
  // characteristic p a vanishing derivative means f = g(T^p) = g(T)^p.
  struct SqfPart {
    Poly poly;
    int mult;
  };
  std::vector<SqfPart> parts;
  std::vector<std::pair<Poly, int>> stack{{f, 1}};
  while (!stack.empty()) {
    auto [g, outer] = stack.back();
    stack.pop_back();
    if (g.degree() <= 0) continue;
    Poly dg = poly_derivative(g);
    if (dg.is_zero()) {
      // g = h(T^p); extract p-th root coefficientwise (a^p = a in F_p on
      // coefficients? no: a^(1/p) = a^(p^(k-1)) = a in F_p since a^p = a).
      std::vector<Scalar> hc;
      for (std::size_t i = 0; i < g.c.size(); i += F.modulus) hc.push_back(g.c[i]);
      stack.emplace_back(Poly::from_coeffs(F, std::move(hc)),
                         outer * static_cast<int>(F.modulus));
      continue;
    }
    Poly c = poly_gcd(g, dg);
    Poly w = poly_divmod(g, c).first;  // product of squarefree part
    int i = 1;
    while (w.degree() > 0) {
      Poly y = poly_gcd(w, c);
      Poly factor = poly_divmod(w, y).first;
      if (factor.degree() > 0) parts.push_back({factor, outer * i});
      w = y;
      c = poly_divmod(c, y).first;
      ++i;
    }
    if (c.degree() > 0) stack.emplace_back(c, outer);
  }

  // Distinct-degree then equal-degree splitting of each squarefree part.
  for (auto& part : parts) {
    Poly g = part.poly;
    Poly x = Poly::from_coeffs(F, {Scalar::zero(F), Scalar::one(F)});
    Poly h = x;
    int d = 0;
    while (g.degree() > 0) {
      ++d;
      if (g.degree() < 2 * d) {
        std::vector<Poly> irr;
        equal_degree_split(g, g.degree(), rng, irr);
        for (auto& q : irr) result.factors.emplace_back(q, part.mult);
        break;
      }
      h = poly_pow_mod(h, BigInt(F.modulus), g);
      Poly gd = poly_gcd(poly_sub(h, x), g);
      if (gd.degree() > 0) {
        std::vector<Poly> irr;
        equal_degree_split(gd, d, rng, irr);
        for (auto& q : irr) result.factors.emplace_back(q, part.mult);
        g = poly_divmod(g, gd).first;
        h = poly_divmod(h, g.is_zero() ? gd : g).second;
      }
    }
  }

  // Canonical order: by degree, then lexicographic on coefficient strings.
  std::sort(result.factors.begin(), result.factors.end(),
            [](const auto& a, const auto& b) {
              if (a.first.degree() != b.first.degree())
                return a.first.degree() < b.first.degree();
              return a.first.to_string() < b.first.to_string();
            });
  return result;
}

}  // namespace strata
