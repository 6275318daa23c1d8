#include "strata/algebra.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace strata {

SparseVec sparse_normalize(SparseVec v) {
  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVec out;
  for (auto& [i, c] : v) {
    if (!out.empty() && out.back().first == i)
      out.back().second = out.back().second + c;
    else
      out.emplace_back(i, c);
    if (!out.empty() && out.back().second.is_zero()) out.pop_back();
  }
  return out;
}

SparseVec sparse_add(const SparseVec& a, const SparseVec& b) {
  SparseVec v = a;
  v.insert(v.end(), b.begin(), b.end());
  return sparse_normalize(std::move(v));
}

SparseVec sparse_scale(const SparseVec& a, const Scalar& s) {
  if (s.is_zero()) return {};
  SparseVec v = a;
  for (auto& [i, c] : v) c = c * s;
  return v;
}

const SparseVec& Algebra::product(std::size_t i, std::size_t j) const {
  if (i >= dim() || j >= dim()) throw InvariantError("algebra product index out of range");
  return mult[i][j];
}

SparseVec Algebra::multiply(const SparseVec& a, const SparseVec& b) const {
  SparseVec acc;
  for (const auto& [i, ci] : a)
    for (const auto& [j, cj] : b) {
      SparseVec term = sparse_scale(product(i, j), ci * cj);
      acc = sparse_add(acc, term);
    }
  return acc;
}

SparseVec Algebra::word_product(const std::vector<std::size_t>& word) const {
  if (word.empty()) throw InvariantError("word_product of empty word");
  auto gen_vec = [&](std::size_t g) -> SparseVec {
    if (g >= generators.size()) throw InvariantError("generator index out of range");
    return {{generators[g], Scalar::one(field)}};
  };
  SparseVec acc = gen_vec(word[0]);
  for (std::size_t k = 1; k < word.size(); ++k)
    acc = multiply(gen_vec(word[k]), acc);  // later letters applied after
  return acc;
}

Matrix Algebra::left_mult_matrix(std::size_t i) const {
  Matrix m(field, dim(), dim());
  for (std::size_t j = 0; j < dim(); ++j)
    for (const auto& [k, c] : product(i, j)) m.at(k, j) = c;
  return m;
}

Matrix Algebra::right_mult_matrix(std::size_t i) const {
  Matrix m(field, dim(), dim());
  for (std::size_t j = 0; j < dim(); ++j)
    for (const auto& [k, c] : product(j, i)) m.at(k, j) = c;
  return m;
}

Matrix Algebra::dense_row(const SparseVec& v) const {
  Matrix m(field, 1, dim());
  for (const auto& [i, c] : v) m.at(0, i) = c;
  return m;
}

SparseVec Algebra::sparse_from_dense(const Matrix& row) const {
  if (row.rows() != 1 || row.cols() != dim())
    throw InvariantError("sparse_from_dense shape mismatch");
  SparseVec v;
  for (std::size_t i = 0; i < dim(); ++i)
    if (!row.at(0, i).is_zero()) v.emplace_back(i, row.at(0, i));
  return v;
}

void Algebra::check_valid() const {
  const std::size_t n = num_idempotents, d = dim();
  if (n == 0 || n > d) throw InvariantError("algebra needs 1 <= num_idempotents <= dim");
  if (mult.size() != d) throw InvariantError("multiplication table has wrong size");
  for (const auto& row : mult)
    if (row.size() != d) throw InvariantError("multiplication table has wrong size");

  for (std::size_t i = 0; i < n; ++i) {
    const BasisElement& e = basis[i];
    if (e.src != i || e.tgt != i || !e.word.empty())
      throw InvariantError("idempotent basis element malformed");
    for (std::size_t j = 0; j < n; ++j) {
      const SparseVec& p = product(i, j);
      if (i == j) {
        if (p.size() != 1 || p[0].first != i || !p[0].second.is_one())
          throw InvariantError("idempotent not idempotent");
      } else if (!p.empty()) {
        throw InvariantError("idempotents not orthogonal");
      }
    }
  }

  for (std::size_t b = 0; b < d; ++b) {
    const BasisElement& el = basis[b];
    if (el.src >= n || el.tgt >= n) throw InvariantError("basis grading out of range");
    for (std::size_t i = 0; i < n; ++i) {
      const SparseVec& left = product(i, b);   // e_i * b
      const SparseVec& right = product(b, i);  // b * e_i
      SparseVec self = {{b, Scalar::one(field)}};
      if (i == el.tgt) {
        if (left != self) throw InvariantError("e_tgt * b != b");
      } else if (!left.empty()) {
        throw InvariantError("e_i * b != 0 for i != tgt(b)");
      }
      if (i == el.src) {
        if (right != self) throw InvariantError("b * e_src != b");
      } else if (!right.empty()) {
        throw InvariantError("b * e_i != 0 for i != src(b)");
      }
    }
  }

  // Products respect the grading.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const SparseVec& p = product(i, j);
      if (basis[j].tgt != basis[i].src) {
        if (!p.empty()) throw InvariantError("nonzero product of non-composable elements");
        continue;
      }
      for (const auto& [k, c] : p) {
        (void)c;
        if (basis[k].src != basis[j].src || basis[k].tgt != basis[i].tgt)
          throw InvariantError("product term violates grading");
      }
    }

  // Associativity on all basis triples.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      SparseVec ij = product(i, j);
      for (std::size_t k = 0; k < d; ++k) {
        SparseVec lhs = multiply(ij, {{k, Scalar::one(field)}});
        SparseVec rhs = multiply({{i, Scalar::one(field)}}, product(j, k));
        if (lhs != rhs) throw InvariantError("multiplication not associative");
      }
    }

  // Non-idempotent basis elements must span a nilpotent ideal (then it equals
  // rad A, since the quotient is a product of copies of the ground field).
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (i < n && j < n) continue;
      for (const auto& [k, c] : product(i, j)) {
        (void)c;
        if (k < n) throw InvariantError("radical span is not an ideal");
      }
    }
  // Nilpotency: iterate J^{m+1} = span{ b * v : b non-idempotent, v in J^m }.
  Matrix jm(field, d - n, d);
  for (std::size_t b = n; b < d; ++b) jm.at(b - n, b) = Scalar::one(field);
  jm = row_space(jm);
  for (std::size_t iter = 0; iter <= d + 1 && jm.rows() > 0; ++iter) {
    if (iter == d + 1) throw InvariantError("radical span is not nilpotent");
    Matrix next(field, 0, d);
    for (std::size_t b = n; b < d; ++b) {
      for (std::size_t r = 0; r < jm.rows(); ++r) {
        SparseVec v = sparse_from_dense(jm.row(r));
        SparseVec bv = multiply({{b, Scalar::one(field)}}, v);
        next = next.vstack(dense_row(bv));
      }
    }
    jm = row_space(next);
  }

  // Generator words reproduce their basis elements exactly.
  std::set<std::size_t> genset(generators.begin(), generators.end());
  for (std::size_t g : generators)
    if (g < n || g >= d) throw InvariantError("generator index out of range");
  for (std::size_t b = n; b < d; ++b) {
    if (basis[b].word.empty())
      throw InvariantError("non-idempotent basis element without generator word");
    SparseVec w = word_product(basis[b].word);
    SparseVec self = {{b, Scalar::one(field)}};
    if (w != self) throw InvariantError("generator word does not reproduce basis element");
  }
}

namespace {

using Word = std::vector<std::size_t>;   // arrow ids, application order
using PathKey = std::pair<std::size_t, Word>;  // (source vertex, word)

struct PathInfo {
  Word word;
  std::size_t src, tgt, degree;
};

std::string path_label(const Quiver& q, std::size_t src, const Word& w) {
  if (w.empty()) return "e" + std::to_string(src + 1);
  std::string s;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    if (!s.empty()) s += "*";
    s += q.arrows[*it].label;
  }
  return s;
}

// Maintains a reduced row echelon basis with one-row-at-a-time insertion.
class IncEchelon {
 public:
  IncEchelon(const Field& f, std::size_t width) : field_(f), width_(width) {}

  // Reduces v in place against the current rows; returns the residue.
  std::vector<Scalar> reduce(std::vector<Scalar> v) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Scalar& c = v[pivots_[r]];
      if (c.is_zero()) continue;
      Scalar f = c;
      for (std::size_t j = 0; j < width_; ++j) v[j] = v[j] - f * rows_[r][j];
    }
    return v;
  }

  // Returns true if the vector enlarged the span.
  bool insert(std::vector<Scalar> v) {
    v = reduce(std::move(v));
    std::size_t p = width_;
    for (std::size_t j = 0; j < width_; ++j)
      if (!v[j].is_zero()) {
        p = j;
        break;
      }
    if (p == width_) return false;
    Scalar inv = v[p].inverse();
    for (std::size_t j = 0; j < width_; ++j) v[j] = v[j] * inv;
    // Clear column p in existing rows to keep full reduction.
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      Scalar c = rows_[r][p];
      if (c.is_zero()) continue;
      for (std::size_t j = 0; j < width_; ++j)
        rows_[r][j] = rows_[r][j] - c * v[j];
    }
    // Keep rows sorted by pivot.
    std::size_t pos = 0;
    while (pos < pivots_.size() && pivots_[pos] < p) ++pos;
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(v));
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), p);
    return true;
  }

  bool member(std::vector<Scalar> v) const {
    v = reduce(std::move(v));
    return std::all_of(v.begin(), v.end(), [](const Scalar& s) { return s.is_zero(); });
  }

  const std::vector<std::size_t>& pivots() const { return pivots_; }
  const std::vector<std::vector<Scalar>>& rows() const { return rows_; }

 private:
  Field field_;
  std::size_t width_;
  std::vector<std::vector<Scalar>> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace

Algebra build_bound_quiver_algebra(const Field& field, const Quiver& quiver,
                                   const std::vector<Relation>& relations,
                                   std::size_t degree_bound, std::string name) {
  const std::size_t nv = quiver.num_vertices;
  if (nv == 0) throw InputError("quiver must have at least one vertex");
  {
    std::set<std::string> labels;
    for (const auto& a : quiver.arrows) {
      if (a.src >= nv || a.tgt >= nv) throw InputError("arrow endpoint out of range");
      if (a.label.empty() || !labels.insert(a.label).second)
        throw InputError("arrow labels must be nonempty and distinct");
    }
  }

  // Validate relations and find the degree range they occupy.
  std::size_t max_rel_deg = 0;
  for (const auto& rel : relations) {
    for (const auto& term : rel) {
      if (term.word.size() < 2)
        throw InputError("relation terms must be paths of length >= 2");
      for (std::size_t k = 0; k < term.word.size(); ++k) {
        if (term.word[k] >= quiver.arrows.size())
          throw InputError("relation references unknown arrow");
        if (k + 1 < term.word.size() &&
            quiver.arrows[term.word[k]].tgt != quiver.arrows[term.word[k + 1]].src)
          throw InputError("relation path is not composable");
      }
      max_rel_deg = std::max(max_rel_deg, term.word.size());
    }
  }

  constexpr std::size_t kMaxPaths = 100000;
  std::set<PathKey> dead;  // monomials proved to lie in the ideal

  auto src_of_word = [&](const Word& w, std::size_t fallback) {
    return w.empty() ? fallback : quiver.arrows[w[0]].src;
  };

  const std::size_t start = std::max<std::size_t>(std::size_t{1}, max_rel_deg);
  for (std::size_t N = start; N <= degree_bound; ++N) {
    // Enumerate live paths of degree <= N (skipping any whose sub-path is a
    // known ideal monomial); order: by degree, then discovery.
    std::vector<PathInfo> paths;
    std::map<PathKey, std::size_t> index;
    std::vector<std::vector<std::size_t>> by_degree(N + 1);
    for (std::size_t v = 0; v < nv; ++v) {
      index[{v, {}}] = paths.size();
      by_degree[0].push_back(paths.size());
      paths.push_back({{}, v, v, 0});
    }
    // Degree 1 follows arrow input order so generators sit at predictable
    // basis positions; higher degrees extend parents in discovery order.
    for (std::size_t a = 0; a < quiver.arrows.size(); ++a) {
      if (N < 1) break;
      Word w{a};
      if (dead.count({quiver.arrows[a].src, w})) continue;
      index[{quiver.arrows[a].src, w}] = paths.size();
      by_degree[1].push_back(paths.size());
      paths.push_back({w, quiver.arrows[a].src, quiver.arrows[a].tgt, 1});
    }
    for (std::size_t d = 2; d <= N; ++d) {
      for (std::size_t pid : by_degree[d - 1]) {
        PathInfo p = paths[pid];  // copy: paths may reallocate
        for (std::size_t a = 0; a < quiver.arrows.size(); ++a) {
          if (quiver.arrows[a].src != p.tgt) continue;
          Word w = p.word;
          w.push_back(a);
          // Skip if any suffix of the new word is a dead monomial.
          bool pruned = false;
          for (std::size_t i = 0; i < w.size() && !pruned; ++i) {
            Word suffix(w.begin() + static_cast<std::ptrdiff_t>(i), w.end());
            if (dead.count({src_of_word(suffix, 0), std::move(suffix)})) pruned = true;
          }
          if (pruned) continue;
          index[{p.src, w}] = paths.size();
          by_degree[d].push_back(paths.size());
          paths.push_back({w, p.src, quiver.arrows[a].tgt, d});
          if (paths.size() > kMaxPaths)
            throw InputError("path space too large; relations do not bound the quiver algebra");
        }
      }
    }

    const std::size_t W = paths.size();
    IncEchelon span(field, W);

    auto relation_vectors = [&]() {
      // Split each relation into (src,tgt)-components over live paths.
      std::vector<std::vector<Scalar>> vecs;
      for (const auto& rel : relations) {
        std::map<std::pair<std::size_t, std::size_t>, std::vector<Scalar>> comps;
        for (const auto& term : rel) {
          if (term.word.size() > N) continue;  // truncated away
          std::size_t s = quiver.arrows[term.word[0]].src;
          std::size_t t = quiver.arrows[term.word.back()].tgt;
          auto it = index.find({s, term.word});
          if (it == index.end()) continue;  // pruned: already in the ideal
          auto& vec = comps[{s, t}];
          if (vec.empty()) vec.assign(W, Scalar::zero(field));
          vec[it->second] = vec[it->second] + term.coeff;
        }
        for (auto& [st, vec] : comps) vecs.push_back(std::move(vec));
      }
      return vecs;
    };

    std::vector<std::vector<Scalar>> worklist = relation_vectors();
    while (!worklist.empty()) {
      std::vector<Scalar> v = std::move(worklist.back());
      worklist.pop_back();
      std::vector<Scalar> red = span.reduce(std::move(v));
      bool nonzero =
          std::any_of(red.begin(), red.end(), [](const Scalar& s) { return !s.is_zero(); });
      if (!nonzero) continue;
      // Queue all one-arrow left and right multiples of the new element.
      for (std::size_t a = 0; a < quiver.arrows.size(); ++a) {
        std::vector<Scalar> left(W, Scalar::zero(field));
        std::vector<Scalar> right(W, Scalar::zero(field));
        bool any_left = false, any_right = false;
        for (std::size_t pid = 0; pid < W; ++pid) {
          if (red[pid].is_zero()) continue;
          const PathInfo& p = paths[pid];
          if (p.degree + 1 <= N) {
            if (quiver.arrows[a].src == p.tgt) {  // arrow after path
              Word w = p.word;
              w.push_back(a);
              auto it = index.find({p.src, w});
              if (it != index.end()) {
                left[it->second] = left[it->second] + red[pid];
                any_left = true;
              }
            }
            if (quiver.arrows[a].tgt == p.src) {  // arrow before path
              Word w{a};
              w.insert(w.end(), p.word.begin(), p.word.end());
              auto it = index.find({quiver.arrows[a].src, w});
              if (it != index.end()) {
                right[it->second] = right[it->second] + red[pid];
                any_right = true;
              }
            }
          }
        }
        if (any_left) worklist.push_back(std::move(left));
        if (any_right) worklist.push_back(std::move(right));
      }
      span.insert(std::move(red));
    }

    // Termination: no live top-degree paths, or all of them in the ideal.
    bool terminate = true;
    for (std::size_t pid : by_degree[N]) {
      std::vector<Scalar> e(W, Scalar::zero(field));
      e[pid] = Scalar::one(field);
      if (!span.member(std::move(e))) {
        terminate = false;
        break;
      }
    }

    if (!terminate) {
      // Record monomials that entered the ideal, then deepen the truncation.
      for (std::size_t pid = 0; pid < W; ++pid) {
        if (paths[pid].degree == 0) continue;
        std::vector<Scalar> e(W, Scalar::zero(field));
        e[pid] = Scalar::one(field);
        if (span.member(std::move(e))) dead.insert({paths[pid].src, paths[pid].word});
      }
      continue;
    }

    // Assemble the quotient algebra from the non-pivot live paths.
    std::vector<bool> is_pivot(W, false);
    for (std::size_t p : span.pivots()) is_pivot[p] = true;
    std::vector<std::size_t> basis_paths;
    std::vector<std::size_t> path_to_basis(W, W);
    for (std::size_t pid = 0; pid < W; ++pid) {
      if (is_pivot[pid]) continue;
      if (paths[pid].degree >= N && !by_degree[N].empty())
        throw InvariantError("top-degree path escaped the ideal span");
      path_to_basis[pid] = basis_paths.size();
      basis_paths.push_back(pid);
    }
    for (std::size_t v = 0; v < nv; ++v)
      if (path_to_basis[v] != v)
        throw InputError("a trivial path lies in the relation ideal; not admissible");
    // Arrows survive (relations live in degree >= 2), so they index generators.
    std::vector<std::size_t> arrow_basis(quiver.arrows.size());
    for (std::size_t a = 0; a < quiver.arrows.size(); ++a) {
      auto it = index.find({quiver.arrows[a].src, Word{a}});
      if (it == index.end() || path_to_basis[it->second] == W)
        throw InvariantError("arrow missing from quotient basis");
      arrow_basis[a] = path_to_basis[it->second];
    }

    Algebra alg;
    alg.field = field;
    alg.num_idempotents = nv;
    alg.name = std::move(name);
    alg.quiver = quiver;
    for (std::size_t pid : basis_paths) {
      const PathInfo& p = paths[pid];
      alg.basis.push_back({path_label(quiver, p.src, p.word), p.src, p.tgt, p.word});
    }
    alg.generators = arrow_basis;

    // Normal form of a path id as a sparse vector over the quotient basis.
    auto reduce_path = [&](std::size_t pid) {
      std::vector<Scalar> e(W, Scalar::zero(field));
      e[pid] = Scalar::one(field);
      e = span.reduce(std::move(e));
      SparseVec out;
      for (std::size_t q = 0; q < W; ++q)
        if (!e[q].is_zero()) {
          if (path_to_basis[q] == W)
            throw InvariantError("normal form touches a pivot coordinate");
          out.emplace_back(path_to_basis[q], e[q]);
        }
      return sparse_normalize(std::move(out));
    };

    const std::size_t dim = basis_paths.size();
    alg.mult.assign(dim, std::vector<SparseVec>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      const PathInfo& pi = paths[basis_paths[i]];
      for (std::size_t j = 0; j < dim; ++j) {
        const PathInfo& pj = paths[basis_paths[j]];
        if (pj.tgt != pi.src) continue;           // not composable
        if (pi.degree == 0) {                     // e * x = x
          alg.mult[i][j] = {{j, Scalar::one(field)}};
          continue;
        }
        if (pj.degree == 0) {                     // x * e = x
          alg.mult[i][j] = {{i, Scalar::one(field)}};
          continue;
        }
        if (pi.degree + pj.degree > N) continue;  // beyond the ideal depth
        Word w = pj.word;                         // b_j applied first
        w.insert(w.end(), pi.word.begin(), pi.word.end());
        auto it = index.find({pj.src, w});
        if (it == index.end()) continue;          // pruned monomial: zero
        alg.mult[i][j] = reduce_path(it->second);
      }
    }
    alg.check_valid();
    return alg;
  }
  throw InputError("relation ideal not admissible or truncation bound " +
                   std::to_string(degree_bound) + " exceeded");
}

Algebra make_algebra(const Field& field, std::size_t num_idempotents,
                     std::vector<BasisElement> basis,
                     std::vector<std::vector<SparseVec>> mult,
                     std::vector<std::size_t> generators, std::string name) {
  Algebra alg;
  alg.field = field;
  alg.num_idempotents = num_idempotents;
  alg.basis = std::move(basis);
  alg.mult = std::move(mult);
  alg.generators = std::move(generators);
  alg.name = std::move(name);
  alg.check_valid();
  return alg;
}

Algebra opposite_algebra(const Algebra& a) {
  Algebra op;
  op.field = a.field;
  op.num_idempotents = a.num_idempotents;
  op.name = a.name.empty() ? "" : a.name + "^op";
  op.generators = a.generators;
  op.basis = a.basis;
  for (auto& b : op.basis) {
    std::swap(b.src, b.tgt);
    std::reverse(b.word.begin(), b.word.end());
  }
  const std::size_t d = a.dim();
  op.mult.assign(d, std::vector<SparseVec>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) op.mult[i][j] = a.mult[j][i];
  if (a.quiver) {
    Quiver q = *a.quiver;
    for (auto& ar : q.arrows) std::swap(ar.src, ar.tgt);
    op.quiver = std::move(q);
  }
  op.check_valid();
  return op;
}

}  // namespace strata
