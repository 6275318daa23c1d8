#include "strata/homology.hpp"

#include <memory>
#include <utility>

namespace strata {

namespace {

Morphism negate(const Morphism& f) {
  return morphism_scale(f, Scalar::of_int(f.src.field(), -1));
}

}  // namespace

Morphism descend_through_quotient(const Module& x, const Submodule& w,
                                  const Module& quot, const Morphism& pr,
                                  const Morphism& s) {
  Morphism out;
  out.src = quot;
  out.tgt = s.tgt;
  out.mats.reserve(x.dims.size());
  for (std::size_t v = 0; v < x.dims.size(); ++v) {
    // Complement standard vectors are a section of pr at vertex v.
    Matrix comp = complement_pivots(rref(w.rows[v]), x.dims[v]);
    out.mats.push_back(s.mats[v] * comp.transpose());
  }
  Morphism diff = morphism_add(compose(out, pr),
                               morphism_scale(s, Scalar::of_int(s.src.field(), -1)));
  if (!diff.is_zero())
    throw InvariantError("descend_through_quotient: map does not vanish on the collapsed submodule");
  return out;
}

void ShortExactSequence::check_valid() const {
  inj.check_valid();
  surj.check_valid();
  if (!same_module(inj.tgt, surj.src))
    throw InvariantError("short exact sequence: middle terms disagree");
  if (!is_injective_morphism(inj))
    throw InvariantError("short exact sequence: left map is not injective");
  if (!is_surjective_morphism(surj))
    throw InvariantError("short exact sequence: right map is not surjective");
  if (!compose(surj, inj).is_zero())
    throw InvariantError("short exact sequence: composite is nonzero");
  if (image_submodule(inj).total_rank() != kernel_submodule(surj).total_rank())
    throw InvariantError("short exact sequence: not exact in the middle");
}

ExtSpace ext1_space(const Module& m, const Module& n) {
  if (!algebras_compatible(m.alg, n.alg))
    throw InputError("ext1_space: modules are over different algebra presentations");
  ExtSpace es;
  es.m = m;
  es.n = n;
  es.cover = projective_cover(m);
  es.omega = kernel_module(es.cover, &es.omega_inc);
  es.cocycles = hom_space(es.omega, n);
  const Field& fld = m.field();
  if (es.cocycles.empty()) {
    es.restriction_rows = Matrix(fld, 0, 0);
    return es;
  }
  Matrix basis_rows = stack_morphism_entries(fld, es.cocycles);
  std::vector<Morphism> lifts = hom_space(es.cover.src, n);
  Matrix restr(fld, lifts.size(), es.cocycles.size());
  for (std::size_t i = 0; i < lifts.size(); ++i) {
    auto coords = coordinates_in_rows(basis_rows, morphism_entries_row(compose(lifts[i], es.omega_inc)));
    if (!coords)
      throw InvariantError("ext1_space: restricted map is not a syzygy cocycle");
    for (std::size_t c = 0; c < es.cocycles.size(); ++c) restr.at(i, c) = coords->at(0, c);
  }
  Echelon e = rref(restr);
  es.restriction_rows = e.basis;
  std::vector<bool> is_pivot(es.cocycles.size(), false);
  for (std::size_t p : e.pivots) is_pivot[p] = true;
  for (std::size_t c = 0; c < es.cocycles.size(); ++c)
    if (!is_pivot[c]) es.class_coords.push_back(c);
  return es;
}

std::size_t ext1_dim(const Module& m, const Module& n) { return ext1_space(m, n).dim(); }

ShortExactSequence realize_extension(const ExtSpace& es, const Morphism& cocycle) {
  if (!same_module(cocycle.src, es.omega) || !same_module(cocycle.tgt, es.n))
    throw InputError("realize_extension: cocycle must map the syzygy into the kernel term");
  std::vector<Morphism> injs, projs;
  Module sum = direct_sum({es.n, es.cover.src}, &injs, &projs);
  // Collapse the anti-diagonal copy of the syzygy: w -> (-c(w), w).
  Morphism graph = morphism_add(compose(injs[0], negate(cocycle)),
                                compose(injs[1], es.omega_inc));
  Submodule w = image_submodule(graph);
  auto [mid, pr] = quotient_by_submodule(sum, w);
  ShortExactSequence out;
  out.inj = compose(pr, injs[0]);
  out.surj = descend_through_quotient(sum, w, mid, pr, compose(es.cover, projs[1]));
  out.check_valid();
  return out;
}

bool is_split(const ShortExactSequence& s) {
  const Module& n = s.inj.src;
  if (n.is_zero()) return true;
  std::vector<Morphism> homs = hom_space(s.inj.tgt, n);
  if (homs.empty()) return false;
  std::vector<Morphism> restricted;
  restricted.reserve(homs.size());
  for (const Morphism& h : homs) restricted.push_back(compose(h, s.inj));
  Matrix rows = stack_morphism_entries(n.field(), restricted);
  return coordinates_in_rows(rows, morphism_entries_row(identity_morphism(n))).has_value();
}

ShortExactSequence pullback(const ShortExactSequence& s, const Morphism& f) {
  if (!same_module(f.tgt, s.surj.tgt))
    throw InputError("pullback: map must end at the sequence cokernel");
  std::vector<Morphism> injs, projs;
  Module sum = direct_sum({s.surj.src, f.src}, &injs, &projs);
  // Fibre product = kernel of (e, m') -> surj(e) - f(m').
  Morphism d = morphism_add(compose(s.surj, projs[0]), negate(compose(f, projs[1])));
  Morphism k;
  Module fibre = kernel_module(d, &k);
  ShortExactSequence out;
  out.inj = factor_through_inclusion(k, compose(injs[0], s.inj));
  out.surj = compose(projs[1], k);
  out.check_valid();
  return out;
}

ShortExactSequence pushout(const ShortExactSequence& s, const Morphism& g) {
  if (!same_module(g.src, s.inj.src))
    throw InputError("pushout: map must start at the sequence kernel");
  std::vector<Morphism> injs, projs;
  Module sum = direct_sum({g.tgt, s.inj.tgt}, &injs, &projs);
  Morphism graph = morphism_add(compose(injs[0], negate(g)),
                                compose(injs[1], s.inj));
  Submodule w = image_submodule(graph);
  auto [mid, pr] = quotient_by_submodule(sum, w);
  ShortExactSequence out;
  out.inj = compose(pr, injs[0]);
  out.surj = descend_through_quotient(sum, w, mid, pr, compose(s.surj, projs[1]));
  out.check_valid();
  return out;
}

Morphism factor_through_inclusion(const Morphism& inc, const Morphism& g) {
  if (!same_module(inc.tgt, g.tgt))
    throw InputError("factor_through_inclusion: codomains differ");
  Morphism h;
  h.src = g.src;
  h.tgt = inc.src;
  h.mats.reserve(inc.mats.size());
  for (std::size_t v = 0; v < inc.mats.size(); ++v) {
    auto x = solve(inc.mats[v], g.mats[v]);
    if (!x)
      throw InvariantError("factor_through_inclusion: image does not lie inside the subobject");
    h.mats.push_back(*x);
  }
  h.check_valid();
  return h;
}

TensorSpace tensor_space(const Module& x_op, const Module& z) {
  auto op = std::make_shared<const Algebra>(opposite_algebra(*z.alg));
  if (!algebras_compatible(x_op.alg, op))
    throw InputError("tensor_space: left factor is not presented over the opposite algebra");
  const Field& fld = z.field();
  std::size_t xt = x_op.total_dim(), zt = z.total_dim();
  TensorSpace t;
  if (xt == 0 || zt == 0) {
    t.collapsed = Matrix(fld, 0, xt * zt);
    return t;
  }
  std::vector<std::size_t> elems;
  for (std::size_t i = 0; i < z.alg->num_idempotents; ++i) elems.push_back(i);
  for (std::size_t g : z.alg->generators) elems.push_back(g);
  // Balancing relations x*s (x) v - x (x) s*v; idempotents and one-arrow
  // elements generate all of them (longer words reduce by bilinearity).
  std::vector<Matrix> rows;
  for (std::size_t s : elems) {
    Matrix r = x_op.act_basis_total(s);  // right action of s on x
    Matrix l = z.act_basis_total(s);
    for (std::size_t i = 0; i < xt; ++i)
      for (std::size_t j = 0; j < zt; ++j) {
        Matrix row(fld, 1, xt * zt);
        bool nonzero = false;
        for (std::size_t i2 = 0; i2 < xt; ++i2)
          if (!r.at(i2, i).is_zero()) {
            row.at(0, i2 * zt + j) = row.at(0, i2 * zt + j) + r.at(i2, i);
            nonzero = true;
          }
        for (std::size_t j2 = 0; j2 < zt; ++j2)
          if (!l.at(j2, j).is_zero()) {
            row.at(0, i * zt + j2) = row.at(0, i * zt + j2) - l.at(j2, j);
            nonzero = true;
          }
        if (nonzero) rows.push_back(row);
      }
  }
  Matrix stacked(fld, rows.size(), xt * zt);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < xt * zt; ++c) stacked.at(i, c) = rows[i].at(0, c);
  t.collapsed = rref(stacked).basis;
  t.dim = xt * zt - t.collapsed.rows();
  return t;
}

std::size_t tor1_dim(const Module& x_op, const Module& y) {
  Morphism cover = projective_cover(y);
  Morphism inc;
  Module omega = kernel_module(cover, &inc);
  if (omega.is_zero() || x_op.is_zero()) return 0;
  TensorSpace t_omega = tensor_space(x_op, omega);
  TensorSpace t_p = tensor_space(x_op, cover.src);
  std::size_t xt = x_op.total_dim();
  std::size_t ot = omega.total_dim(), pt = cover.src.total_dim();
  const Field& fld = y.field();
  // Images of the big basis under 1 (x) inc, as rows over x (x) P coords.
  Matrix inc_tot = inc.total();
  Matrix img(fld, xt * ot, xt * pt);
  for (std::size_t i = 0; i < xt; ++i)
    for (std::size_t j = 0; j < ot; ++j)
      for (std::size_t r = 0; r < pt; ++r) img.at(i * ot + j, i * pt + r) = inc_tot.at(r, j);
  std::size_t induced_rank = rank(img.vstack(t_p.collapsed)) - t_p.collapsed.rows();
  return t_omega.dim - induced_rank;
}

}  // namespace strata
