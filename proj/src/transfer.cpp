#include "strata/transfer.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace strata {

namespace {

void require_over(const char* who, const Module& m, const AlgebraPtr& alg) {
  m.check_valid();
  if (!algebras_compatible(m.alg, alg))
    throw InputError(std::string(who) + ": module is presented over the wrong algebra");
}

Module zero_module_over(const AlgebraPtr& alg) {
  Module z;
  z.alg = alg;
  z.dims.assign(alg->num_idempotents, 0);
  for (std::size_t g = 0; g < alg->generators.size(); ++g)
    z.action.emplace_back(alg->field, 0, 0);
  return z;
}

// Basis layout of the vertex-i projective, mirroring its construction:
// blocks[v] lists the algebra basis indices of the vertex-v slots in order.
std::vector<std::vector<std::size_t>> projective_blocks(const AlgebraPtr& alg, std::size_t i) {
  std::vector<std::vector<std::size_t>> block(alg->num_idempotents);
  for (std::size_t b = 0; b < alg->dim(); ++b)
    if (alg->basis[b].src == i) block[alg->basis[b].tgt].push_back(b);
  return block;
}

Morphism combine_homs(const std::vector<Morphism>& basis, const Matrix& coeff_row) {
  Morphism f = zero_morphism(basis.front().src, basis.front().tgt);
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (!coeff_row.at(0, k).is_zero())
      f = morphism_add(f, morphism_scale(basis[k], coeff_row.at(0, k)));
  return f;
}

// A sum of projectives covering a module, with the per-summand vertex index
// and the direct-sum data.  Any projective presentation computes the functor
// values below; the cover keeps them small.
struct SummandCover {
  std::vector<std::size_t> indices;
  Module p0;
  std::vector<Morphism> inj, proj;
  Morphism cover;
};

SummandCover minimal_cover(const Module& y) {
  const AlgebraPtr& alg = y.alg;
  const Field& f = alg->field;
  SummandCover sc;
  if (y.total_dim() == 0) {
    sc.p0 = zero_module_over(alg);
    sc.cover = zero_morphism(sc.p0, y);
    return sc;
  }
  auto [top, pi] = top_module(y);
  std::vector<Module> parts;
  std::vector<Morphism> maps;
  for (std::size_t v = 0; v < alg->num_idempotents; ++v) {
    if (top.dims[v] == 0) continue;
    Module pv = projective_module(alg, v);
    if (projective_blocks(alg, v)[v].empty() || projective_blocks(alg, v)[v][0] != v)
      throw InvariantError("projective layout does not start with its idempotent");
    auto hs = hom_space(pv, y);
    // Evaluation at the idempotent slot identifies Hom(P(v), Y) with the
    // vertex-v part of Y; compose with the top projection and solve.
    Matrix topped(f, top.dims[v], hs.size());
    for (std::size_t k = 0; k < hs.size(); ++k)
      for (std::size_t r = 0; r < y.dims[v]; ++r) {
        const Scalar& c = hs[k].mats[v].at(r, 0);
        if (c.is_zero()) continue;
        for (std::size_t q = 0; q < top.dims[v]; ++q) {
          Scalar add = pi.mats[v].at(q, r) * c;
          topped.at(q, k) = topped.at(q, k) + add;
        }
      }
    for (std::size_t j = 0; j < top.dims[v]; ++j) {
      Matrix unit(f, 1, top.dims[v]);
      unit.at(0, j) = Scalar::one(f);
      auto coeff = coordinates_in_rows(topped.transpose(), unit);
      if (!coeff) throw InvariantError("projective cover misses part of the top");
      parts.push_back(pv);
      maps.push_back(combine_homs(hs, *coeff));
      sc.indices.push_back(v);
    }
  }
  sc.p0 = direct_sum(parts, &sc.inj, &sc.proj);
  sc.cover = zero_morphism(sc.p0, y);
  for (std::size_t k = 0; k < maps.size(); ++k)
    sc.cover = morphism_add(sc.cover, compose(maps[k], sc.proj[k]));
  if (!is_surjective_morphism(sc.cover))
    throw InvariantError("projective cover is not surjective");
  return sc;
}

struct ProjPresentation {
  SummandCover c0;  // onto the module
  SummandCover c1;  // onto the kernel of c0.cover
  Morphism d;       // c1 composed into c0.p0
};

ProjPresentation projective_presentation(const Module& y) {
  ProjPresentation pr;
  pr.c0 = minimal_cover(y);
  Morphism inc;
  Module k = kernel_module(pr.c0.cover, &inc);
  pr.c1 = minimal_cover(k);
  pr.d = compose(inc, pr.c1.cover);
  return pr;
}

// Connecting coefficients of the presentation differential: out[k][l] is the
// component of d(idempotent generator of summand l) in cover summand k, as a
// sparse vector over the algebra basis.
std::vector<std::vector<SparseVec>> connecting_elements(const ProjPresentation& pr) {
  const AlgebraPtr& alg = pr.c0.p0.alg;
  const std::size_t nk = pr.c0.indices.size(), nl = pr.c1.indices.size();
  std::vector<std::vector<SparseVec>> out(nk, std::vector<SparseVec>(nl));
  if (nk == 0 || nl == 0) return out;
  Matrix dtot = pr.d.total();
  std::map<std::size_t, std::vector<std::size_t>> slot_cache;
  auto slots_of = [&](std::size_t i) -> const std::vector<std::size_t>& {
    auto it = slot_cache.find(i);
    if (it == slot_cache.end()) {
      std::vector<std::size_t> flat;
      for (const auto& blk : projective_blocks(alg, i))
        for (std::size_t b : blk) flat.push_back(b);
      it = slot_cache.emplace(i, std::move(flat)).first;
    }
    return it->second;
  };
  for (std::size_t l = 0; l < nl; ++l) {
    const std::size_t j = pr.c1.indices[l];
    const Module& pj = pr.c1.inj[l].src;
    const std::size_t pos = pj.offset(j);
    if (slots_of(j)[pos] != j)
      throw InvariantError("idempotent is not at the head of its projective block");
    Matrix unit(alg->field, pj.total_dim(), 1);
    unit.at(pos, 0) = Scalar::one(alg->field);
    Matrix w = dtot * (pr.c1.inj[l].total() * unit);
    for (std::size_t k = 0; k < nk; ++k) {
      Matrix z = pr.c0.proj[k].total() * w;
      const auto& slots = slots_of(pr.c0.indices[k]);
      SparseVec x;
      for (std::size_t s = 0; s < z.rows(); ++s)
        if (!z.at(s, 0).is_zero()) x.push_back({slots[s], z.at(s, 0)});
      out[k][l] = sparse_normalize(std::move(x));
    }
  }
  return out;
}

// Realizes a connecting coefficient vector as the morphism between family
// members that it encodes: every term must sit in the hom block with the
// given endomorphism-side target and source.
Morphism realize_block(const EndoTransferContext& ctx, const SparseVec& x,
                       std::size_t tgt_gamma, std::size_t src_gamma) {
  Morphism f = zero_morphism(ctx.qfamily[tgt_gamma], ctx.qfamily[src_gamma]);
  for (const auto& [b, c] : x) {
    const BasisElement& el = ctx.gamma->basis[b];
    if (el.tgt != tgt_gamma || el.src != src_gamma)
      throw InvariantError("connecting element escapes its hom block");
    f = morphism_add(f, morphism_scale(ctx.reps[b], c));
  }
  return f;
}

std::string first_failure(const SystemVerdict& sv) {
  for (const auto& ax : sv.axioms)
    if (ax.verdict != Verdict::Yes) {
      std::string where;
      if (ax.pair) where = " (" + std::to_string(ax.pair->first) + ", " +
                           std::to_string(ax.pair->second) + ")";
      return "axiom '" + ax.axiom + "'" + where + ": " + ax.detail;
    }
  return "all axioms hold";
}

std::pair<Module, Morphism> lower_standard(const std::vector<Module>& projs,
                                           const LinearOrder& ord, std::size_t i) {
  std::vector<Module> weakly_higher;
  for (std::size_t j = 0; j < projs.size(); ++j)
    if (!ord.less(j, i)) weakly_higher.push_back(projs[j]);
  Submodule rad = radical_submodule(projs[i]);
  auto [radm, inc] = submodule_to_module(projs[i], rad);
  Submodule tr = trace_submodule_many(weakly_higher, radm);
  return quotient_by_submodule(projs[i], push_submodule(inc, tr));
}

Verdict membership_verdict(const MembershipResult& mr) {
  switch (mr.status) {
    case MembershipStatus::Filtered: return Verdict::Yes;
    case MembershipStatus::NotFiltered: return Verdict::No;
    default: return Verdict::Undecided;
  }
}

}  // namespace

EndoTransferContext endomorphism_algebra(const std::vector<Module>& qfamily,
                                         const SearchLimits& limits) {
  if (qfamily.empty()) throw InputError("endomorphism_algebra: empty family");
  EndoTransferContext ctx;
  ctx.lambda = qfamily[0].alg;
  const Field& f = ctx.lambda->field;
  const std::size_t t = qfamily.size();
  for (std::size_t i = 0; i < t; ++i) {
    require_over("endomorphism_algebra", qfamily[i], ctx.lambda);
    if (qfamily[i].total_dim() == 0)
      throw InputError("endomorphism_algebra: member " + std::to_string(i) + " is zero");
    std::string note;
    Verdict ind = is_indecomposable(qfamily[i], limits, &note);
    if (ind == Verdict::No)
      throw InputError("endomorphism_algebra: member " + std::to_string(i) +
                       " is decomposable (" + note + ")");
    if (ind == Verdict::Undecided)
      throw InputError("endomorphism_algebra: indecomposability of member " +
                       std::to_string(i) + " undecided within the search limits");
  }
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = i + 1; j < t; ++j) {
      Verdict iso = is_isomorphic(qfamily[i], qfamily[j], limits);
      if (iso == Verdict::Yes)
        throw InputError("endomorphism_algebra: members " + std::to_string(i) + " and " +
                         std::to_string(j) + " are isomorphic");
      if (iso == Verdict::Undecided)
        throw InputError("endomorphism_algebra: distinctness of members " + std::to_string(i) +
                         " and " + std::to_string(j) + " undecided within the search limits");
    }
  ctx.qfamily = qfamily;

  // homs[a][b]: canonical basis of the maps Q(b) -> Q(a); these make up the
  // (src = a, tgt = b) block of the presentation.
  std::vector<std::vector<std::vector<Morphism>>> homs(t);
  for (std::size_t a = 0; a < t; ++a) {
    homs[a].resize(t);
    for (std::size_t b = 0; b < t; ++b) homs[a][b] = hom_space(qfamily[b], qfamily[a]);
  }

  std::vector<BasisElement> basis;
  ctx.reps.clear();
  for (std::size_t i = 0; i < t; ++i) {
    basis.push_back({"e" + std::to_string(i), i, i, {}});
    ctx.reps.push_back(identity_morphism(qfamily[i]));
  }
  // Diagonal blocks take the identity plus a basis of the endomorphism
  // radical, so that the non-idempotent span is nilpotent; off-diagonal
  // blocks take the whole hom space.
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t b = 0; b < t; ++b) {
      if (a == b) {
        auto rad = end_radical_rows(qfamily[a], homs[a][a]);
        if (!rad)
          throw InputError("endomorphism_algebra: cannot certify the endomorphism radical of "
                           "member " + std::to_string(a) + " over this field");
        if (homs[a][a].size() - rad->rows() != 1)
          throw InputError("endomorphism_algebra: member " + std::to_string(a) +
                           " has a non-split endomorphism ring (semisimple quotient of "
                           "dimension " + std::to_string(homs[a][a].size() - rad->rows()) + ")");
        for (std::size_t r = 0; r < rad->rows(); ++r) {
          Matrix row(f, 1, rad->cols());
          for (std::size_t c = 0; c < rad->cols(); ++c) row.at(0, c) = rad->at(r, c);
          basis.push_back({"h" + std::to_string(a) + "_" + std::to_string(a) + "_" +
                               std::to_string(r),
                           a, a, {basis.size() - t}});
          ctx.reps.push_back(combine_homs(homs[a][a], row));
        }
      } else {
        for (std::size_t k = 0; k < homs[a][b].size(); ++k) {
          basis.push_back({"h" + std::to_string(a) + "_" + std::to_string(b) + "_" +
                               std::to_string(k),
                           a, b, {basis.size() - t}});
          ctx.reps.push_back(homs[a][b][k]);
        }
      }
    }
  const std::size_t dim = basis.size();
  std::vector<std::size_t> generators;
  for (std::size_t g = t; g < dim; ++g) generators.push_back(g);

  // Per-block index lists and coordinate rows for reading products off.
  std::vector<std::vector<std::vector<std::size_t>>> block_idx(
      t, std::vector<std::vector<std::size_t>>(t));
  for (std::size_t k = 0; k < dim; ++k) block_idx[basis[k].src][basis[k].tgt].push_back(k);
  std::vector<std::vector<Matrix>> block_rows(t, std::vector<Matrix>(t));
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t b = 0; b < t; ++b) {
      std::vector<Morphism> members;
      for (std::size_t k : block_idx[a][b]) members.push_back(ctx.reps[k]);
      block_rows[a][b] = stack_morphism_entries(f, members);
    }

  std::vector<std::vector<SparseVec>> mult(dim, std::vector<SparseVec>(dim));
  for (std::size_t x = 0; x < dim; ++x)
    for (std::size_t y = 0; y < dim; ++y) {
      if (basis[x].src != basis[y].tgt) continue;
      Morphism comp = compose(ctx.reps[y], ctx.reps[x]);
      if (comp.is_zero()) continue;
      const std::size_t a = basis[y].src, b = basis[x].tgt;
      auto coords = coordinates_in_rows(block_rows[a][b], morphism_entries_row(comp));
      if (!coords) throw InvariantError("endomorphism product escapes its hom block");
      SparseVec v;
      for (std::size_t k = 0; k < block_idx[a][b].size(); ++k)
        if (!coords->at(0, k).is_zero()) v.push_back({block_idx[a][b][k], coords->at(0, k)});
      mult[x][y] = sparse_normalize(std::move(v));
    }

  ctx.gamma = std::make_shared<const Algebra>(
      make_algebra(f, t, std::move(basis), std::move(mult), std::move(generators), "end_op"));
  ctx.gamma_op = std::make_shared<const Algebra>(opposite_algebra(*ctx.gamma));

  // The sum of the family as a module over gamma_op: a basis element acts by
  // applying its underlying morphism between the corresponding blocks.
  Module qb;
  qb.alg = ctx.gamma_op;
  for (std::size_t i = 0; i < t; ++i) qb.dims.push_back(qfamily[i].total_dim());
  for (std::size_t g : ctx.gamma_op->generators) qb.action.push_back(ctx.reps[g].total());
  qb.check_valid();
  ctx.q_bimodule = std::move(qb);

  for (std::size_t i = 0; i < t; ++i) ctx.p_gamma.push_back(apply_F(ctx, qfamily[i]));
  for (std::size_t i = 0; i < t; ++i) ctx.p_gamma_op.push_back(apply_Fbar(ctx, qfamily[i]));
  return ctx;
}

Module apply_F(const EndoTransferContext& ctx, const Module& x) {
  require_over("apply_F", x, ctx.lambda);
  const Field& f = ctx.lambda->field;
  const std::size_t t = ctx.qfamily.size();
  std::vector<std::vector<Morphism>> hb(t);
  std::vector<Matrix> rows(t);
  Module m;
  m.alg = ctx.gamma;
  for (std::size_t a = 0; a < t; ++a) {
    hb[a] = hom_space(ctx.qfamily[a], x);
    rows[a] = stack_morphism_entries(f, hb[a]);
    m.dims.push_back(hb[a].size());
  }
  for (std::size_t g : ctx.gamma->generators) {
    const std::size_t a = ctx.gamma->basis[g].src, b = ctx.gamma->basis[g].tgt;
    Matrix mat(f, m.dims[b], m.dims[a]);
    for (std::size_t j = 0; j < m.dims[a]; ++j) {
      Morphism psi = compose(hb[a][j], ctx.reps[g]);
      if (m.dims[b] == 0) {
        if (!psi.is_zero()) throw InvariantError("hom transfer hit an empty component");
        continue;
      }
      auto c = coordinates_in_rows(rows[b], morphism_entries_row(psi));
      if (!c) throw InvariantError("hom transfer left the target hom space");
      for (std::size_t r = 0; r < m.dims[b]; ++r) mat.at(r, j) = c->at(0, r);
    }
    m.action.push_back(std::move(mat));
  }
  m.check_valid();
  return m;
}

Morphism apply_F_morphism(const EndoTransferContext& ctx, const Morphism& h,
                          const Module& fx, const Module& fy) {
  const Field& f = ctx.lambda->field;
  const std::size_t t = ctx.qfamily.size();
  Morphism out;
  out.src = fx;
  out.tgt = fy;
  for (std::size_t a = 0; a < t; ++a) {
    auto hbx = hom_space(ctx.qfamily[a], h.src);
    auto hby = hom_space(ctx.qfamily[a], h.tgt);
    if (hbx.size() != fx.dims[a] || hby.size() != fy.dims[a])
      throw InputError("apply_F_morphism: the given images do not match the endpoints");
    Matrix rows = stack_morphism_entries(f, hby);
    Matrix mat(f, hby.size(), hbx.size());
    for (std::size_t j = 0; j < hbx.size(); ++j) {
      Morphism psi = compose(h, hbx[j]);
      if (hby.empty()) {
        if (!psi.is_zero()) throw InvariantError("hom transfer hit an empty component");
        continue;
      }
      auto c = coordinates_in_rows(rows, morphism_entries_row(psi));
      if (!c) throw InvariantError("hom transfer left the target hom space");
      for (std::size_t r = 0; r < hby.size(); ++r) mat.at(r, j) = c->at(0, r);
    }
    out.mats.push_back(std::move(mat));
  }
  out.check_valid();
  return out;
}

Module apply_Fbar(const EndoTransferContext& ctx, const Module& x) {
  require_over("apply_Fbar", x, ctx.lambda);
  const Field& f = ctx.lambda->field;
  const std::size_t t = ctx.qfamily.size();
  std::vector<std::vector<Morphism>> hb(t);
  std::vector<Matrix> rows(t);
  Module m;
  m.alg = ctx.gamma_op;
  for (std::size_t b = 0; b < t; ++b) {
    hb[b] = hom_space(x, ctx.qfamily[b]);
    rows[b] = stack_morphism_entries(f, hb[b]);
    m.dims.push_back(hb[b].size());
  }
  for (std::size_t g : ctx.gamma_op->generators) {
    // Over the opposite presentation the element maps its gamma-target
    // component to its gamma-source component, by postcomposition.
    const std::size_t b = ctx.gamma_op->basis[g].src, a = ctx.gamma_op->basis[g].tgt;
    Matrix mat(f, m.dims[a], m.dims[b]);
    for (std::size_t j = 0; j < m.dims[b]; ++j) {
      Morphism psi = compose(ctx.reps[g], hb[b][j]);
      if (m.dims[a] == 0) {
        if (!psi.is_zero()) throw InvariantError("hom transfer hit an empty component");
        continue;
      }
      auto c = coordinates_in_rows(rows[a], morphism_entries_row(psi));
      if (!c) throw InvariantError("hom transfer left the target hom space");
      for (std::size_t r = 0; r < m.dims[a]; ++r) mat.at(r, j) = c->at(0, r);
    }
    m.action.push_back(std::move(mat));
  }
  m.check_valid();
  return m;
}

Morphism apply_Fbar_morphism(const EndoTransferContext& ctx, const Morphism& h,
                             const Module& fbar_y, const Module& fbar_x) {
  const Field& f = ctx.lambda->field;
  const std::size_t t = ctx.qfamily.size();
  Morphism out;
  out.src = fbar_y;
  out.tgt = fbar_x;
  for (std::size_t b = 0; b < t; ++b) {
    auto hby = hom_space(h.tgt, ctx.qfamily[b]);
    auto hbx = hom_space(h.src, ctx.qfamily[b]);
    if (hby.size() != fbar_y.dims[b] || hbx.size() != fbar_x.dims[b])
      throw InputError("apply_Fbar_morphism: the given images do not match the endpoints");
    Matrix rows = stack_morphism_entries(f, hbx);
    Matrix mat(f, hbx.size(), hby.size());
    for (std::size_t j = 0; j < hby.size(); ++j) {
      Morphism psi = compose(hby[j], h);
      if (hbx.empty()) {
        if (!psi.is_zero()) throw InvariantError("hom transfer hit an empty component");
        continue;
      }
      auto c = coordinates_in_rows(rows, morphism_entries_row(psi));
      if (!c) throw InvariantError("hom transfer left the target hom space");
      for (std::size_t r = 0; r < hbx.size(); ++r) mat.at(r, j) = c->at(0, r);
    }
    out.mats.push_back(std::move(mat));
  }
  out.check_valid();
  return out;
}

Module apply_G(const EndoTransferContext& ctx, const Module& y) {
  require_over("apply_G", y, ctx.gamma);
  ProjPresentation pr = projective_presentation(y);
  std::vector<Module> parts0, parts1;
  for (std::size_t i : pr.c0.indices) parts0.push_back(ctx.qfamily[i]);
  for (std::size_t j : pr.c1.indices) parts1.push_back(ctx.qfamily[j]);
  std::vector<Morphism> inj0, proj0, inj1, proj1;
  Module gp0 = parts0.empty() ? zero_module_over(ctx.lambda) : direct_sum(parts0, &inj0, &proj0);
  Module gp1 = parts1.empty() ? zero_module_over(ctx.lambda) : direct_sum(parts1, &inj1, &proj1);
  Morphism gd = zero_morphism(gp1, gp0);
  auto xs = connecting_elements(pr);
  for (std::size_t k = 0; k < pr.c0.indices.size(); ++k)
    for (std::size_t l = 0; l < pr.c1.indices.size(); ++l) {
      if (xs[k][l].empty()) continue;
      Morphism block = realize_block(ctx, xs[k][l], pr.c1.indices[l], pr.c0.indices[k]);
      gd = morphism_add(gd, compose(inj0[k], compose(block, proj1[l])));
    }
  return cokernel_module(gd);
}

Module apply_Gbar(const EndoTransferContext& ctx, const Module& w) {
  require_over("apply_Gbar", w, ctx.gamma_op);
  ProjPresentation pr = projective_presentation(w);
  std::vector<Module> parts0, parts1;
  for (std::size_t i : pr.c0.indices) parts0.push_back(ctx.qfamily[i]);
  for (std::size_t j : pr.c1.indices) parts1.push_back(ctx.qfamily[j]);
  std::vector<Morphism> inj0, proj0, inj1, proj1;
  Module gp0 = parts0.empty() ? zero_module_over(ctx.lambda) : direct_sum(parts0, &inj0, &proj0);
  Module gp1 = parts1.empty() ? zero_module_over(ctx.lambda) : direct_sum(parts1, &inj1, &proj1);
  // Contravariant: the value is the kernel of the realized differential,
  // which now runs from the cover side to the relation side.
  Morphism gd = zero_morphism(gp0, gp1);
  auto xs = connecting_elements(pr);
  for (std::size_t k = 0; k < pr.c0.indices.size(); ++k)
    for (std::size_t l = 0; l < pr.c1.indices.size(); ++l) {
      if (xs[k][l].empty()) continue;
      // Over the opposite presentation the block sits in the gamma hom block
      // with target c0-index and source c1-index, so it maps Q(i_k) -> Q(j_l).
      Morphism block = realize_block(ctx, xs[k][l], pr.c0.indices[k], pr.c1.indices[l]);
      gd = morphism_add(gd, compose(inj1[l], compose(block, proj0[k])));
    }
  return kernel_module(gd);
}

Module star_projective(const AlgebraPtr& alg, const AlgebraPtr& alg_op, const Module& y) {
  require_over("star_projective", y, alg);
  const Field& f = alg->field;
  Module reg = regular_module(alg);
  auto hs = hom_space(y, reg);
  if (hs.empty()) return zero_module_over(alg_op);
  // Slot layout of the regular module: per vertex, the projectives in vertex
  // order contribute their basis elements in ascending index order.
  const std::size_t t = alg->num_idempotents;
  std::vector<std::vector<std::size_t>> regblk(t);
  std::vector<std::pair<std::size_t, std::size_t>> place(alg->dim());
  for (std::size_t v = 0; v < t; ++v)
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t b = 0; b < alg->dim(); ++b)
        if (alg->basis[b].src == i && alg->basis[b].tgt == v) {
          place[b] = {v, regblk[v].size()};
          regblk[v].push_back(b);
        }
  auto right_mult = [&](std::size_t b) -> Morphism {
    Morphism r = zero_morphism(reg, reg);
    for (std::size_t v = 0; v < t; ++v)
      for (std::size_t pos = 0; pos < regblk[v].size(); ++pos) {
        for (const auto& [k, c] : alg->product(regblk[v][pos], b)) {
          if (place[k].first != v)
            throw InvariantError("right multiplication moved a vertex block");
          r.mats[v].at(place[k].second, pos) = r.mats[v].at(place[k].second, pos) + c;
        }
      }
    return r;
  };
  Matrix rows = stack_morphism_entries(f, hs);
  auto act = [&](std::size_t b) -> Matrix {
    Morphism rb = right_mult(b);
    Matrix m(f, hs.size(), hs.size());
    for (std::size_t k = 0; k < hs.size(); ++k) {
      Morphism g = compose(rb, hs[k]);
      auto c = coordinates_in_rows(rows, morphism_entries_row(g));
      if (!c) throw InvariantError("right multiplication left the hom space");
      for (std::size_t r = 0; r < hs.size(); ++r) m.at(r, k) = c->at(0, r);
    }
    return m;
  };
  return module_from_global_action(alg_op, hs.size(), act);
}

LinearOrder reversed_order(const LinearOrder& ord) {
  std::vector<std::size_t> rev(ord.order.rbegin(), ord.order.rend());
  return LinearOrder::of_positions(std::move(rev));
}

StratifiedFamilies stratified_families(const AlgebraPtr& a, const LinearOrder& ord) {
  const std::size_t t = a->num_idempotents;
  if (ord.size() != t) throw InputError("stratified_families: order size mismatch");
  StratifiedFamilies out;
  std::vector<Module> projs;
  for (std::size_t i = 0; i < t; ++i) projs.push_back(projective_module(a, i));
  for (std::size_t i = 0; i < t; ++i) {
    std::vector<Module> higher;
    for (std::size_t j = 0; j < t; ++j)
      if (ord.less(i, j)) higher.push_back(projs[j]);
    auto [delta, dw] = quotient_by_submodule(projs[i], trace_submodule_many(higher, projs[i]));
    out.delta.push_back(std::move(delta));
    out.delta_witness.push_back(std::move(dw));
    auto [dbar, dbw] = lower_standard(projs, ord, i);
    if (dbar.dims[i] != 1)
      throw InvariantError("lower standard module has vertex multiplicity " +
                           std::to_string(dbar.dims[i]));
    out.delta_bar.push_back(std::move(dbar));
    out.delta_bar_witness.push_back(std::move(dbw));
  }
  auto aop = std::make_shared<const Algebra>(opposite_algebra(*a));
  std::vector<Module> projs_op;
  for (std::size_t i = 0; i < t; ++i) projs_op.push_back(projective_module(aop, i));
  for (std::size_t i = 0; i < t; ++i) {
    auto [dbar_op, w] = lower_standard(projs_op, ord, i);
    if (dbar_op.dims[i] != 1)
      throw InvariantError("opposite lower standard module has vertex multiplicity " +
                           std::to_string(dbar_op.dims[i]));
    out.nabla_bar.push_back(dual_module(dbar_op, a));
    out.nabla_bar_witness.push_back(dual_morphism(w, a));
  }
  return out;
}

StandardlyStratifiedReport is_standardly_stratified(const AlgebraPtr& a,
                                                    const LinearOrder& ord,
                                                    const SearchLimits& limits) {
  StandardlyStratifiedReport rep;
  rep.families = stratified_families(a, ord);
  bool any_no = false, any_undecided = false;
  for (std::size_t i = 0; i < a->num_idempotents; ++i) {
    MembershipResult mr =
        filtration_membership(projective_module(a, i), rep.families.delta, ord, limits);
    if (mr.status == MembershipStatus::NotFiltered) any_no = true;
    if (mr.status == MembershipStatus::Undecided) any_undecided = true;
    rep.projectives.push_back(std::move(mr));
  }
  rep.verdict = any_no ? Verdict::No : (any_undecided ? Verdict::Undecided : Verdict::Yes);
  return rep;
}

TransferExistence pcs_existence_check(const std::vector<Module>& q, const LinearOrder& ord,
                                      const SearchLimits& limits) {
  if (q.empty()) throw InputError("pcs_existence_check: empty family");
  if (ord.size() != q.size()) throw InputError("pcs_existence_check: order size mismatch");
  TransferExistence out;
  EndoTransferContext ctx = endomorphism_algebra(q, limits);
  LinearOrder rev = reversed_order(ord);
  out.stratified = is_standardly_stratified(ctx.gamma_op, rev, limits);
  if (out.stratified->verdict != Verdict::Yes) {
    out.verdict = out.stratified->verdict;
    std::string which;
    for (std::size_t i = 0; i < out.stratified->projectives.size(); ++i)
      if (out.stratified->projectives[i].status != MembershipStatus::Filtered) {
        which = "projective " + std::to_string(i) + " is " +
                membership_status_string(out.stratified->projectives[i].status);
        break;
      }
    out.failing_condition =
        "the opposite endomorphism algebra is not standardly stratified for the reversed "
        "order (" + which + ")";
    return out;
  }
  StratifiedFamilies fams = stratified_families(ctx.gamma, rev);
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::size_t td = tor1_dim(ctx.q_bimodule, fams.delta_bar[i]);
    if (td != 0) {
      out.verdict = Verdict::No;
      out.failing_condition = "first torsion space of the sum against lower standard module " +
                              std::to_string(i) + " has dimension " + std::to_string(td);
      return out;
    }
  }
  for (std::size_t i = 0; i < q.size(); ++i) out.family.push_back(apply_G(ctx, fams.delta_bar[i]));
  for (std::size_t j = 0; j < q.size(); ++j)
    for (std::size_t i = 0; i < q.size(); ++i) {
      std::size_t ed = ext1_dim(q[j], out.family[i]);
      if (ed != 0) {
        out.verdict = Verdict::No;
        out.failing_condition = "first extension space of family member " + std::to_string(j) +
                                " against transported module " + std::to_string(i) +
                                " has dimension " + std::to_string(ed);
        return out;
      }
    }
  out.closure = verify_pcs(out.family, q, ord, limits);
  out.exists = out.closure->passed;
  out.verdict = out.closure->verdict;
  if (!out.exists) out.failing_condition = "re-verification failed: " + first_failure(*out.closure);
  return out;
}

TransferExistence ess_existence_check(const std::vector<Module>& psi,
                                      const std::vector<Module>& q, const LinearOrder& ord,
                                      const SearchLimits& limits) {
  if (psi.size() != q.size() || ord.size() != q.size() || q.empty())
    throw InputError("ess_existence_check: family sizes and order must match and be nonempty");
  TransferExistence out;
  SystemVerdict pre = verify_pcs(psi, q, ord, limits);
  if (!pre.passed) {
    out.verdict = pre.verdict;
    out.failing_condition = "pre-system verification failed: " + first_failure(pre);
    out.closure = std::move(pre);
    return out;
  }
  EndoTransferContext ctx = endomorphism_algebra(q, limits);
  LinearOrder rev = reversed_order(ord);
  StratifiedFamilies fams = stratified_families(ctx.gamma_op, rev);
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::size_t ed = ext1_dim(fams.delta[i], ctx.q_bimodule);
    if (ed != 0) {
      out.verdict = Verdict::No;
      out.failing_condition =
          "first extension space of opposite-side standard module " + std::to_string(i) +
          " against the sum has dimension " + std::to_string(ed);
      return out;
    }
  }
  for (std::size_t i = 0; i < q.size(); ++i)
    out.family.push_back(apply_Gbar(ctx, fams.delta[i]));
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) {
      std::size_t ed = ext1_dim(out.family[i], q[j]);
      if (ed != 0) {
        out.verdict = Verdict::No;
        out.failing_condition = "first extension space of transported module " +
                                std::to_string(i) + " against family member " +
                                std::to_string(j) + " has dimension " + std::to_string(ed);
        return out;
      }
    }
  out.closure = verify_ess(out.family, q, ord, limits);
  out.exists = out.closure->passed;
  out.verdict = out.closure->verdict;
  if (!out.exists) out.failing_condition = "re-verification failed: " + first_failure(*out.closure);
  return out;
}

TiltingReport is_characteristic_tilting(const EndoTransferContext& ctx, const LinearOrder& ord,
                                        const SearchLimits& limits) {
  TiltingReport rep;
  LinearOrder rev = reversed_order(ord);
  rep.prerequisite = is_standardly_stratified(ctx.gamma_op, rev, limits);
  if (rep.prerequisite.verdict != Verdict::Yes) {
    rep.verdict = rep.prerequisite.verdict;
    rep.failing_conjunct = "stratification-prerequisite";
    return rep;
  }
  const auto& delta = rep.prerequisite.families.delta;
  rep.membership = filtration_membership(ctx.q_bimodule, delta, rev, limits);
  for (std::size_t i = 0; i < delta.size(); ++i)
    rep.ext_dims.push_back(ext1_dim(delta[i], ctx.q_bimodule));

  Verdict count_verdict = Verdict::Undecided;
  Decomposition dec = decompose(ctx.q_bimodule, limits);
  if (dec.verdict == Verdict::Yes) {
    count_verdict = Verdict::Yes;
    std::vector<std::size_t> classes;
    for (std::size_t s = 0; s < dec.summands.size(); ++s) {
      bool matched = false;
      for (std::size_t r : classes) {
        Verdict iso = is_isomorphic(dec.summands[s], dec.summands[r], limits);
        if (iso == Verdict::Yes) {
          matched = true;
          break;
        }
        if (iso == Verdict::Undecided) count_verdict = Verdict::Undecided;
      }
      if (!matched) classes.push_back(s);
    }
    rep.summand_count = classes.size();
  }

  Verdict filt = membership_verdict(rep.membership);
  Verdict ext = Verdict::Yes;
  for (std::size_t d : rep.ext_dims)
    if (d != 0) ext = Verdict::No;
  Verdict count = count_verdict == Verdict::Yes
                      ? (rep.summand_count == ctx.qfamily.size() ? Verdict::Yes : Verdict::No)
                      : Verdict::Undecided;

  const std::pair<Verdict, const char*> conjuncts[] = {
      {filt, "standard-filtration"}, {ext, "ext-orthogonality"}, {count, "summand-count"}};
  for (const auto& [v, name] : conjuncts)
    if (v == Verdict::No) {
      rep.verdict = Verdict::No;
      rep.failing_conjunct = name;
      return rep;
    }
  for (const auto& [v, name] : conjuncts)
    if (v == Verdict::Undecided) {
      rep.verdict = Verdict::Undecided;
      rep.failing_conjunct = name;
      return rep;
    }
  rep.verdict = Verdict::Yes;
  rep.value = true;
  return rep;
}

namespace {

struct AddApproximation {
  Module q0;
  Morphism map;
};

AddApproximation right_add_approximation(const EndoTransferContext& ctx, const Module& x) {
  std::vector<Module> parts;
  std::vector<Morphism> maps;
  for (std::size_t a = 0; a < ctx.qfamily.size(); ++a)
    for (Morphism& f : hom_space(ctx.qfamily[a], x)) {
      parts.push_back(ctx.qfamily[a]);
      maps.push_back(std::move(f));
    }
  AddApproximation ap;
  if (parts.empty()) {
    ap.q0 = zero_module_over(ctx.lambda);
    ap.map = zero_morphism(ap.q0, x);
    return ap;
  }
  std::vector<Morphism> inj, proj;
  ap.q0 = direct_sum(parts, &inj, &proj);
  ap.map = zero_morphism(ap.q0, x);
  for (std::size_t k = 0; k < maps.size(); ++k)
    ap.map = morphism_add(ap.map, compose(maps[k], proj[k]));
  return ap;
}

AddApproximation left_add_approximation(const EndoTransferContext& ctx, const Module& x) {
  std::vector<Module> parts;
  std::vector<Morphism> maps;
  for (std::size_t b = 0; b < ctx.qfamily.size(); ++b)
    for (Morphism& g : hom_space(x, ctx.qfamily[b])) {
      parts.push_back(ctx.qfamily[b]);
      maps.push_back(std::move(g));
    }
  AddApproximation ap;
  if (parts.empty()) {
    ap.q0 = zero_module_over(ctx.lambda);
    ap.map = zero_morphism(x, ap.q0);
    return ap;
  }
  std::vector<Morphism> inj, proj;
  ap.q0 = direct_sum(parts, &inj, &proj);
  ap.map = zero_morphism(x, ap.q0);
  for (std::size_t k = 0; k < maps.size(); ++k)
    ap.map = morphism_add(ap.map, compose(inj[k], maps[k]));
  return ap;
}

}  // namespace

C2Result c2_class_membership(const EndoTransferContext& ctx, const Module& x,
                             C2Direction direction) {
  require_over("c2_class_membership", x, ctx.lambda);
  C2Result res;
  if (direction == C2Direction::Wedge) {
    AddApproximation a0 = right_add_approximation(ctx, x);
    if (!is_surjective_morphism(a0.map)) {
      res.verdict = Verdict::No;
      res.note = "stage 0: the canonical approximation does not cover the module";
      return res;
    }
    Morphism inc;
    Module k = kernel_module(a0.map, &inc);
    AddApproximation a1 = right_add_approximation(ctx, k);
    if (!is_surjective_morphism(a1.map)) {
      res.verdict = Verdict::No;
      res.note = "stage 1: the kernel of the approximation is not covered by the family";
      return res;
    }
    Morphism d = compose(inc, a1.map);
    Module fq1 = apply_F(ctx, a1.q0), fq0 = apply_F(ctx, a0.q0), fx = apply_F(ctx, x);
    Morphism fd = apply_F_morphism(ctx, d, fq1, fq0);
    Morphism fe = apply_F_morphism(ctx, a0.map, fq0, fx);
    if (!is_surjective_morphism(fe))
      throw InvariantError("transferred resolution lost surjectivity");
    Submodule im = image_submodule(fd), ker = kernel_submodule(fe);
    if (!submodule_contains_sub(ker, im) || !submodule_contains_sub(im, ker))
      throw InvariantError("transferred resolution is not exact in the middle");
    res.verdict = Verdict::Yes;
    res.outer = std::move(a0.map);
    res.inner = std::move(d);
    res.note = "two-step resolution by the family; exactness of the transferred sequence "
               "recomputed";
    return res;
  }
  AddApproximation a0 = left_add_approximation(ctx, x);
  if (!is_injective_morphism(a0.map)) {
    res.verdict = Verdict::No;
    res.note = "stage 0: the module does not embed into a sum from the family";
    return res;
  }
  Morphism pr;
  Module c = cokernel_module(a0.map, &pr);
  AddApproximation a1 = left_add_approximation(ctx, c);
  if (!is_injective_morphism(a1.map)) {
    res.verdict = Verdict::No;
    res.note = "stage 1: the cokernel does not embed into a sum from the family";
    return res;
  }
  Morphism d = compose(a1.map, pr);
  Module fb1 = apply_Fbar(ctx, a1.q0), fb0 = apply_Fbar(ctx, a0.q0), fbx = apply_Fbar(ctx, x);
  Morphism fbd = apply_Fbar_morphism(ctx, d, fb1, fb0);
  Morphism fbe = apply_Fbar_morphism(ctx, a0.map, fb0, fbx);
  if (!is_surjective_morphism(fbe))
    throw InvariantError("transferred coresolution lost surjectivity");
  Submodule im = image_submodule(fbd), ker = kernel_submodule(fbe);
  if (!submodule_contains_sub(ker, im) || !submodule_contains_sub(im, ker))
    throw InvariantError("transferred coresolution is not exact in the middle");
  res.verdict = Verdict::Yes;
  res.outer = std::move(a0.map);
  res.inner = std::move(d);
  res.note = "two-step coresolution by the family; exactness of the transferred sequence "
             "recomputed";
  return res;
}

std::vector<std::pair<std::size_t, std::size_t>> ext_tor_bridge(const EndoTransferContext& ctx,
                                                                const LinearOrder& ord) {
  LinearOrder rev = reversed_order(ord);
  StratifiedFamilies on_gamma = stratified_families(ctx.gamma, rev);
  StratifiedFamilies on_op = stratified_families(ctx.gamma_op, rev);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < ctx.qfamily.size(); ++i)
    out.push_back({ext1_dim(ctx.q_bimodule, on_op.nabla_bar[i]),
                   tor1_dim(ctx.q_bimodule, on_gamma.delta_bar[i])});
  return out;
}

Quiver gabriel_quiver(const AlgebraPtr& a) {
  Quiver q;
  q.num_vertices = a->num_idempotents;
  for (std::size_t i = 0; i < a->num_idempotents; ++i) {
    Module p = projective_module(a, i);
    Submodule rad = radical_submodule(p);
    auto [radm, inc] = submodule_to_module(p, rad);
    Submodule rad2 = push_submodule(inc, radical_submodule(radm));
    auto r1 = rad.ranks();
    auto r2 = rad2.ranks();
    for (std::size_t j = 0; j < a->num_idempotents; ++j)
      for (std::size_t n = 0; n + r2[j] < r1[j]; ++n)
        q.arrows.push_back({"a" + std::to_string(i) + "_" + std::to_string(j) +
                                (r1[j] - r2[j] > 1 ? "_" + std::to_string(n) : ""),
                            i, j});
  }
  return q;
}

}  // namespace strata
