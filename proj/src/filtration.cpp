#include "strata/filtration.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace strata {

namespace {

// Retargets a morphism onto an identically presented module.
Morphism retarget(Morphism f, const Module& tgt) {
  if (!same_module(f.tgt, tgt))
    throw InvariantError("retarget: target presentations differ");
  f.tgt = tgt;
  return f;
}

// Rows indexed by the non-pivot columns of u: reduce a vector by the RREF
// rows of u and read off its complement coordinates.
Matrix reduction_projection(const Field& fld, const Matrix& u_rows, std::size_t dim) {
  Echelon e = rref(u_rows);
  std::vector<char> is_pivot(dim, 0);
  for (std::size_t p : e.pivots) is_pivot[p] = 1;
  std::vector<std::size_t> np;
  for (std::size_t c = 0; c < dim; ++c)
    if (!is_pivot[c]) np.push_back(c);
  Matrix p(fld, np.size(), dim);
  for (std::size_t i = 0; i < np.size(); ++i) {
    p.at(i, np[i]) = Scalar::one(fld);
    for (std::size_t r = 0; r < e.pivots.size(); ++r)
      p.at(i, e.pivots[r]) = Scalar::zero(fld) - e.basis.at(r, np[i]);
  }
  return p;
}

// Linear section of a surjective morphism, if one exists in the hom space.
std::optional<Morphism> solve_section(const Morphism& surj) {
  const Module& b = surj.tgt;
  if (b.is_zero()) return zero_morphism(b, surj.src);
  std::vector<Morphism> homs = hom_space(b, surj.src);
  if (homs.empty()) return std::nullopt;
  std::vector<Morphism> comps;
  comps.reserve(homs.size());
  for (const Morphism& h : homs) comps.push_back(compose(surj, h));
  Matrix rows = stack_morphism_entries(b.field(), comps);
  auto coords = coordinates_in_rows(rows, morphism_entries_row(identity_morphism(b)));
  if (!coords) return std::nullopt;
  Morphism s = zero_morphism(b, surj.src);
  for (std::size_t i = 0; i < homs.size(); ++i)
    s = morphism_add(s, morphism_scale(homs[i], coords->at(0, i)));
  return s;
}

// Isomorphism between the step factors of two chains linked by t: x -> z
// with t(lo_x) inside lo_z and t inducing a bijection up_x/lo_x -> up_z/lo_z.
Morphism factor_iso_along(const Module& x, const Submodule& lo_x, const Submodule& up_x,
                          const Module& z, const Submodule& lo_z, const Submodule& up_z,
                          const Morphism& t) {
  FactorPresentation fx = filtration_factor(x, lo_x, up_x);
  FactorPresentation fz = filtration_factor(z, lo_z, up_z);
  Morphism rho = descend_through_quotient(x, lo_x, fx.quotient, fx.project,
                                          compose(fz.project, t));
  Morphism phi = factor_through_inclusion(fz.include, compose(rho, fx.include));
  if (!is_isomorphism_morphism(phi))
    throw InvariantError("filtration transport: step factor map is not an isomorphism");
  return phi;
}

// 1 + p + ... + p^{h-1}, saturating at cap + 1.
std::uint64_t ray_count(std::uint64_t p, std::size_t h, std::uint64_t cap) {
  std::uint64_t n = 0, power = 1;
  for (std::size_t k = 0; k < h; ++k) {
    if (n > cap - std::min(cap, power)) return cap + 1;
    n += power;
    if (k + 1 < h) {
      if (power > cap / p) return cap + 1;
      power *= p;
    }
  }
  return n;
}

struct MembershipSearch {
  const Module& x;
  const std::vector<Module>& family;
  const LinearOrder& ord;
  std::uint64_t remaining;
  Rng rng;

  std::vector<std::size_t> stride;
  std::vector<char> reachable;
  std::map<std::string, bool> failed;  // quotient bytes -> subtree was exhaustive

  std::vector<Submodule> chain;
  std::vector<std::size_t> picked;
  std::vector<Morphism> monos;

  MembershipSearch(const Module& x_, const std::vector<Module>& fam,
                   const LinearOrder& ord_, const SearchLimits& limits)
      : x(x_), family(fam), ord(ord_), remaining(limits.budget), rng(limits.seed) {
    build_tiling();
    chain.push_back(zero_submodule(x));
  }

  void build_tiling() {
    const std::size_t nv = x.dims.size();
    stride.assign(nv, 1);
    std::size_t total = 1;
    for (std::size_t v = 0; v < nv; ++v) {
      stride[v] = total;
      total *= x.dims[v] + 1;
    }
    reachable.assign(total, 0);
    reachable[0] = 1;
    std::vector<std::size_t> d(nv, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      // decode idx
      std::size_t rem = idx;
      for (std::size_t v = 0; v < nv; ++v) {
        d[v] = rem % (x.dims[v] + 1);
        rem /= x.dims[v] + 1;
      }
      if (!reachable[idx]) continue;
      for (const Module& th : family) {
        bool ok = true;
        std::size_t nidx = idx;
        for (std::size_t v = 0; v < nv; ++v) {
          if (d[v] + th.dims[v] > x.dims[v]) {
            ok = false;
            break;
          }
          nidx += th.dims[v] * stride[v];
        }
        if (ok) reachable[nidx] = 1;
      }
    }
  }

  bool tile_ok(const std::vector<std::size_t>& dims) const {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < dims.size(); ++v) idx += dims[v] * stride[v];
    return reachable[idx] != 0;
  }

  // Tries one candidate combination; true when the branch below succeeded.
  bool try_candidate(const Module& y, const Morphism& pr, std::size_t j,
                     const std::vector<Morphism>& homs,
                     const std::vector<Scalar>& coeffs,
                     std::set<std::string>& seen, bool& complete) {
    Morphism m = zero_morphism(family[j], y);
    for (std::size_t k = 0; k < homs.size(); ++k)
      if (!coeffs[k].is_zero()) m = morphism_add(m, morphism_scale(homs[k], coeffs[k]));
    if (!is_injective_morphism(m)) return false;
    Submodule u = image_submodule(m);
    std::string image_key = submodule_total_rows(y, u).to_bytes();
    if (!seen.insert(std::to_string(j) + "|" + image_key).second) return false;
    Submodule lifted = preimage_submodule(pr, u);
    chain.push_back(lifted);
    picked.push_back(j);
    monos.push_back(m);
    bool child_complete = true;
    if (dfs(child_complete)) return true;
    complete = complete && child_complete;
    chain.pop_back();
    picked.pop_back();
    monos.pop_back();
    return false;
  }

  bool dfs(bool& complete) {
    complete = true;
    auto [y, pr] = quotient_by_submodule(x, chain.back());
    if (y.is_zero()) return true;
    std::string key = y.to_bytes();
    auto it = failed.find(key);
    if (it != failed.end()) {
      complete = it->second;
      return false;
    }
    if (!tile_ok(y.dims)) {
      failed[key] = true;
      return false;
    }
    const Field& fld = x.field();
    std::set<std::string> seen;
    for (std::size_t pos = 0; pos < ord.size(); ++pos) {
      std::size_t j = ord.order[pos];
      const Module& th = family[j];
      bool fits = true;
      for (std::size_t v = 0; v < th.dims.size(); ++v)
        if (th.dims[v] > y.dims[v]) {
          fits = false;
          break;
        }
      if (!fits) continue;
      std::vector<Morphism> homs = hom_space(th, y);
      const std::size_t h = homs.size();
      if (h == 0) continue;
      std::vector<Scalar> coeffs(h, Scalar::zero(fld));
      if (h == 1) {
        // A single ray: exhaustive over any field.
        if (remaining == 0) {
          complete = false;
          continue;
        }
        --remaining;
        coeffs[0] = Scalar::one(fld);
        if (try_candidate(y, pr, j, homs, coeffs, seen, complete)) return true;
        continue;
      }
      std::uint64_t rays = fld.kind == FieldKind::Prime
                               ? ray_count(fld.modulus, h, remaining)
                               : remaining + 1;
      if (rays <= remaining) {
        // Full enumeration over rays: leading coefficient 1, lex tail.
        for (std::size_t lead = 0; lead < h; ++lead) {
          for (std::size_t k = 0; k < h; ++k) coeffs[k] = Scalar::zero(fld);
          coeffs[lead] = Scalar::one(fld);
          const std::size_t tail = h - 1 - lead;
          std::vector<std::uint64_t> odo(tail, 0);
          bool more = true;
          while (more) {
            for (std::size_t k = 0; k < tail; ++k)
              coeffs[lead + 1 + k] = Scalar::of_int(fld, (long long)odo[k]);
            --remaining;
            if (try_candidate(y, pr, j, homs, coeffs, seen, complete)) return true;
            more = false;
            for (std::size_t k = tail; k-- > 0;) {
              if (++odo[k] < fld.modulus) {
                more = true;
                break;
              }
              odo[k] = 0;
            }
          }
        }
      } else {
        // Seeded sampling; the subtree is no longer exhaustive.
        complete = false;
        std::uint64_t samples = std::min<std::uint64_t>(remaining, 512);
        for (std::uint64_t n = 0; n < samples; ++n) {
          --remaining;
          bool any = false;
          for (std::size_t k = 0; k < h; ++k) {
            coeffs[k] = fld.kind == FieldKind::Prime
                            ? Scalar::of_int(fld, (long long)rng.below(fld.modulus))
                            : Scalar::of_int(fld, (long long)rng.below(7) - 3);
            any = any || !coeffs[k].is_zero();
          }
          if (!any) coeffs[rng.below(h)] = Scalar::one(fld);
          if (try_candidate(y, pr, j, homs, coeffs, seen, complete)) return true;
        }
      }
    }
    failed[key] = complete;
    return false;
  }

  FiltrationCertificate build_certificate() const {
    FiltrationCertificate c;
    c.x = x;
    c.chain = chain;
    for (std::size_t k = 0; k < picked.size(); ++k) {
      FactorPresentation fp = filtration_factor(x, chain[k], chain[k + 1]);
      Morphism m = retarget(monos[k], fp.quotient);
      c.factors.push_back({picked[k], factor_through_inclusion(fp.include, m)});
    }
    c.ordered = true;
    for (std::size_t k = 0; k + 1 < c.factors.size(); ++k)
      if (ord.rank[c.factors[k].family_index] > ord.rank[c.factors[k + 1].family_index])
        c.ordered = false;
    return c;
  }
};

void validate_family(const Module& x, const std::vector<Module>& family,
                     const LinearOrder& ord) {
  if (ord.size() != family.size())
    throw InputError("filtration: order size does not match the family size");
  for (const Module& th : family) {
    if (!algebras_compatible(x.alg, th.alg))
      throw InputError("filtration: family member over a different algebra");
    if (th.is_zero()) throw InputError("filtration: family members must be nonzero");
  }
}

}  // namespace

LinearOrder LinearOrder::natural(std::size_t t) {
  LinearOrder o;
  o.order.resize(t);
  o.rank.resize(t);
  for (std::size_t i = 0; i < t; ++i) o.order[i] = o.rank[i] = i;
  return o;
}

LinearOrder LinearOrder::of_positions(std::vector<std::size_t> order) {
  LinearOrder o;
  o.order = std::move(order);
  o.rank.assign(o.order.size(), o.order.size());
  for (std::size_t k = 0; k < o.order.size(); ++k) {
    if (o.order[k] >= o.order.size() || o.rank[o.order[k]] != o.order.size())
      throw InputError("LinearOrder: not a permutation");
    o.rank[o.order[k]] = k;
  }
  return o;
}

FactorPresentation filtration_factor(const Module& x, const Submodule& lower,
                                     const Submodule& upper) {
  FactorPresentation fp;
  auto [q, pr] = quotient_by_submodule(x, lower);
  fp.quotient = q;
  fp.project = pr;
  Submodule pushed = push_submodule(pr, upper);
  auto [f, inc] = submodule_to_module(q, pushed);
  fp.factor = f;
  fp.include = inc;
  return fp;
}

Submodule push_submodule(const Morphism& f, const Submodule& s) {
  Submodule out;
  for (std::size_t v = 0; v < f.mats.size(); ++v)
    out.rows.push_back(row_space(s.rows[v] * f.mats[v].transpose()));
  return out;
}

Submodule preimage_submodule(const Morphism& f, const Submodule& u) {
  const Field& fld = f.src.field();
  Submodule out;
  for (std::size_t v = 0; v < f.mats.size(); ++v) {
    Matrix p = reduction_projection(fld, u.rows[v], f.tgt.dims[v]);
    out.rows.push_back(row_space(kernel_basis(p * f.mats[v])));
  }
  return out;
}

void verify_certificate(const FiltrationCertificate& c, const std::vector<Module>& family,
                        const LinearOrder* ord) {
  c.x.check_valid();
  if (c.chain.empty() || c.chain.size() != c.factors.size() + 1)
    throw InvariantError("filtration certificate: chain and factor counts disagree");
  const std::size_t nv = c.x.dims.size();
  if (c.chain.front().total_rank() != 0)
    throw InvariantError("filtration certificate: chain does not start at zero");
  std::vector<std::size_t> top = c.chain.back().ranks();
  for (std::size_t v = 0; v < nv; ++v)
    if (top[v] != c.x.dims[v])
      throw InvariantError("filtration certificate: chain does not end at the full module");
  for (const Submodule& s : c.chain) {
    if (s.rows.size() != nv)
      throw InvariantError("filtration certificate: graded piece count mismatch");
    Matrix rows = submodule_total_rows(c.x, s);
    if (submodule_closure(c.x, rows).total_rank() != s.total_rank())
      throw InvariantError("filtration certificate: chain link is not action-stable");
  }
  for (std::size_t k = 0; k + 1 < c.chain.size(); ++k) {
    if (!submodule_contains_sub(c.chain[k + 1], c.chain[k]))
      throw InvariantError("filtration certificate: chain is not nested");
    if (c.chain[k + 1].total_rank() <= c.chain[k].total_rank())
      throw InvariantError("filtration certificate: chain is not strictly increasing");
  }
  for (std::size_t k = 0; k < c.factors.size(); ++k) {
    const FactorWitness& w = c.factors[k];
    if (w.family_index >= family.size())
      throw InvariantError("filtration certificate: factor index out of range");
    FactorPresentation fp = filtration_factor(c.x, c.chain[k], c.chain[k + 1]);
    if (!same_module(w.iso.src, family[w.family_index]) || !same_module(w.iso.tgt, fp.factor))
      throw InvariantError("filtration certificate: witness endpoints disagree");
    w.iso.check_valid();
    if (!is_isomorphism_morphism(w.iso))
      throw InvariantError("filtration certificate: factor witness is not an isomorphism");
  }
  if (c.ordered) {
    if (!ord) throw InputError("verify_certificate: ordered certificate needs the order");
    for (std::size_t k = 0; k + 1 < c.factors.size(); ++k)
      if (ord->rank[c.factors[k].family_index] > ord->rank[c.factors[k + 1].family_index])
        throw InvariantError("filtration certificate: factors are not ordered");
  }
}

std::string membership_status_string(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::Filtered: return "filtered";
    case MembershipStatus::NotFiltered: return "not filtered";
    default: return "undecided";
  }
}

MembershipResult filtration_membership(const Module& x, const std::vector<Module>& family,
                                       const LinearOrder& ord, const SearchLimits& limits) {
  x.check_valid();
  validate_family(x, family, ord);
  MembershipResult res;
  if (x.is_zero()) {
    FiltrationCertificate c;
    c.x = x;
    c.chain.push_back(zero_submodule(x));
    c.ordered = true;
    verify_certificate(c, family, &ord);
    res.status = MembershipStatus::Filtered;
    res.certificate = std::move(c);
    res.note = "zero module";
    return res;
  }
  MembershipSearch search(x, family, ord, limits);
  if (!search.tile_ok(x.dims)) {
    res.status = MembershipStatus::NotFiltered;
    res.note = "family dimension vectors cannot tile the module's dimension vector";
    return res;
  }
  bool complete = true;
  if (search.dfs(complete)) {
    FiltrationCertificate c = search.build_certificate();
    verify_certificate(c, family, &ord);
    res.status = MembershipStatus::Filtered;
    res.certificate = std::move(c);
    res.note = "bottom-up search";
    return res;
  }
  if (complete) {
    res.status = MembershipStatus::NotFiltered;
    res.note = "mono search space exhausted";
  } else {
    res.status = MembershipStatus::Undecided;
    std::ostringstream os;
    os << "mono search truncated (budget left: " << search.remaining << ")";
    res.note = os.str();
  }
  return res;
}

namespace {

void swap_adjacent(FiltrationCertificate& c, std::size_t k) {
  const Module& x = c.x;
  const Submodule& lo = c.chain[k];
  const Submodule& hi = c.chain[k + 2];
  const std::size_t ia = c.factors[k].family_index;
  const std::size_t ib = c.factors[k + 1].family_index;
  FactorPresentation fa = filtration_factor(x, lo, c.chain[k + 1]);
  FactorPresentation fw = filtration_factor(x, lo, hi);
  FactorPresentation fb = filtration_factor(x, c.chain[k + 1], hi);
  // The two-step extension 0 -> F_a -> W -> F_b -> 0.
  Morphism inj0 = factor_through_inclusion(fw.include, fa.include);
  Morphism rho = descend_through_quotient(x, lo, fa.quotient, fa.project, fb.project);
  Morphism surj0 = factor_through_inclusion(fb.include, compose(rho, fw.include));
  ShortExactSequence two{inj0, surj0};
  two.check_valid();
  std::optional<Morphism> section = solve_section(surj0);
  if (!section) {
    std::ostringstream os;
    os << "reorder_filtration: extension of family[" << ib << "] by family[" << ia
       << "] does not split; offending pair (" << ia << ", " << ib << ")";
    throw HypothesisViolation(os.str());
  }
  Morphism emb = compose(fw.include, *section);  // F_b -> x/lo
  Submodule new_mid = preimage_submodule(fw.project, image_submodule(emb));
  FactorPresentation ga = filtration_factor(x, lo, new_mid);
  Morphism new_wa = factor_through_inclusion(
      ga.include, retarget(compose(emb, c.factors[k + 1].iso), ga.quotient));
  FactorPresentation gb = filtration_factor(x, new_mid, hi);
  Morphism rho2 = descend_through_quotient(x, lo, fa.quotient, fa.project, gb.project);
  Morphism new_wb = factor_through_inclusion(
      gb.include, compose(rho2, compose(fa.include, c.factors[k].iso)));
  if (!is_isomorphism_morphism(new_wa) || !is_isomorphism_morphism(new_wb))
    throw InvariantError("reorder_filtration: swapped factor witness is not an isomorphism");
  c.chain[k + 1] = new_mid;
  c.factors[k] = {ib, new_wa};
  c.factors[k + 1] = {ia, new_wb};
}

}  // namespace

FiltrationCertificate reorder_filtration(const FiltrationCertificate& c,
                                         const std::vector<Module>& family,
                                         const LinearOrder& ord) {
  FiltrationCertificate out = c;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k + 1 < out.factors.size(); ++k) {
      if (ord.rank[out.factors[k].family_index] <=
          ord.rank[out.factors[k + 1].family_index])
        continue;
      swap_adjacent(out, k);
      changed = true;
    }
  }
  out.ordered = true;
  verify_certificate(out, family, &ord);
  return out;
}

FiltrationCertificate ordered_certificate(const Module& x, const std::vector<Module>& family,
                                          const LinearOrder& ord, const SearchLimits& limits) {
  MembershipResult r = filtration_membership(x, family, ord, limits);
  if (r.status != MembershipStatus::Filtered)
    throw InputError("module is not certified filtered (" +
                     membership_status_string(r.status) + ": " + r.note + ")");
  if (r.certificate->ordered) return *r.certificate;
  return reorder_filtration(*r.certificate, family, ord);
}

std::size_t min_index(const Module& x, const std::vector<Module>& family,
                      const LinearOrder& ord, const SearchLimits& limits) {
  FiltrationCertificate oc = ordered_certificate(x, family, ord, limits);
  if (oc.length() == 0)
    throw InputError("min_index: the zero module has no bottom factor");
  return oc.factors[0].family_index;
}

PeelResult peel_bottom(const Module& x, const std::vector<Module>& family,
                       const LinearOrder& ord, const SearchLimits& limits) {
  FiltrationCertificate oc = ordered_certificate(x, family, ord, limits);
  if (oc.length() == 0)
    throw InputError("peel_bottom: the zero module has no bottom layer");
  PeelResult out;
  out.bottom_index = oc.factors[0].family_index;
  FactorPresentation f1 = filtration_factor(x, oc.chain[0], oc.chain[1]);
  auto pr0_inv = inverse_morphism(f1.project);  // quotient by zero is invertible
  if (!pr0_inv)
    throw InvariantError("peel_bottom: projection along the zero submodule not invertible");
  Morphism inj = compose(*pr0_inv, compose(f1.include, oc.factors[0].iso));
  auto [xp, pi] = quotient_by_submodule(x, oc.chain[1]);
  out.sequence = ShortExactSequence{inj, pi};
  out.sequence.check_valid();

  FiltrationCertificate rest;
  rest.x = xp;
  for (std::size_t k = 1; k < oc.chain.size(); ++k)
    rest.chain.push_back(push_submodule(pi, oc.chain[k]));
  for (std::size_t k = 1; k < oc.factors.size(); ++k) {
    Morphism phi = factor_iso_along(x, oc.chain[k], oc.chain[k + 1], xp,
                                    rest.chain[k - 1], rest.chain[k], pi);
    rest.factors.push_back({oc.factors[k].family_index,
                            compose(phi, oc.factors[k].iso)});
  }
  rest.ordered = true;
  verify_certificate(rest, family, &ord);
  if (rest.length() + 1 != oc.length())
    throw InvariantError("peel_bottom: peeled certificate has the wrong length");
  if (rest.length() > 0 &&
      ord.rank[rest.factors[0].family_index] < ord.rank[out.bottom_index])
    throw InvariantError("peel_bottom: bottom index decreased after peeling");
  out.rest = std::move(rest);
  return out;
}

FiltrationCertificate splice_certificates(const ShortExactSequence& s,
                                          const FiltrationCertificate& sub,
                                          const FiltrationCertificate& quot,
                                          const std::vector<Module>& family) {
  s.check_valid();
  if (!same_module(sub.x, s.inj.src) || !same_module(quot.x, s.surj.tgt))
    throw InputError("splice_certificates: certificates do not match the sequence ends");
  const Module& x = s.inj.tgt;
  FiltrationCertificate out;
  out.x = x;
  for (const Submodule& t : sub.chain) out.chain.push_back(push_submodule(s.inj, t));
  for (std::size_t k = 1; k < quot.chain.size(); ++k)
    out.chain.push_back(preimage_submodule(s.surj, quot.chain[k]));
  for (std::size_t k = 0; k < sub.factors.size(); ++k) {
    Morphism phi = factor_iso_along(sub.x, sub.chain[k], sub.chain[k + 1], x,
                                    out.chain[k], out.chain[k + 1], s.inj);
    out.factors.push_back({sub.factors[k].family_index,
                           compose(phi, sub.factors[k].iso)});
  }
  const std::size_t off = sub.length();
  for (std::size_t k = 0; k < quot.factors.size(); ++k) {
    Morphism phi = factor_iso_along(x, out.chain[off + k], out.chain[off + k + 1],
                                    quot.x, quot.chain[k], quot.chain[k + 1], s.surj);
    auto inv = inverse_morphism(phi);
    if (!inv)
      throw InvariantError("splice_certificates: factor comparison is not invertible");
    out.factors.push_back({quot.factors[k].family_index,
                           compose(*inv, quot.factors[k].iso)});
  }
  out.ordered = false;
  verify_certificate(out, family, nullptr);
  return out;
}

KernelChainResult kernel_chain_certificate(const std::vector<Morphism>& epis,
                                           const std::vector<Module>& family,
                                           const LinearOrder& ord,
                                           const SearchLimits& limits) {
  if (epis.empty()) throw InputError("kernel_chain_certificate: empty chain");
  for (std::size_t j = 0; j < epis.size(); ++j) {
    epis[j].check_valid();
    if (!is_surjective_morphism(epis[j]))
      throw InputError("kernel_chain_certificate: chain member is not surjective");
    if (j > 0 && !same_module(epis[j].tgt, epis[j - 1].src))
      throw InputError("kernel_chain_certificate: chain members do not compose");
  }
  KernelChainResult out;
  Morphism gamma = epis[0];
  Morphism inc;
  Module kernel = kernel_module(gamma, &inc);
  MembershipResult base = filtration_membership(kernel, family, ord, limits);
  if (base.status != MembershipStatus::Filtered) {
    out.status = base.status;
    out.kernel = kernel;
    out.inclusion = inc;
    out.note = "stage 0 kernel: " + base.note;
    return out;
  }
  FiltrationCertificate cert = *base.certificate;
  for (std::size_t j = 1; j < epis.size(); ++j) {
    Morphism prev_inc = inc;
    gamma = compose(gamma, epis[j]);
    kernel = kernel_module(gamma, &inc);
    Morphism step_inc;
    Module step_kernel = kernel_module(epis[j], &step_inc);
    MembershipResult stage = filtration_membership(step_kernel, family, ord, limits);
    if (stage.status != MembershipStatus::Filtered) {
      out.status = stage.status;
      out.kernel = kernel;
      out.inclusion = inc;
      std::ostringstream os;
      os << "stage " << j << " kernel: " << stage.note;
      out.note = os.str();
      return out;
    }
    // 0 -> ker(epis[j]) -> ker(gamma_j) -> ker(gamma_{j-1}) -> 0.
    Morphism lower = factor_through_inclusion(inc, step_inc);
    Morphism delta = factor_through_inclusion(prev_inc, compose(epis[j], inc));
    ShortExactSequence ses{lower, delta};
    ses.check_valid();
    cert = splice_certificates(ses, *stage.certificate, cert, family);
  }
  out.status = MembershipStatus::Filtered;
  out.kernel = kernel;
  out.inclusion = inc;
  out.certificate = std::move(cert);
  out.note = "spliced stage kernels";
  return out;
}

}  // namespace strata
