#include "strata/systems.hpp"

#include "strata/homology.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace strata {
namespace {

std::string dims_string(const std::vector<std::size_t>& dims) {
  std::ostringstream os;
  os << "(";
  for (std::size_t v = 0; v < dims.size(); ++v) os << (v ? "," : "") << dims[v];
  os << ")";
  return os.str();
}

// Worst verdict wins: No over Undecided over Yes.
Verdict worse(Verdict a, Verdict b) {
  if (a == Verdict::No || b == Verdict::No) return Verdict::No;
  if (a == Verdict::Undecided || b == Verdict::Undecided) return Verdict::Undecided;
  return Verdict::Yes;
}

void finalize_verdict(SystemVerdict& sv) {
  sv.verdict = Verdict::Yes;
  for (const AxiomResult& r : sv.axioms) sv.verdict = worse(sv.verdict, r.verdict);
  sv.passed = sv.verdict == Verdict::Yes;
}

std::string first_failure(const SystemVerdict& sv) {
  for (const AxiomResult& r : sv.axioms)
    if (r.verdict != Verdict::Yes) return "axiom '" + r.axiom + "': " + r.detail;
  return "no failing axiom";
}

void check_family_input(const std::string& who, const std::vector<Module>& family,
                        const LinearOrder& ord) {
  if (ord.size() != family.size())
    throw InputError(who + ": order size " + std::to_string(ord.size()) +
                     " does not match family size " + std::to_string(family.size()));
  for (const Module& m : family) {
    m.check_valid();
    if (!algebras_compatible(family.front().alg, m.alg))
      throw InputError(who + ": family members live over different algebras");
  }
}

// Number of scalar rays (one-dimensional subspaces) of an h-dimensional
// space over F_p, saturated at cap + 1 once it exceeds cap.
std::uint64_t ray_count_fp(std::uint64_t p, std::size_t h, std::uint64_t cap) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < h; ++i) {
    if (r > (cap - 1) / p) return cap + 1;
    r = r * p + 1;
    if (r > cap) return cap + 1;
  }
  return r;
}

// Visits nonzero coefficient vectors of length h.  Over a prime field, when
// the ray count fits the budget, every scalar ray is visited exactly once
// (leading coefficient one) and the sweep is exhaustive for any property
// invariant under scaling.  Otherwise min(budget, 512) seeded random nonzero
// vectors are visited.  Returns true iff the candidate pool was the complete
// ray set; fn returning true stops the sweep early.
bool for_each_ray(const Field& field, std::size_t h, const SearchLimits& limits,
                  const std::function<bool(const std::vector<Scalar>&)>& fn) {
  if (h == 0) return true;
  std::vector<Scalar> coeffs(h, Scalar::zero(field));
  if (field.kind == FieldKind::Prime && limits.budget > 0 &&
      ray_count_fp(field.modulus, h, limits.budget) <= limits.budget) {
    for (std::size_t lead = 0; lead < h; ++lead) {
      const std::size_t free_count = h - 1 - lead;
      std::vector<std::uint32_t> digits(free_count, 0);
      while (true) {
        for (std::size_t t = 0; t < h; ++t) coeffs[t] = Scalar::zero(field);
        coeffs[lead] = Scalar::one(field);
        for (std::size_t t = 0; t < free_count; ++t)
          coeffs[lead + 1 + t] = Scalar::of_int(field, digits[t]);
        if (fn(coeffs)) return true;
        std::size_t t = 0;
        while (t < free_count && ++digits[t] == field.modulus) digits[t++] = 0;
        if (t == free_count) break;
      }
    }
    return true;
  }
  if (field.kind == FieldKind::Rationals && h == 1) {
    coeffs[0] = Scalar::one(field);
    fn(coeffs);
    return true;
  }
  Rng rng(limits.seed);
  const std::uint64_t trials = std::min<std::uint64_t>(limits.budget, 512);
  for (std::uint64_t t = 0; t < trials; ++t) {
    bool nonzero = false;
    for (std::size_t i = 0; i < h; ++i) {
      coeffs[i] = rng.scalar(field);
      nonzero = nonzero || !coeffs[i].is_zero();
    }
    if (!nonzero) coeffs[rng.below(h)] = rng.nonzero_scalar(field);
    if (fn(coeffs)) return false;
  }
  return false;
}

Morphism combine(const std::vector<Morphism>& basis, const std::vector<Scalar>& coeffs) {
  Morphism f = zero_morphism(basis.front().src, basis.front().tgt);
  for (std::size_t t = 0; t < basis.size(); ++t)
    if (!coeffs[t].is_zero()) f = morphism_add(f, morphism_scale(basis[t], coeffs[t]));
  return f;
}

// Length-one certificate of iso.tgt whose single factor is family[index],
// witnessed through the supplied isomorphism family[index] -> iso.tgt.
FiltrationCertificate self_certificate(std::size_t index, const Morphism& iso) {
  const Module& x = iso.tgt;
  FiltrationCertificate c;
  c.x = x;
  c.chain = {zero_submodule(x), full_submodule(x)};
  FactorPresentation fp = filtration_factor(x, c.chain[0], c.chain[1]);
  Morphism witness = factor_through_inclusion(fp.include, compose(fp.project, iso));
  c.factors = {FactorWitness{index, witness}};
  c.ordered = true;
  return c;
}

// Family positions at or below (or strictly below) position i, listed in
// increasing order position; these index both the sub-family handed to
// membership searches and the reported certificate family.
std::vector<std::size_t> positions_below(const LinearOrder& ord, std::size_t i,
                                         bool strict) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < ord.size(); ++j)
    if (strict ? ord.less(j, i) : ord.less_equal(j, i)) out.push_back(j);
  std::sort(out.begin(), out.end(),
            [&](std::size_t a, std::size_t b) { return ord.rank[a] < ord.rank[b]; });
  return out;
}

std::vector<Module> select_modules(const std::vector<Module>& family,
                                   const std::vector<std::size_t>& idx) {
  std::vector<Module> out;
  out.reserve(idx.size());
  for (std::size_t j : idx) out.push_back(family[j]);
  return out;
}

// Searches for a surjection q ->> target whose kernel is filtered by the
// given sub-family; distinct candidates with equal kernels are tested once.
struct PresentationSearch {
  bool found = false;
  bool exhaustive = false;
  bool membership_undecided = false;
  std::size_t candidates = 0;
  std::optional<ShortExactSequence> sequence;
  std::optional<FiltrationCertificate> certificate;
};

PresentationSearch find_epi_with_filtered_kernel(const Module& q, const Module& target,
                                                 const std::vector<Module>& fam,
                                                 const SearchLimits& limits) {
  PresentationSearch out;
  const LinearOrder sub_ord = LinearOrder::natural(fam.size());
  std::set<std::string> seen;
  auto try_candidate = [&](const Morphism& f) {
    if (!is_surjective_morphism(f)) return false;
    ++out.candidates;
    Submodule ker = kernel_submodule(f);
    if (!seen.insert(submodule_total_rows(q, ker).to_bytes()).second) return false;
    Morphism inc;
    Module z = kernel_module(f, &inc);
    MembershipResult mr = filtration_membership(z, fam, sub_ord, limits);
    if (mr.status == MembershipStatus::Filtered) {
      out.found = true;
      out.sequence = ShortExactSequence{inc, f};
      out.certificate = mr.certificate;
      return true;
    }
    if (mr.status == MembershipStatus::Undecided) out.membership_undecided = true;
    return false;
  };
  std::vector<Morphism> hs = hom_space(q, target);
  if (hs.empty()) {
    out.exhaustive = true;
    try_candidate(zero_morphism(q, target));
    return out;
  }
  out.exhaustive = for_each_ray(
      q.field(), hs.size(), limits,
      [&](const std::vector<Scalar>& coeffs) { return try_candidate(combine(hs, coeffs)); });
  return out;
}

// Same search for a monomorphism theta -> y with filtered cokernel; the
// cokernel is determined by the image, so images key the dedup set.
PresentationSearch find_mono_with_filtered_cokernel(const Module& theta, const Module& y,
                                                    const std::vector<Module>& fam,
                                                    const SearchLimits& limits) {
  PresentationSearch out;
  const LinearOrder sub_ord = LinearOrder::natural(fam.size());
  std::set<std::string> seen;
  auto try_candidate = [&](const Morphism& f) {
    if (!is_injective_morphism(f)) return false;
    ++out.candidates;
    if (!seen.insert(submodule_total_rows(y, image_submodule(f)).to_bytes()).second)
      return false;
    Morphism pr;
    Module c = cokernel_module(f, &pr);
    MembershipResult mr = filtration_membership(c, fam, sub_ord, limits);
    if (mr.status == MembershipStatus::Filtered) {
      out.found = true;
      out.sequence = ShortExactSequence{f, pr};
      out.certificate = mr.certificate;
      return true;
    }
    if (mr.status == MembershipStatus::Undecided) out.membership_undecided = true;
    return false;
  };
  std::vector<Morphism> hs = hom_space(theta, y);
  if (hs.empty()) {
    out.exhaustive = true;
    try_candidate(zero_morphism(theta, y));
    return out;
  }
  out.exhaustive = for_each_ray(
      theta.field(), hs.size(), limits,
      [&](const std::vector<Scalar>& coeffs) { return try_candidate(combine(hs, coeffs)); });
  return out;
}

AxiomResult presentation_axiom(const std::string& axiom, std::size_t i,
                               const PresentationSearch& s,
                               std::vector<std::size_t> cert_family,
                               const std::string& success_text,
                               const std::string& missing_text) {
  AxiomResult r;
  r.axiom = axiom;
  r.pair = std::make_pair(i, i);
  if (s.found) {
    r.verdict = Verdict::Yes;
    r.detail = "index " + std::to_string(i) + ": " + success_text;
    r.sequence = s.sequence;
    r.certificate = s.certificate;
    r.certificate_family = std::move(cert_family);
    return r;
  }
  const bool decisive = s.exhaustive && !s.membership_undecided;
  r.verdict = decisive ? Verdict::No : Verdict::Undecided;
  r.detail = "index " + std::to_string(i) + ": " + missing_text + " (" +
             std::to_string(s.candidates) + " candidates, " +
             (s.exhaustive ? "exhaustive sweep" : "sampled sweep") +
             (s.membership_undecided ? ", some filtration searches undecided" : "") + ")";
  return r;
}

}  // namespace

const AxiomResult* SystemVerdict::find(const std::string& axiom) const {
  const AxiomResult* first = nullptr;
  for (const AxiomResult& r : axioms) {
    if (r.axiom != axiom) continue;
    if (r.verdict != Verdict::Yes) return &r;
    if (!first) first = &r;
  }
  return first;
}

std::string SystemVerdict::summary() const {
  std::vector<std::string> names;
  for (const AxiomResult& r : axioms)
    if (std::find(names.begin(), names.end(), r.axiom) == names.end())
      names.push_back(r.axiom);
  std::ostringstream os;
  for (const std::string& name : names) {
    Verdict v = Verdict::Yes;
    std::size_t count = 0;
    const AxiomResult* bad = nullptr;
    for (const AxiomResult& r : axioms) {
      if (r.axiom != name) continue;
      ++count;
      v = worse(v, r.verdict);
      if (!bad && r.verdict != Verdict::Yes) bad = &r;
    }
    os << name << ": ";
    if (v == Verdict::Yes)
      os << "Yes (" << count << (count == 1 ? " check)" : " checks)");
    else
      os << verdict_string(v) << " -- " << bad->detail;
    os << "\n";
  }
  return os.str();
}

DivisionRingReport end_is_division_ring(const Module& m, const SearchLimits& limits) {
  m.check_valid();
  DivisionRingReport rep;
  const std::vector<Morphism> basis = hom_space(m, m);
  rep.end_dim = basis.size();
  if (m.is_zero()) {
    rep.verdict = Verdict::No;
    rep.note = "zero module: its endomorphism ring is the zero ring";
    return rep;
  }
  const std::size_t d = basis.size();
  if (d == 1) {
    rep.verdict = Verdict::Yes;
    rep.note = "endomorphism ring is one-dimensional, hence the ground field";
    return rep;
  }
  if (auto rad = end_radical_rows(m, basis); rad && rad->rows() > 0) {
    rep.verdict = Verdict::No;
    rep.note = "endomorphism ring has a radical of dimension " +
               std::to_string(rad->rows()) + ", so it contains nonzero nilpotents";
    return rep;
  }
  const Field& field = m.field();
  Rng rng(limits.seed);
  const std::size_t random_trials = 32;
  for (std::size_t trial = 0; trial < d + random_trials; ++trial) {
    Morphism theta;
    if (trial < d) {
      theta = basis[trial];
    } else {
      std::vector<Scalar> coeffs(d);
      bool nonzero = false;
      for (Scalar& c : coeffs) {
        c = rng.scalar(field);
        nonzero = nonzero || !c.is_zero();
      }
      if (!nonzero) continue;
      theta = combine(basis, coeffs);
    }
    const Poly f = minimal_polynomial(theta.total());
    if (f.degree() < 1) continue;
    const PolyFactors fac = factor_poly(f, rng);
    const bool splits = fac.factors.size() >= 2 ||
                        (fac.factors.size() == 1 && fac.factors[0].second > 1);
    if (splits) {
      const Poly g = fac.factors[0].first;
      const Poly h = poly_divmod(f, g).first;
      const Morphism a = poly_of_endo(g, theta);
      const Morphism b = poly_of_endo(h, theta);
      if (a.is_zero() || b.is_zero() || !compose(a, b).is_zero())
        throw InvariantError("end_is_division_ring: zero-divisor witness failed");
      rep.verdict = Verdict::No;
      rep.note = "zero divisors: an endomorphism has minimal polynomial " + f.to_string() +
                 " = (" + g.to_string() + ")(" + h.to_string() +
                 "), and the two factors evaluate to nonzero endomorphisms with zero product";
      return rep;
    }
    const auto deg = static_cast<std::size_t>(f.degree());
    const bool certified_irreducible =
        fac.complete || (field.kind == FieldKind::Rationals && (deg == 2 || deg == 3));
    if (certified_irreducible && deg == d) {
      rep.verdict = Verdict::Yes;
      rep.note = "an endomorphism has irreducible minimal polynomial of degree " +
                 std::to_string(d) +
                 " = dim End, so the endomorphism ring is the field it generates";
      return rep;
    }
  }
  rep.verdict = Verdict::Undecided;
  rep.note = "no factorization certificate in " + std::to_string(d + random_trials) +
             " trials; dim End = " + std::to_string(d);
  return rep;
}

SystemVerdict verify_ppcs(const std::vector<Module>& psi, const LinearOrder& ord,
                          const SearchLimits& limits) {
  check_family_input("verify_ppcs", psi, ord);
  SystemVerdict sv;
  sv.kind = "ppcs";
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < n; ++i) {
    DivisionRingReport rep = end_is_division_ring(psi[i], limits);
    AxiomResult r;
    r.axiom = "endo-division";
    r.pair = std::make_pair(i, i);
    r.verdict = rep.verdict;
    r.detail = "index " + std::to_string(i) + ": " + rep.note;
    sv.axioms.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!ord.less(i, j)) continue;
      const std::size_t dim = hom_space(psi[i], psi[j]).size();
      AxiomResult r;
      r.axiom = "hom-vanishing";
      r.pair = std::make_pair(i, j);
      r.verdict = dim == 0 ? Verdict::Yes : Verdict::No;
      r.detail = "dim Hom(Psi[" + std::to_string(i) + "], Psi[" + std::to_string(j) +
                 "]) = " + std::to_string(dim);
      sv.axioms.push_back(std::move(r));
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!ord.less(i, j)) continue;
      const std::size_t dim = ext1_dim(psi[i], psi[j]);
      AxiomResult r;
      r.axiom = "ext-vanishing";
      r.pair = std::make_pair(i, j);
      r.verdict = dim == 0 ? Verdict::Yes : Verdict::No;
      r.detail = "dim Ext^1(Psi[" + std::to_string(i) + "], Psi[" + std::to_string(j) +
                 "]) = " + std::to_string(dim);
      sv.axioms.push_back(std::move(r));
    }
  finalize_verdict(sv);
  return sv;
}

SystemVerdict verify_pcs(const std::vector<Module>& psi, const std::vector<Module>& q,
                         const LinearOrder& ord, const SearchLimits& limits) {
  check_family_input("verify_pcs", psi, ord);
  if (q.size() != psi.size())
    throw InputError("verify_pcs: families have different sizes");
  for (const Module& m : q) {
    m.check_valid();
    if (!algebras_compatible(psi.front().alg, m.alg))
      throw InputError("verify_pcs: Q family lives over a different algebra");
  }
  SystemVerdict sv;
  sv.kind = "pcs";
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::string note;
    AxiomResult r;
    r.axiom = "q-indecomposable";
    r.pair = std::make_pair(i, i);
    r.verdict = is_indecomposable(q[i], limits, &note);
    r.detail = "Q[" + std::to_string(i) + "] (dims " + dims_string(q[i].dims) + "): " + note;
    sv.axioms.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i) {
    DivisionRingReport rep = end_is_division_ring(psi[i], limits);
    AxiomResult r;
    r.axiom = "endo-division";
    r.pair = std::make_pair(i, i);
    r.verdict = rep.verdict;
    r.detail = "index " + std::to_string(i) + ": " + rep.note;
    sv.axioms.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!ord.less(i, j)) continue;
      const std::size_t dim = hom_space(psi[i], psi[j]).size();
      AxiomResult r;
      r.axiom = "hom-vanishing";
      r.pair = std::make_pair(i, j);
      r.verdict = dim == 0 ? Verdict::Yes : Verdict::No;
      r.detail = "dim Hom(Psi[" + std::to_string(i) + "], Psi[" + std::to_string(j) +
                 "]) = " + std::to_string(dim);
      sv.axioms.push_back(std::move(r));
    }
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::size_t> below = positions_below(ord, i, false);
    PresentationSearch s =
        find_epi_with_filtered_kernel(q[i], psi[i], select_modules(psi, below), limits);
    sv.axioms.push_back(presentation_axiom(
        "presentation-epi", i, s, below,
        "surjection Q -> Psi found with kernel filtered by the members at or below",
        "no surjection Q -> Psi with kernel filtered by the members at or below"));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t dim = ext1_dim(q[i], psi[j]);
      AxiomResult r;
      r.axiom = "ext-projectivity";
      r.pair = std::make_pair(i, j);
      r.verdict = dim == 0 ? Verdict::Yes : Verdict::No;
      r.detail = "dim Ext^1(Q[" + std::to_string(i) + "], Psi[" + std::to_string(j) +
                 "]) = " + std::to_string(dim);
      sv.axioms.push_back(std::move(r));
    }
  finalize_verdict(sv);
  return sv;
}

SystemVerdict verify_ess(const std::vector<Module>& theta, const std::vector<Module>& y,
                         const LinearOrder& ord, const SearchLimits& limits) {
  check_family_input("verify_ess", theta, ord);
  if (y.size() != theta.size())
    throw InputError("verify_ess: families have different sizes");
  for (const Module& m : y) {
    m.check_valid();
    if (!algebras_compatible(theta.front().alg, m.alg))
      throw InputError("verify_ess: Y family lives over a different algebra");
  }
  SystemVerdict sv;
  sv.kind = "ess";
  const std::size_t n = theta.size();
  for (std::size_t i = 0; i < n; ++i) {
    AxiomResult r;
    r.axiom = "nonzero";
    r.pair = std::make_pair(i, i);
    if (theta[i].is_zero() || y[i].is_zero()) {
      r.verdict = Verdict::No;
      r.detail = std::string(theta[i].is_zero() ? "Theta[" : "Y[") + std::to_string(i) +
                 "] is the zero module";
    } else {
      r.verdict = Verdict::Yes;
      r.detail = "index " + std::to_string(i) + ": both modules are nonzero";
    }
    sv.axioms.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::string note;
    AxiomResult r;
    r.axiom = "y-indecomposable";
    r.pair = std::make_pair(i, i);
    r.verdict = is_indecomposable(y[i], limits, &note);
    r.detail = "Y[" + std::to_string(i) + "] (dims " + dims_string(y[i].dims) + "): " + note;
    sv.axioms.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!ord.less(j, i)) continue;  // axiom constrains pairs with i above j
      const std::size_t dim = hom_space(theta[i], theta[j]).size();
      AxiomResult r;
      r.axiom = "hom-vanishing";
      r.pair = std::make_pair(i, j);
      r.verdict = dim == 0 ? Verdict::Yes : Verdict::No;
      r.detail = "dim Hom(Theta[" + std::to_string(i) + "], Theta[" + std::to_string(j) +
                 "]) = " + std::to_string(dim);
      sv.axioms.push_back(std::move(r));
    }
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::size_t> below = positions_below(ord, i, true);
    PresentationSearch s = find_mono_with_filtered_cokernel(
        theta[i], y[i], select_modules(theta, below), limits);
    sv.axioms.push_back(presentation_axiom(
        "injective-presentation", i, s, below,
        "embedding Theta -> Y found with cokernel filtered by the members strictly below",
        "no embedding Theta -> Y with cokernel filtered by the members strictly below"));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t dim = ext1_dim(theta[i], y[j]);
      AxiomResult r;
      r.axiom = "ext-injectivity";
      r.pair = std::make_pair(i, j);
      r.verdict = dim == 0 ? Verdict::Yes : Verdict::No;
      r.detail = "dim Ext^1(Theta[" + std::to_string(i) + "], Y[" + std::to_string(j) +
                 "]) = " + std::to_string(dim);
      sv.axioms.push_back(std::move(r));
    }
  finalize_verdict(sv);
  return sv;
}

ConstructionResult construct_q(const std::vector<Module>& psi, const LinearOrder& ord,
                               const SearchLimits& limits) {
  check_family_input("construct_q", psi, ord);
  ConstructionResult res;
  const std::size_t n = psi.size();
  SystemVerdict pre = verify_ppcs(psi, ord, limits);
  if (!pre.passed) {
    res.verdict = pre.verdict;
    res.note = "pre-system axioms do not hold for the input family: " + first_failure(pre);
    return res;
  }
  if (limits.cap == 0) throw InputError("construct_q: cap must be positive");

  std::vector<Module> cand(psi);
  std::vector<std::vector<Morphism>> chains(n);
  std::vector<std::vector<std::vector<std::size_t>>> chain_dims(n);
  std::vector<FiltrationCertificate> cand_cert(n);
  std::vector<IndexTrace> traces(n);
  for (std::size_t i = 0; i < n; ++i) {
    traces[i].index = i;
    chain_dims[i] = {psi[i].dims};
    cand_cert[i] = self_certificate(i, identity_morphism(psi[i]));
  }
  std::vector<std::size_t> by_rank(n);
  for (std::size_t i = 0; i < n; ++i) by_rank[ord.rank[i]] = i;

  auto snapshot = [&]() {
    for (std::size_t i = 0; i < n; ++i) traces[i].q = cand[i];
    res.traces = traces;
  };

  for (std::size_t level = n; level-- > 0;) {
    const std::size_t m = by_rank[level];
    std::vector<std::size_t> targets = {m};
    for (std::size_t r = level + 1; r < n; ++r) targets.push_back(by_rank[r]);
    for (std::size_t idx : targets) {
      while (true) {
        const std::size_t obstruction = ext1_dim(cand[idx], psi[m]);
        if (obstruction == 0) break;
        if (chain_dims[idx].size() >= limits.cap) {
          res.verdict = Verdict::Undecided;
          res.divergent_index = idx;
          res.divergence_dims = chain_dims[idx];
          res.note = "extension chain for index " + std::to_string(idx) +
                     " reached the cap (" + std::to_string(limits.cap) +
                     " modules) with Ext^1 against index " + std::to_string(m) +
                     " still of dimension " + std::to_string(obstruction);
          snapshot();
          return res;
        }
        ExtSpace es = ext1_space(cand[idx], psi[m]);
        ShortExactSequence ses = realize_extension(es, es.basis_cocycle(0));
        if (is_split(ses))
          throw InvariantError("construct_q: realization of a nonzero class split");
        const Module& middle = ses.inj.tgt;

        ConstructionStep step;
        step.base_index = m;
        step.sequence = ses;
        step.middle = middle;
        FiltrationCertificate mid_cert =
            splice_certificates(ses, self_certificate(m, identity_morphism(psi[m])),
                                cand_cert[idx], psi);
        mid_cert.ordered = true;
        verify_certificate(mid_cert, psi, &ord);
        step.middle_certificate = mid_cert;

        std::string note;
        step.indecomposable = is_indecomposable(middle, limits, &note);
        traces[idx].steps.push_back(step);
        if (step.indecomposable == Verdict::No) {
          res.verdict = Verdict::No;
          res.note = "hypothesis violation: the middle term of step " +
                     std::to_string(traces[idx].steps.size()) + " for index " +
                     std::to_string(idx) + " (dims " + dims_string(middle.dims) +
                     ") is decomposable: " + note;
          snapshot();
          return res;
        }
        if (step.indecomposable == Verdict::Undecided) {
          res.verdict = Verdict::Undecided;
          res.note = "could not certify an intermediate module indecomposable for index " +
                     std::to_string(idx) + ": " + note;
          snapshot();
          return res;
        }
        chains[idx].push_back(ses.surj);
        chain_dims[idx].push_back(middle.dims);
        cand[idx] = middle;
        cand_cert[idx] = mid_cert;
      }
    }
  }

  std::size_t total_steps = 0;
  for (std::size_t i = 0; i < n; ++i) {
    traces[i].q = cand[i];
    total_steps += traces[i].steps.size();
    const std::vector<std::size_t> below = positions_below(ord, i, false);
    const std::vector<Module> fam = select_modules(psi, below);
    const LinearOrder sub_ord = LinearOrder::natural(fam.size());
    traces[i].kernel_family = below;
    if (chains[i].empty()) {
      Morphism id = identity_morphism(cand[i]);
      Morphism zinc;
      Module z = kernel_module(id, &zinc);
      traces[i].presentation = ShortExactSequence{zinc, id};
      MembershipResult mr = filtration_membership(z, fam, sub_ord, limits);
      traces[i].kernel_certificate = mr.certificate;
    } else {
      KernelChainResult kc = kernel_chain_certificate(chains[i], fam, sub_ord, limits);
      if (kc.status != MembershipStatus::Filtered) {
        res.verdict = kc.status == MembershipStatus::NotFiltered ? Verdict::No
                                                                 : Verdict::Undecided;
        res.note = "kernel of the presentation for index " + std::to_string(i) +
                   " could not be certified: " + kc.note;
        snapshot();
        return res;
      }
      Morphism composite = chains[i][0];
      for (std::size_t k = 1; k < chains[i].size(); ++k)
        composite = compose(composite, chains[i][k]);
      ShortExactSequence pres{kc.inclusion, composite};
      pres.check_valid();
      traces[i].presentation = pres;
      traces[i].kernel_certificate = kc.certificate;
    }
    res.q.push_back(cand[i]);
  }
  res.traces = traces;
  res.closure = verify_pcs(psi, res.q, ord, limits);
  res.constructed = res.closure->passed;
  res.verdict = res.closure->verdict;
  res.note = res.constructed
                 ? "construction complete after " + std::to_string(total_steps) +
                       " extension steps; full re-verification passed"
                 : "constructed family failed re-verification: " + first_failure(*res.closure);
  return res;
}

MonoOrZeroResult mono_or_zero_class(const Module& k, const Module& x,
                                    const SearchLimits& limits) {
  k.check_valid();
  x.check_valid();
  MonoOrZeroResult res;
  const std::vector<Morphism> hs = hom_space(k, x);
  if (k.is_zero() || hs.empty()) {
    res.verdict = Verdict::Yes;
    res.provenance = "vacuous";
    return res;
  }
  bool found = false;
  const bool exhaustive =
      for_each_ray(k.field(), hs.size(), limits, [&](const std::vector<Scalar>& coeffs) {
        Morphism f = combine(hs, coeffs);
        if (is_injective_morphism(f)) return false;
        found = true;
        res.counterexample = f;
        return true;
      });
  if (found) {
    res.verdict = Verdict::No;
    res.provenance = exhaustive ? "enumeration" : "sampling";
  } else if (exhaustive) {
    res.verdict = Verdict::Yes;
    res.provenance = "enumeration";
  } else {
    res.verdict = Verdict::Undecided;
    res.provenance = "sampling";
  }
  return res;
}

MonoOrZeroResult mono_or_zero_by_transport(std::size_t lambda,
                                           const std::vector<Module>& family,
                                           const LinearOrder& ord,
                                           const FiltrationCertificate& cert) {
  if (lambda >= family.size())
    throw InputError("mono_or_zero_by_transport: index out of range");
  if (ord.size() != family.size())
    throw InputError("mono_or_zero_by_transport: order size does not match family");
  verify_certificate(cert, family, cert.ordered ? &ord : nullptr);
  MonoOrZeroResult res;
  for (const FactorWitness& w : cert.factors)
    if (!ord.less_equal(lambda, w.family_index)) {
      res.verdict = Verdict::Undecided;
      res.provenance = "transport: a filtration factor lies strictly below index " +
                       std::to_string(lambda);
      return res;
    }
  res.verdict = Verdict::Yes;
  res.provenance = "transport";
  return res;
}

}  // namespace strata
