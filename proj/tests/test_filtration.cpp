#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "strata/filtration.hpp"

using namespace strata;

namespace {

const Field F = Field::fp(101);

AlgebraPtr loop_algebra() {
  Quiver q{3, {{"alpha", 1, 0}, {"beta", 1, 1}, {"gamma", 2, 1}}};
  Scalar one = Scalar::one(F);
  std::vector<Relation> rels = {{{one, {1, 1}}}, {{one, {1, 0}}}, {{one, {2, 1}}}};
  return std::make_shared<const Algebra>(build_bound_quiver_algebra(F, q, rels, 30, "loop3"));
}

AlgebraPtr kronecker_algebra() {
  Quiver q{2, {{"a", 0, 1}, {"b", 0, 1}}};
  return std::make_shared<const Algebra>(build_bound_quiver_algebra(F, q, {}, 30, "kronecker"));
}

AlgebraPtr a3_algebra() {
  Quiver q{3, {{"a", 0, 1}, {"b", 1, 2}}};
  return std::make_shared<const Algebra>(build_bound_quiver_algebra(F, q, {}, 30, "a3"));
}

// Uniserial over the linear quiver with top S(1) and socle S(2).
Module uniserial_12(const AlgebraPtr& alg) {
  Module m;
  m.alg = alg;
  m.dims = {1, 1, 0};
  m.action.push_back(Matrix::from_rows(F, 1, 1, {1}));  // a
  m.action.push_back(Matrix(F, 0, 1));                  // b
  m.check_valid();
  return m;
}

Module uniserial_22(const AlgebraPtr& alg) {
  Module m;
  m.alg = alg;
  m.dims = {0, 2, 0};
  m.action.push_back(Matrix(F, 0, 2));
  m.action.push_back(Matrix::from_rows(F, 2, 2, {0, 1, 0, 0}));
  m.action.push_back(Matrix(F, 2, 0));
  m.check_valid();
  return m;
}

std::vector<std::size_t> factor_indices(const FiltrationCertificate& c) {
  std::vector<std::size_t> v;
  for (const auto& f : c.factors) v.push_back(f.family_index);
  return v;
}

}  // namespace

TEST_CASE("a family member certifies itself with a length-one chain") {
  AlgebraPtr alg = a3_algebra();
  std::vector<Module> fam = {simple_module(alg, 2), uniserial_12(alg)};
  LinearOrder ord = LinearOrder::natural(2);
  SearchLimits lim;
  MembershipResult r = filtration_membership(fam[1], fam, ord, lim);
  REQUIRE(r.status == MembershipStatus::Filtered);
  CHECK(r.certificate->length() == 1);
  CHECK(factor_indices(*r.certificate) == std::vector<std::size_t>{1});
  CHECK(r.certificate->ordered);
  verify_certificate(*r.certificate, fam, &ord);
}

TEST_CASE("the full projective filters through socle then top over the linear quiver") {
  AlgebraPtr alg = a3_algebra();
  Module p0 = projective_module(alg, 0);  // dims (1,1,1)
  std::vector<Module> fam = {simple_module(alg, 2), uniserial_12(alg)};
  LinearOrder ord = LinearOrder::natural(2);
  SearchLimits lim;
  MembershipResult r = filtration_membership(p0, fam, ord, lim);
  REQUIRE(r.status == MembershipStatus::Filtered);
  CHECK(r.certificate->length() == 2);
  CHECK(factor_indices(*r.certificate) == std::vector<std::size_t>{0, 1});
  CHECK(r.certificate->ordered);
  // Bottom layer is the simple socle at the sink vertex.
  CHECK(r.certificate->chain[1].ranks() == std::vector<std::size_t>{0, 0, 1});

  CHECK(min_index(p0, fam, ord, lim) == 0);

  PeelResult peel = peel_bottom(p0, fam, ord, lim);
  CHECK(peel.bottom_index == 0);
  CHECK(peel.sequence.inj.src.dims == std::vector<std::size_t>{0, 0, 1});
  CHECK(peel.sequence.surj.tgt.dims == std::vector<std::size_t>{1, 1, 0});
  CHECK(peel.rest.length() == 1);
  CHECK(peel.rest.factors[0].family_index == 1);
}

TEST_CASE("dimension tiling rejects impossible targets outright") {
  AlgebraPtr alg = kronecker_algebra();
  Module p0 = projective_module(alg, 0);  // dims (1,2)
  // A single regular-type factor of dimension vector (1,1) can never tile (1,2).
  Module r1;
  r1.alg = alg;
  r1.dims = {1, 1};
  r1.action.push_back(Matrix::from_rows(F, 1, 1, {1}));
  r1.action.push_back(Matrix::from_rows(F, 1, 1, {0}));
  r1.check_valid();
  LinearOrder ord = LinearOrder::natural(1);
  SearchLimits lim;
  MembershipResult r = filtration_membership(p0, {r1}, ord, lim);
  CHECK(r.status == MembershipStatus::NotFiltered);
  CHECK(r.note.find("tile") != std::string::npos);
}

TEST_CASE("exhausted search distinguishes not-filtered from undecided") {
  AlgebraPtr alg = loop_algebra();
  Module s2 = simple_module(alg, 1);
  Module x = direct_sum({s2, s2});
  std::vector<Module> fam = {uniserial_22(alg)};
  LinearOrder ord = LinearOrder::natural(1);
  // The family member has a 2-dimensional hom space into x but no mono:
  // with full budget the ray enumeration is exhaustive.
  SearchLimits full;
  MembershipResult r1 = filtration_membership(x, fam, ord, full);
  CHECK(r1.status == MembershipStatus::NotFiltered);
  // With a tiny budget the search falls back to sampling and stays honest.
  SearchLimits tiny;
  tiny.budget = 10;
  MembershipResult r2 = filtration_membership(x, fam, ord, tiny);
  CHECK(r2.status == MembershipStatus::Undecided);
}

TEST_CASE("semisimple layers are found even when factors repeat") {
  AlgebraPtr alg = loop_algebra();
  Module p1 = projective_module(alg, 1);  // dims (1,2,0)
  std::vector<Module> fam = {simple_module(alg, 0), simple_module(alg, 1)};
  LinearOrder ord = LinearOrder::natural(2);
  SearchLimits lim;
  MembershipResult r = filtration_membership(p1, fam, ord, lim);
  REQUIRE(r.status == MembershipStatus::Filtered);
  CHECK(r.certificate->length() == 3);
  // Composition series: multiset one S(1) and two S(2).
  std::vector<std::size_t> idx = factor_indices(*r.certificate);
  CHECK(std::count(idx.begin(), idx.end(), 0) == 1);
  CHECK(std::count(idx.begin(), idx.end(), 1) == 2);
}

TEST_CASE("membership results are deterministic") {
  AlgebraPtr alg = a3_algebra();
  Module x = direct_sum({projective_module(alg, 0), simple_module(alg, 2)});
  std::vector<Module> fam = {simple_module(alg, 2), uniserial_12(alg)};
  LinearOrder ord = LinearOrder::natural(2);
  SearchLimits lim;
  MembershipResult a = filtration_membership(x, fam, ord, lim);
  MembershipResult b = filtration_membership(x, fam, ord, lim);
  REQUIRE(a.status == MembershipStatus::Filtered);
  REQUIRE(b.status == MembershipStatus::Filtered);
  CHECK(factor_indices(*a.certificate) == factor_indices(*b.certificate));
  for (std::size_t k = 0; k < a.certificate->chain.size(); ++k)
    CHECK(submodule_total_rows(x, a.certificate->chain[k]).to_bytes() ==
          submodule_total_rows(x, b.certificate->chain[k]).to_bytes());
}

TEST_CASE("reordering swaps a split pair and preserves the factor multiset") {
  AlgebraPtr alg = a3_algebra();
  Module s0 = simple_module(alg, 0), s2 = simple_module(alg, 2);
  Module x = direct_sum({s0, s2});
  std::vector<Module> fam = {s0, s2};
  LinearOrder natural = LinearOrder::natural(2);
  SearchLimits lim;
  MembershipResult r = filtration_membership(x, fam, natural, lim);
  REQUIRE(r.status == MembershipStatus::Filtered);
  CHECK(factor_indices(*r.certificate) == std::vector<std::size_t>{0, 1});

  // Under the reversed order the same chain is out of order; reordering must
  // swap through the (split) middle extension.
  LinearOrder reversed = LinearOrder::of_positions({1, 0});
  FiltrationCertificate base = *r.certificate;
  base.ordered = false;
  FiltrationCertificate sorted = reorder_filtration(base, fam, reversed);
  CHECK(factor_indices(sorted) == std::vector<std::size_t>{1, 0});
  CHECK(sorted.ordered);
  verify_certificate(sorted, fam, &reversed);

  // Already ordered input comes back with the same factor sequence.
  FiltrationCertificate same = reorder_filtration(*r.certificate, fam, natural);
  CHECK(factor_indices(same) == factor_indices(*r.certificate));
}

TEST_CASE("reordering a non-split inversion raises a hypothesis violation") {
  AlgebraPtr alg = a3_algebra();
  Module s0 = simple_module(alg, 0), s1 = simple_module(alg, 1);
  Module x = uniserial_12(alg);
  std::vector<Module> fam = {s0, s1};
  LinearOrder natural = LinearOrder::natural(2);
  SearchLimits lim;
  MembershipResult r = filtration_membership(x, fam, natural, lim);
  REQUIRE(r.status == MembershipStatus::Filtered);
  // Factors come out socle-first: [S(2)=index 1, S(1)=index 0], an inversion
  // under the natural order whose middle extension is non-split.
  REQUIRE(factor_indices(*r.certificate) == std::vector<std::size_t>{1, 0});
  CHECK(!r.certificate->ordered);
  CHECK_THROWS_AS(reorder_filtration(*r.certificate, fam, natural), HypothesisViolation);
  try {
    reorder_filtration(*r.certificate, fam, natural);
  } catch (const HypothesisViolation& e) {
    CHECK(std::string(e.what()).find("(1, 0)") != std::string::npos);
  }
}

TEST_CASE("min index is stable across distinct filtered modules") {
  AlgebraPtr alg = a3_algebra();
  std::vector<Module> fam = {simple_module(alg, 2), uniserial_12(alg)};
  LinearOrder ord = LinearOrder::natural(2);
  SearchLimits lim;
  CHECK(min_index(simple_module(alg, 2), fam, ord, lim) == 0);
  CHECK(min_index(uniserial_12(alg), fam, ord, lim) == 1);
  CHECK(min_index(projective_module(alg, 0), fam, ord, lim) == 0);
  Module big = direct_sum({projective_module(alg, 0), uniserial_12(alg)});
  CHECK(min_index(big, fam, ord, lim) == 0);
}

TEST_CASE("peeling repeatedly empties a filtered module") {
  AlgebraPtr alg = a3_algebra();
  std::vector<Module> fam = {simple_module(alg, 2), uniserial_12(alg)};
  LinearOrder ord = LinearOrder::natural(2);
  SearchLimits lim;
  Module x = direct_sum({projective_module(alg, 0), simple_module(alg, 2)});
  std::size_t steps = 0;
  std::size_t last_rank = 0;
  while (!x.is_zero()) {
    PeelResult p = peel_bottom(x, fam, ord, lim);
    CHECK(ord.rank[p.bottom_index] >= last_rank);
    last_rank = ord.rank[p.bottom_index];
    x = p.sequence.surj.tgt;
    ++steps;
    REQUIRE(steps <= 4);
  }
  CHECK(steps == 3);
}

TEST_CASE("splicing outer certificates yields a certificate of the middle") {
  AlgebraPtr alg = a3_algebra();
  std::vector<Module> fam = {simple_module(alg, 2), uniserial_12(alg)};
  LinearOrder ord = LinearOrder::natural(2);
  SearchLimits lim;
  Module p0 = projective_module(alg, 0);
  PeelResult p = peel_bottom(p0, fam, ord, lim);
  // Re-certify the two ends independently, then splice.
  MembershipResult bottom = filtration_membership(p.sequence.inj.src, fam, ord, lim);
  MembershipResult top = filtration_membership(p.sequence.surj.tgt, fam, ord, lim);
  REQUIRE(bottom.status == MembershipStatus::Filtered);
  REQUIRE(top.status == MembershipStatus::Filtered);
  FiltrationCertificate spliced =
      splice_certificates(p.sequence, *bottom.certificate, *top.certificate, fam);
  CHECK(spliced.length() == 2);
  CHECK(factor_indices(spliced) == std::vector<std::size_t>{0, 1});
  verify_certificate(spliced, fam, nullptr);
}

TEST_CASE("kernels of epi chains receive spliced certificates") {
  AlgebraPtr alg = loop_algebra();
  Module p1 = projective_module(alg, 1);  // dims (1,2,0)
  Module s2 = simple_module(alg, 1);
  std::vector<Module> fam = {s2};
  LinearOrder ord = LinearOrder::natural(1);
  SearchLimits lim;

  // beta1: P(2) ->> 2/1 kills the beta line; its kernel is S(2).
  Module m21;
  m21.alg = alg;
  m21.dims = {1, 1, 0};
  m21.action.push_back(Matrix::from_rows(F, 1, 1, {1}));
  m21.action.push_back(Matrix::from_rows(F, 1, 1, {0}));
  m21.action.push_back(Matrix(F, 1, 0));
  m21.check_valid();
  std::vector<Morphism> homs = hom_space(p1, m21);
  REQUIRE(!homs.empty());
  Morphism beta1;
  bool found = false;
  for (const Morphism& h : homs)
    if (is_surjective_morphism(h)) {
      beta1 = h;
      found = true;
      break;
    }
  REQUIRE(found);

  // beta2: P(2) + S(2) ->> P(2), projection onto the first summand.
  std::vector<Morphism> injs, prjs;
  Module sum = direct_sum({p1, s2}, &injs, &prjs);
  Morphism beta2 = prjs[0];

  KernelChainResult kc = kernel_chain_certificate({beta1, beta2}, fam, ord, lim);
  REQUIRE(kc.status == MembershipStatus::Filtered);
  CHECK(kc.kernel.total_dim() == 2);
  CHECK(kc.certificate->length() == 2);
  CHECK(factor_indices(*kc.certificate) == std::vector<std::size_t>{0, 0});
  verify_certificate(*kc.certificate, fam, nullptr);

  // Single-link chains degenerate to plain membership of the kernel.
  KernelChainResult single = kernel_chain_certificate({beta1}, fam, ord, lim);
  REQUIRE(single.status == MembershipStatus::Filtered);
  CHECK(single.kernel.total_dim() == 1);
  CHECK(single.certificate->length() == 1);
}

TEST_CASE("tampered certificates fail verification") {
  AlgebraPtr alg = a3_algebra();
  std::vector<Module> fam = {simple_module(alg, 2), uniserial_12(alg)};
  LinearOrder ord = LinearOrder::natural(2);
  SearchLimits lim;
  Module p0 = projective_module(alg, 0);
  FiltrationCertificate c = *filtration_membership(p0, fam, ord, lim).certificate;

  FiltrationCertificate bad_index = c;
  bad_index.factors[0].family_index = 1;
  CHECK_THROWS_AS(verify_certificate(bad_index, fam, &ord), InvariantError);

  FiltrationCertificate bad_chain = c;
  bad_chain.chain.erase(bad_chain.chain.begin() + 1);
  bad_chain.factors.pop_back();
  CHECK_THROWS_AS(verify_certificate(bad_chain, fam, &ord), InvariantError);

  FiltrationCertificate bad_witness = c;
  bad_witness.factors[0].iso = morphism_scale(bad_witness.factors[0].iso, Scalar::zero(F));
  CHECK_THROWS_AS(verify_certificate(bad_witness, fam, &ord), InvariantError);
}

TEST_CASE("the zero module is trivially filtered") {
  AlgebraPtr alg = a3_algebra();
  Module z = kernel_module(identity_morphism(simple_module(alg, 0)));
  std::vector<Module> fam = {simple_module(alg, 2)};
  LinearOrder ord = LinearOrder::natural(1);
  SearchLimits lim;
  MembershipResult r = filtration_membership(z, fam, ord, lim);
  REQUIRE(r.status == MembershipStatus::Filtered);
  CHECK(r.certificate->length() == 0);
  CHECK_THROWS_AS(min_index(z, fam, ord, lim), InputError);
}
