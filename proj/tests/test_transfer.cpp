#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "strata/homology.hpp"
#include "strata/transfer.hpp"

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

Module uniserial_12(const AlgebraPtr& alg) {
  Module m;
  m.alg = alg;
  m.dims = {1, 1, 0};
  m.action.push_back(Matrix::from_rows(F, 1, 1, {1}));
  m.action.push_back(Matrix(F, 0, 1));
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

Module loop_21(const AlgebraPtr& alg) {
  Module m;
  m.alg = alg;
  m.dims = {1, 1, 0};
  m.action.push_back(Matrix::from_rows(F, 1, 1, {1}));
  m.action.push_back(Matrix::from_rows(F, 1, 1, {0}));
  m.action.push_back(Matrix(F, 1, 0));
  m.check_valid();
  return m;
}

Module kronecker_regular(const AlgebraPtr& alg, std::size_t i) {
  Module m;
  m.alg = alg;
  m.dims = {i, i};
  std::vector<long long> jordan(i * i, 0);
  for (std::size_t r = 0; r < i; ++r) {
    jordan[r * i + r] = 1;
    if (r + 1 < i) jordan[r * i + r + 1] = 1;
  }
  m.action.push_back(Matrix::identity(F, i));
  m.action.push_back(Matrix::from_rows(F, i, i, jordan));
  m.check_valid();
  return m;
}

std::vector<Module> a3_q(const AlgebraPtr& alg) {
  return {simple_module(alg, 2), simple_module(alg, 0), projective_module(alg, 0)};
}

std::vector<Module> a3_psi(const AlgebraPtr& alg) {
  return {simple_module(alg, 2), simple_module(alg, 0), uniserial_12(alg)};
}

std::vector<Module> loop_q(const AlgebraPtr& alg) {
  return {uniserial_22(alg), projective_module(alg, 2), projective_module(alg, 1)};
}

std::vector<Module> loop_psi(const AlgebraPtr& alg) {
  return {simple_module(alg, 1), projective_module(alg, 2), loop_21(alg)};
}

bool isomorphic(const Module& a, const Module& b) {
  SearchLimits lim;
  return is_isomorphic(a, b, lim) == Verdict::Yes;
}

std::vector<std::pair<std::size_t, std::size_t>> arrow_pairs(const Quiver& q) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const Arrow& a : q.arrows) out.push_back({a.src, a.tgt});
  std::sort(out.begin(), out.end());
  return out;
}

using Dims = std::vector<std::size_t>;

}  // namespace

TEST_CASE("endomorphism algebra of the full projective family recovers the base algebra size") {
  for (const AlgebraPtr& alg : {a3_algebra(), loop_algebra()}) {
    std::vector<Module> projs;
    for (std::size_t i = 0; i < alg->num_idempotents; ++i)
      projs.push_back(projective_module(alg, i));
    EndoTransferContext ctx = endomorphism_algebra(projs);
    CHECK(ctx.gamma->dim() == alg->dim());
    CHECK(ctx.gamma_op->dim() == alg->dim());
    CHECK(ctx.q_bimodule.total_dim() == alg->dim());
  }
}

TEST_CASE("linear-quiver family: presentation, hom-block grading, and projective dictionaries") {
  AlgebraPtr a3 = a3_algebra();
  EndoTransferContext ctx = endomorphism_algebra(a3_q(a3));
  CHECK(ctx.gamma->dim() == 5);
  CHECK(ctx.qfamily.size() == 3);
  CHECK(ctx.q_bimodule.dims == Dims{1, 1, 3});

  // Each representative lands in its declared hom block.
  for (std::size_t k = 0; k < ctx.gamma->dim(); ++k) {
    const BasisElement& el = ctx.gamma->basis[k];
    CHECK(ctx.reps[k].src.dims == ctx.qfamily[el.tgt].dims);
    CHECK(ctx.reps[k].tgt.dims == ctx.qfamily[el.src].dims);
  }

  // Dictionary modules are the indecomposable projectives on both sides.
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(isomorphic(ctx.p_gamma[i], projective_module(ctx.gamma, i)));
    CHECK(isomorphic(ctx.p_gamma_op[i], projective_module(ctx.gamma_op, i)));
  }
  CHECK(ctx.p_gamma[0].dims == Dims{1, 0, 0});
  CHECK(ctx.p_gamma[1].dims == Dims{0, 1, 1});
  CHECK(ctx.p_gamma[2].dims == Dims{1, 0, 1});
  CHECK(ctx.p_gamma_op[0].dims == Dims{1, 0, 1});
  CHECK(ctx.p_gamma_op[1].dims == Dims{0, 1, 0});
  CHECK(ctx.p_gamma_op[2].dims == Dims{0, 1, 1});
}

TEST_CASE("linear-quiver family: quiver presentations of both endomorphism sides") {
  AlgebraPtr a3 = a3_algebra();
  EndoTransferContext ctx = endomorphism_algebra(a3_q(a3));
  using P = std::vector<std::pair<std::size_t, std::size_t>>;
  CHECK(arrow_pairs(gabriel_quiver(ctx.gamma)) == P{{1, 2}, {2, 0}});
  CHECK(arrow_pairs(gabriel_quiver(ctx.gamma_op)) == P{{0, 2}, {2, 1}});
  // Sanity on the base algebra: the quiver is recovered from the radical.
  CHECK(arrow_pairs(gabriel_quiver(a3)) == P{{0, 1}, {1, 2}});
}

TEST_CASE("hom and co-hom transfer are functorial and preserve hom dimensions on the family") {
  AlgebraPtr a3 = a3_algebra();
  std::vector<Module> q = a3_q(a3);
  EndoTransferContext ctx = endomorphism_algebra(q);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) {
      std::size_t lambda_side = hom_space(q[i], q[j]).size();
      std::size_t gamma_side = hom_space(ctx.p_gamma[i], ctx.p_gamma[j]).size();
      CHECK(lambda_side == gamma_side);
    }
  // Functor on morphisms: identity goes to identity, composites to composites.
  Module x = direct_sum({q[2], q[0]});
  Module fx = apply_F(ctx, x);
  Morphism idx = apply_F_morphism(ctx, identity_morphism(x), fx, fx);
  CHECK(idx.total() == identity_morphism(fx).total());
  auto homs = hom_space(q[2], q[1]);
  REQUIRE(homs.size() == 1);
  Morphism f = homs[0];
  Module f2 = apply_F(ctx, q[2]);
  Module f1 = apply_F(ctx, q[1]);
  auto gs = hom_space(q[1], q[2]);
  CHECK(gs.empty());
  Morphism ff = apply_F_morphism(ctx, f, f2, f1);
  ff.check_valid();
  CHECK(ff.mats.size() == 3);
}

TEST_CASE("presentation-to-module transport inverts the hom transfer on family sums") {
  AlgebraPtr a3 = a3_algebra();
  std::vector<Module> q = a3_q(a3);
  EndoTransferContext ctx = endomorphism_algebra(q);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(isomorphic(apply_G(ctx, ctx.p_gamma[i]), q[i]));
    CHECK(isomorphic(apply_Gbar(ctx, ctx.p_gamma_op[i]), q[i]));
  }
  Module x = direct_sum({q[0], q[2]});
  CHECK(isomorphic(apply_G(ctx, apply_F(ctx, x)), x));
  Module y = direct_sum({q[1], q[2], q[2]});
  CHECK(isomorphic(apply_G(ctx, apply_F(ctx, y)), y));
}

TEST_CASE("dualizing a transferred projective matches the opposite-side dictionary") {
  AlgebraPtr a3 = a3_algebra();
  std::vector<Module> q = a3_q(a3);
  EndoTransferContext ctx = endomorphism_algebra(q);
  for (std::size_t i = 0; i < q.size(); ++i) {
    Module star = star_projective(ctx.gamma, ctx.gamma_op, ctx.p_gamma[i]);
    CHECK(isomorphic(star, ctx.p_gamma_op[i]));
    CHECK(isomorphic(apply_Gbar(ctx, star), q[i]));
  }
  Module x = direct_sum({q[0], q[2]});
  Module star = star_projective(ctx.gamma, ctx.gamma_op, apply_F(ctx, x));
  CHECK(isomorphic(apply_Gbar(ctx, star), x));
}

TEST_CASE("first torsion of the family sum vanishes on projectives and lower standards") {
  AlgebraPtr a3 = a3_algebra();
  EndoTransferContext ctx = endomorphism_algebra(a3_q(a3));
  LinearOrder rev = reversed_order(LinearOrder::natural(3));
  StratifiedFamilies fams = stratified_families(ctx.gamma, rev);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(tor1_dim(ctx.q_bimodule, ctx.p_gamma[i]) == 0);
    CHECK(tor1_dim(ctx.q_bimodule, fams.delta_bar[i]) == 0);
  }
}

TEST_CASE("reversed order and stratified families on the base linear-quiver algebra") {
  LinearOrder rev = reversed_order(LinearOrder::natural(3));
  CHECK(rev.order == Dims{2, 1, 0});
  CHECK(rev.less(2, 0));
  CHECK(!rev.less(0, 2));
  CHECK(!rev.less(1, 1));

  AlgebraPtr a3 = a3_algebra();
  StratifiedFamilies fams = stratified_families(a3, LinearOrder::natural(3));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(isomorphic(fams.delta[i], simple_module(a3, i)));
    CHECK(isomorphic(fams.delta_bar[i], simple_module(a3, i)));
    // For this directed order the opposite-side lower standards are whole
    // projectives, so their duals are the indecomposable injectives.
    CHECK(isomorphic(fams.nabla_bar[i], injective_module(a3, i)));
    CHECK(is_surjective_morphism(fams.delta_witness[i]));
    CHECK(is_surjective_morphism(fams.delta_bar_witness[i]));
  }
  StandardlyStratifiedReport rep = is_standardly_stratified(a3, LinearOrder::natural(3));
  CHECK(rep.verdict == Verdict::Yes);
  for (const MembershipResult& mr : rep.projectives)
    CHECK(mr.status == MembershipStatus::Filtered);
}

TEST_CASE("stratified families of the transferred algebras match the worked linear-quiver case") {
  AlgebraPtr a3 = a3_algebra();
  EndoTransferContext ctx = endomorphism_algebra(a3_q(a3));
  LinearOrder rev = reversed_order(LinearOrder::natural(3));

  StratifiedFamilies on_op = stratified_families(ctx.gamma_op, rev);
  CHECK(on_op.delta[0].dims == Dims{1, 0, 1});
  CHECK(on_op.delta[1].dims == Dims{0, 1, 0});
  CHECK(on_op.delta[2].dims == Dims{0, 0, 1});

  StratifiedFamilies on_gamma = stratified_families(ctx.gamma, rev);
  CHECK(on_gamma.delta_bar[0].dims == Dims{1, 0, 0});
  CHECK(on_gamma.delta_bar[1].dims == Dims{0, 1, 1});
  CHECK(on_gamma.delta_bar[2].dims == Dims{0, 0, 1});

  StandardlyStratifiedReport rep = is_standardly_stratified(ctx.gamma_op, rev);
  CHECK(rep.verdict == Verdict::Yes);
}

TEST_CASE("existence route constructs the known coherent system over the linear quiver") {
  AlgebraPtr a3 = a3_algebra();
  std::vector<Module> q = a3_q(a3);
  TransferExistence out = pcs_existence_check(q, LinearOrder::natural(3));
  CHECK(out.exists);
  CHECK(out.verdict == Verdict::Yes);
  CHECK(out.failing_condition.empty());
  REQUIRE(out.family.size() == 3);
  CHECK(out.family[0].dims == Dims{0, 0, 1});
  CHECK(out.family[1].dims == Dims{1, 0, 0});
  CHECK(out.family[2].dims == Dims{1, 1, 0});
  std::vector<Module> psi = a3_psi(a3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(isomorphic(out.family[i], psi[i]));
  REQUIRE(out.closure.has_value());
  CHECK(out.closure->passed);
  REQUIRE(out.stratified.has_value());
  CHECK(out.stratified->verdict == Verdict::Yes);
}

TEST_CASE("co-existence route constructs the known co-system over the linear quiver") {
  AlgebraPtr a3 = a3_algebra();
  std::vector<Module> q = a3_q(a3);
  TransferExistence out = ess_existence_check(a3_psi(a3), q, LinearOrder::natural(3));
  CHECK(out.exists);
  CHECK(out.verdict == Verdict::Yes);
  REQUIRE(out.family.size() == 3);
  CHECK(out.family[0].dims == Dims{0, 0, 1});
  CHECK(out.family[1].dims == Dims{1, 0, 0});
  CHECK(out.family[2].dims == Dims{0, 1, 1});
  CHECK(isomorphic(out.family[0], simple_module(a3, 2)));
  CHECK(isomorphic(out.family[1], simple_module(a3, 0)));
  Module rad_p0 = kernel_module(hom_space(projective_module(a3, 0), simple_module(a3, 0))[0]);
  CHECK(isomorphic(out.family[2], rad_p0));
  REQUIRE(out.closure.has_value());
  CHECK(out.closure->passed);
}

TEST_CASE("tilting characterization accepts the linear-quiver family sum") {
  AlgebraPtr a3 = a3_algebra();
  EndoTransferContext ctx = endomorphism_algebra(a3_q(a3));
  TiltingReport rep = is_characteristic_tilting(ctx, LinearOrder::natural(3));
  CHECK(rep.verdict == Verdict::Yes);
  CHECK(rep.value);
  CHECK(rep.failing_conjunct.empty());
  CHECK(rep.membership.status == MembershipStatus::Filtered);
  CHECK(rep.summand_count == 3);
  for (std::size_t d : rep.ext_dims) CHECK(d == 0);
}

TEST_CASE("loop family: endomorphism presentation has dimension nine and the expected quiver") {
  AlgebraPtr loop = loop_algebra();
  EndoTransferContext ctx = endomorphism_algebra(loop_q(loop));
  CHECK(ctx.gamma->dim() == 9);
  CHECK(ctx.q_bimodule.dims == Dims{2, 3, 3});
  using P = std::vector<std::pair<std::size_t, std::size_t>>;
  CHECK(arrow_pairs(gabriel_quiver(ctx.gamma)) == P{{0, 2}, {1, 2}, {2, 0}});
  CHECK(arrow_pairs(gabriel_quiver(ctx.gamma_op)) == P{{0, 2}, {2, 0}, {2, 1}});
}

TEST_CASE("loop family: existence holds and reproduces the known system up to isomorphism") {
  AlgebraPtr loop = loop_algebra();
  std::vector<Module> q = loop_q(loop);
  TransferExistence out = pcs_existence_check(q, LinearOrder::natural(3));
  CHECK(out.exists);
  CHECK(out.verdict == Verdict::Yes);
  REQUIRE(out.family.size() == 3);
  std::vector<Module> psi = loop_psi(loop);
  for (std::size_t i = 0; i < 3; ++i) CHECK(isomorphic(out.family[i], psi[i]));
  REQUIRE(out.closure.has_value());
  CHECK(out.closure->passed);
}

TEST_CASE("loop family: no co-system exists and the family sum is not tilting-characteristic") {
  AlgebraPtr loop = loop_algebra();
  std::vector<Module> q = loop_q(loop);
  TransferExistence ess = ess_existence_check(loop_psi(loop), q, LinearOrder::natural(3));
  CHECK(!ess.exists);
  CHECK(ess.verdict != Verdict::Yes);
  CHECK(!ess.failing_condition.empty());

  EndoTransferContext ctx = endomorphism_algebra(q);
  TiltingReport rep = is_characteristic_tilting(ctx, LinearOrder::natural(3));
  CHECK(!rep.value);
  CHECK(!rep.failing_conjunct.empty());
}

TEST_CASE("size-two regular family over the double-arrow quiver fails the extension condition") {
  AlgebraPtr kr = kronecker_algebra();
  std::vector<Module> fam = {kronecker_regular(kr, 2)};
  TransferExistence out = pcs_existence_check(fam, LinearOrder::natural(1));
  CHECK(!out.exists);
  CHECK(out.verdict == Verdict::No);
  CHECK(out.failing_condition.find("extension") != std::string::npos);
}

TEST_CASE("two-step class membership: resolutions and coresolutions by the family") {
  AlgebraPtr a3 = a3_algebra();
  std::vector<Module> q = a3_q(a3);
  EndoTransferContext ctx = endomorphism_algebra(q);

  C2Result w0 = c2_class_membership(ctx, simple_module(a3, 0), C2Direction::Wedge);
  CHECK(w0.verdict == Verdict::Yes);
  REQUIRE(w0.outer.has_value());
  REQUIRE(w0.inner.has_value());
  CHECK(is_surjective_morphism(*w0.outer));
  // The two steps compose to zero and the outer kernel equals the inner image.
  CHECK(compose(*w0.outer, *w0.inner).is_zero());
  Submodule im = image_submodule(*w0.inner);
  Submodule ker = kernel_submodule(*w0.outer);
  CHECK(submodule_contains_sub(ker, im));
  CHECK(submodule_contains_sub(im, ker));

  C2Result w1 = c2_class_membership(ctx, simple_module(a3, 1), C2Direction::Wedge);
  CHECK(w1.verdict == Verdict::No);
  CHECK(w1.note.find("stage 0") != std::string::npos);

  C2Result v0 = c2_class_membership(ctx, simple_module(a3, 0), C2Direction::Vee);
  CHECK(v0.verdict == Verdict::Yes);
  REQUIRE(v0.outer.has_value());
  CHECK(is_injective_morphism(*v0.outer));
  CHECK(compose(*v0.inner, *v0.outer).is_zero());

  C2Result v1 = c2_class_membership(ctx, simple_module(a3, 1), C2Direction::Vee);
  CHECK(v1.verdict == Verdict::No);
  CHECK(v1.note.find("stage 0") != std::string::npos);
}

TEST_CASE("extension and torsion routes agree family-wide on both worked examples") {
  AlgebraPtr a3 = a3_algebra();
  EndoTransferContext actx = endomorphism_algebra(a3_q(a3));
  auto apairs = ext_tor_bridge(actx, LinearOrder::natural(3));
  REQUIRE(apairs.size() == 3);
  for (const auto& [e, t] : apairs) {
    CHECK(e == t);
    CHECK(e == 0);
  }

  AlgebraPtr loop = loop_algebra();
  EndoTransferContext lctx = endomorphism_algebra(loop_q(loop));
  auto lpairs = ext_tor_bridge(lctx, LinearOrder::natural(3));
  REQUIRE(lpairs.size() == 3);
  for (const auto& [e, t] : lpairs) CHECK(e == t);
}

TEST_CASE("family validation: zero, repeated, decomposable, and mixed members are rejected") {
  AlgebraPtr a3 = a3_algebra();
  AlgebraPtr loop = loop_algebra();
  Module s = simple_module(a3, 0);
  CHECK_THROWS_AS((void)endomorphism_algebra({}), InputError);
  CHECK_THROWS_AS((void)endomorphism_algebra({s, s}), InputError);
  CHECK_THROWS_AS((void)endomorphism_algebra({direct_sum({s, s})}), InputError);
  CHECK_THROWS_AS((void)endomorphism_algebra({s, simple_module(loop, 0)}), InputError);
  Module z;
  z.alg = a3;
  z.dims = {0, 0, 0};
  z.action = {Matrix(F, 0, 0), Matrix(F, 0, 0)};
  CHECK_THROWS_AS((void)endomorphism_algebra({z}), InputError);
}

TEST_CASE("transfer construction is deterministic across repeated runs") {
  AlgebraPtr a3 = a3_algebra();
  std::vector<Module> q = a3_q(a3);
  EndoTransferContext c1 = endomorphism_algebra(q);
  EndoTransferContext c2 = endomorphism_algebra(q);
  CHECK(c1.q_bimodule.to_bytes() == c2.q_bimodule.to_bytes());
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(c1.p_gamma[i].to_bytes() == c2.p_gamma[i].to_bytes());
    CHECK(c1.p_gamma_op[i].to_bytes() == c2.p_gamma_op[i].to_bytes());
  }
  TransferExistence e1 = pcs_existence_check(q, LinearOrder::natural(3));
  TransferExistence e2 = pcs_existence_check(q, LinearOrder::natural(3));
  REQUIRE(e1.family.size() == e2.family.size());
  for (std::size_t i = 0; i < e1.family.size(); ++i)
    CHECK(e1.family[i].to_bytes() == e2.family[i].to_bytes());
}
