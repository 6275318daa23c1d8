#include "strata/examples.hpp"

#include "strata/instance.hpp"
#include "strata/module.hpp"

#include <utility>

namespace strata {
namespace {

const Field F = Field::fp(101);

Instance base_instance(std::string name, Quiver quiver,
                       std::vector<Relation> relations) {
  Instance inst;
  inst.name = std::move(name);
  inst.field = F;
  inst.quiver = std::move(quiver);
  inst.relations = std::move(relations);
  inst.algebra = std::make_shared<const Algebra>(build_bound_quiver_algebra(
      inst.field, inst.quiver, inst.relations, 30, inst.name));
  return inst;
}

void add_module(Instance& inst, const std::string& name, Module m) {
  m.check_valid();
  inst.module_names.push_back(name);
  inst.modules.emplace(name, std::move(m));
}

Module from_mats(const Instance& inst, std::vector<std::size_t> dims,
                 std::vector<std::pair<std::string, std::vector<long long>>> mats) {
  Module m;
  m.alg = inst.algebra;
  m.dims = std::move(dims);
  for (const auto& a : inst.quiver.arrows)
    m.action.emplace_back(inst.field, m.dims[a.tgt], m.dims[a.src]);
  for (const auto& [label, entries] : mats) {
    for (std::size_t g = 0; g < inst.quiver.arrows.size(); ++g) {
      if (inst.quiver.arrows[g].label != label) continue;
      const auto& arrow = inst.quiver.arrows[g];
      m.action[g] = Matrix::from_rows(inst.field, m.dims[arrow.tgt],
                                      m.dims[arrow.src], entries);
    }
  }
  return m;
}

// Linear A3 quiver 0 -> 1 -> 2.  The q family is {S2, S0, P0}; the proper
// costratifying system it presents is {S2, S0, M01}, and the companion exact
// system is {S2, S0, M12}.
BundledExample make_a3() {
  Instance inst = base_instance(
      "a3-5.3", Quiver{3, {{"a", 0, 1}, {"b", 1, 2}}}, {});
  add_module(inst, "S0", simple_module(inst.algebra, 0));
  add_module(inst, "S2", simple_module(inst.algebra, 2));
  add_module(inst, "M01", from_mats(inst, {1, 1, 0}, {{"a", {1}}}));
  add_module(inst, "M12", from_mats(inst, {0, 1, 1}, {{"b", {1}}}));
  add_module(inst, "P0", projective_module(inst.algebra, 0));
  inst.families["psi"] = {"S2", "S0", "M01"};
  inst.families["q"] = {"S2", "S0", "P0"};
  inst.families["theta"] = {"S2", "S0", "M12"};
  inst.order = std::vector<std::size_t>{0, 1, 2};
  return {inst.name, serialize_instance(inst),
          {"verify-pcs", "strat-modules", "ess-from-pcs", "verify-ess",
           "char-tilting"}};
}

// Kronecker quiver with the first regular module as a one-member pre-system.
// Serving it with a companion family diverges: the construction cap is kept
// small so the divergence trace stays quick to reproduce.
BundledExample make_kronecker() {
  Instance inst = base_instance(
      "kronecker-2.2", Quiver{2, {{"a", 0, 1}, {"b", 0, 1}}}, {});
  add_module(inst, "R1", from_mats(inst, {1, 1}, {{"a", {1}}, {"b", {1}}}));
  add_module(inst, "R2",
             from_mats(inst, {2, 2}, {{"a", {1, 0, 0, 1}}, {"b", {1, 1, 0, 1}}}));
  inst.families["psi"] = {"R1"};
  inst.order = std::vector<std::size_t>{0};
  inst.limits.cap = 10;
  return {inst.name, serialize_instance(inst), {"verify-ppcs", "construct-q"}};
}

// Loop-with-tails quiver: alpha: 1 -> 0, a loop beta at 1, gamma: 2 -> 1,
// bound by beta^2, alpha beta, and beta gamma.  The q family presents a
// proper costratifying system, but no exact one exists and the presenting
// sum is not a characteristic tilting module.
BundledExample make_loop() {
  const Scalar one = Scalar::one(F);
  Instance inst = base_instance(
      "loop", Quiver{3, {{"alpha", 1, 0}, {"beta", 1, 1}, {"gamma", 2, 1}}},
      {{{one, {1, 1}}}, {{one, {1, 0}}}, {{one, {2, 1}}}});
  add_module(inst, "S1", simple_module(inst.algebra, 1));
  add_module(inst, "M11", from_mats(inst, {0, 2, 0}, {{"beta", {0, 1, 0, 0}}}));
  add_module(inst, "U10", from_mats(inst, {1, 1, 0}, {{"alpha", {1}}}));
  add_module(inst, "P1", projective_module(inst.algebra, 1));
  add_module(inst, "P2", projective_module(inst.algebra, 2));
  inst.families["psi"] = {"S1", "P2", "U10"};
  inst.families["q"] = {"M11", "P2", "P1"};
  inst.order = std::vector<std::size_t>{0, 1, 2};
  return {inst.name, serialize_instance(inst),
          {"verify-pcs", "ess-from-pcs", "char-tilting"}};
}

}  // namespace

const std::vector<BundledExample>& bundled_examples() {
  static const std::vector<BundledExample> examples = {make_a3(), make_kronecker(),
                                                       make_loop()};
  return examples;
}

const BundledExample* find_bundled_example(const std::string& name) {
  for (const auto& e : bundled_examples()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

}  // namespace strata
