// Instance files: a self-contained, line-oriented text format describing a
// bound quiver algebra over an exact field, named modules over it, module
// families, a linear order on family indices, and search limits.
//
// Grammar (one directive per line, '#' starts a comment, blank lines skipped):
//
//   name <identifier>                      optional instance name
//   field <prime p | rationals>            ground field
//   vertices <t>                           number of quiver vertices (0-based)
//   arrow <label> <src> <tgt>              one per arrow, labels unique
//   relation <term> [+ <term>]...          term = <coeff> <label>...; labels in
//                                          application order (first factor
//                                          applied first); coeff is an integer
//                                          or n/d rational literal
//   module <name>                          opens a module block
//     dims <d0> ... <d_{t-1}>              dimension at each vertex
//     mat <label> <rows> <cols> <entries>  action of one arrow, dense
//                                          row-major, rows = dims[tgt],
//                                          cols = dims[src]; omitted matrices
//                                          default to zero
//   end                                    closes the module block
//   family <psi|q|theta> <name>...         named module families
//   order <i0> <i1> ...                    permutation of 0..k-1, smallest
//                                          position first
//   budget <n>  /  cap <n>  /  seed <n>    search limits
//
// Matrices act on column vectors: the matrix for an arrow a: s -> t maps
// vertex-s coordinates to vertex-t coordinates.  Every entry is parsed as a
// rational literal and materialized in the effective field, so one instance
// can be re-read over F_p or over the rationals.
//
// parse_instance validates everything it can see: shapes, undefined names,
// that every declared relation evaluates to zero on every declared module
// (diagnostics name the module and the relation), and the module axioms.
#pragma once

#include "strata/filtration.hpp"
#include "strata/module.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace strata {

// A fully validated instance with its algebra built and modules materialized.
struct Instance {
  std::string name;
  Field field;
  Quiver quiver;
  std::vector<Relation> relations;
  AlgebraPtr algebra;

  std::vector<std::string> module_names;  // declaration order
  std::map<std::string, Module> modules;

  // Keys restricted to "psi", "q", "theta"; values are declared module names.
  std::map<std::string, std::vector<std::string>> families;

  std::optional<std::vector<std::size_t>> order;  // permutation of 0..k-1
  SearchLimits limits;

  bool has_module(const std::string& n) const;
  const Module& module(const std::string& n) const;  // InputError when absent
  bool has_family(const std::string& key) const;
  // Family members in declaration order; InputError when the family is absent.
  std::vector<Module> family(const std::string& key) const;
  const std::vector<std::string>& family_names(const std::string& key) const;
  // The declared order checked against the given family size, or the natural
  // order when none is declared.
  LinearOrder order_for(std::size_t size) const;
};

// Parses and validates an instance file.  Diagnostics carry 1-based line
// numbers and the offending directive or field.  A field given in
// `field_override` replaces the declared one before any scalar is read.
Instance parse_instance(const std::string& text,
                        std::optional<Field> field_override = std::nullopt);

// Canonical text form: fixed directive order, zero matrices omitted,
// canonical scalar representatives.  parse_instance(serialize_instance(i))
// reproduces the same canonical form byte for byte.
std::string serialize_instance(const Instance& inst);

// Field from a command-line value: a prime ("101") or "rationals".
Field field_from_flag(const std::string& value);

}  // namespace strata
