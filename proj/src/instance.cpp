#include "strata/instance.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace strata {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw InputError("line " + std::to_string(line) + ": " + msg);
}

// Comment stripped, split on whitespace.
std::vector<std::string> tokenize(const std::string& raw) {
  std::string line = raw;
  if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t parse_uint(const std::string& tok, std::size_t line,
                         const std::string& what) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    fail(line, what + " must be a nonnegative integer, got '" + tok + "'");
  try {
    return std::stoull(tok);
  } catch (const std::exception&) {
    fail(line, what + " is out of range: '" + tok + "'");
  }
}

Rational parse_rational_literal(const std::string& tok, std::size_t line) {
  std::string s = tok;
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.erase(0, 1);
  }
  const auto slash = s.find('/');
  const std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  auto digits = [](const std::string& d) {
    return !d.empty() && d.find_first_not_of("0123456789") == std::string::npos;
  };
  if (!digits(num) || !digits(den))
    fail(line, "'" + tok + "' is not an integer or n/d rational literal");
  if (BigInt(den) == 0) fail(line, "'" + tok + "' has denominator zero");
  const Rational r = Rational(BigInt(num), BigInt(den));
  return neg ? Rational(-r) : r;
}

Scalar parse_scalar(const Field& f, const std::string& tok, std::size_t line) {
  const Rational r = parse_rational_literal(tok, line);
  try {
    return Scalar::of_rational(f, r);
  } catch (const std::exception& e) {
    fail(line, "value '" + tok + "' is not defined over " + f.to_string() +
                   ": " + e.what());
  }
}

struct RawTerm {
  std::string coeff;
  std::vector<std::string> labels;  // application order
};
struct RawRelation {
  std::size_t line = 0;
  std::vector<RawTerm> terms;
};
struct RawMat {
  std::size_t line = 0;
  std::string label;
  std::size_t rows = 0, cols = 0;
  std::vector<std::string> entries;
};
struct RawModule {
  std::size_t line = 0;
  std::string name;
  std::size_t dims_line = 0;
  std::vector<std::size_t> dims;
  bool have_dims = false;
  std::vector<RawMat> mats;
};
struct RawFamily {
  std::size_t line = 0;
  std::vector<std::string> names;
};

std::string relation_text(const Relation& rel, const Quiver& qv) {
  std::string out;
  for (std::size_t t = 0; t < rel.size(); ++t) {
    if (t) out += " + ";
    if (!rel[t].coeff.is_one()) out += rel[t].coeff.to_string() + " ";
    // Words store application order; print right-to-left per house style.
    for (auto it = rel[t].word.rbegin(); it != rel[t].word.rend(); ++it) {
      if (it != rel[t].word.rbegin()) out += "*";
      out += qv.arrows[*it].label;
    }
  }
  return out;
}

Matrix evaluate_word(const Module& m, const std::vector<std::size_t>& word) {
  Matrix acc = m.action[word.front()];
  for (std::size_t i = 1; i < word.size(); ++i) acc = m.action[word[i]] * acc;
  return acc;
}

}  // namespace

bool Instance::has_module(const std::string& n) const {
  return modules.count(n) != 0;
}

const Module& Instance::module(const std::string& n) const {
  auto it = modules.find(n);
  if (it == modules.end())
    throw InputError("the instance declares no module named '" + n + "'");
  return it->second;
}

bool Instance::has_family(const std::string& key) const {
  return families.count(key) != 0;
}

const std::vector<std::string>& Instance::family_names(const std::string& key) const {
  auto it = families.find(key);
  if (it == families.end())
    throw InputError("the command needs a '" + key +
                     "' family, but the instance declares none");
  return it->second;
}

std::vector<Module> Instance::family(const std::string& key) const {
  std::vector<Module> out;
  for (const auto& n : family_names(key)) out.push_back(module(n));
  return out;
}

LinearOrder Instance::order_for(std::size_t size) const {
  if (!order) return LinearOrder::natural(size);
  if (order->size() != size)
    throw InputError("the declared order has " + std::to_string(order->size()) +
                     " entries but the family in use has " + std::to_string(size));
  return LinearOrder::of_positions(*order);
}

Field field_from_flag(const std::string& value) {
  if (value == "rationals") return Field::rationals();
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
    throw InputError("field must be a prime or 'rationals', got '" + value + "'");
  const std::uint64_t p = std::stoull(value);
  if (p > 0xffffffffULL || !is_prime(p))
    throw InputError("field characteristic must be prime, got '" + value + "'");
  return Field::fp(static_cast<std::uint32_t>(p));
}

Instance parse_instance(const std::string& text, std::optional<Field> field_override) {
  // ---- lexical pass -------------------------------------------------------
  std::string name;
  std::size_t name_line = 0;
  std::optional<Field> declared_field;
  std::size_t field_line = 0;
  std::optional<std::size_t> vertices;
  std::size_t vertices_line = 0;
  std::vector<Arrow> arrows;
  std::vector<std::size_t> arrow_lines;
  std::vector<RawRelation> raw_relations;
  std::vector<RawModule> raw_modules;
  std::map<std::string, RawFamily> raw_families;
  std::optional<std::vector<std::size_t>> order;
  std::optional<std::uint64_t> budget, seed;
  std::optional<std::size_t> cap;

  RawModule* open = nullptr;  // current module block
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto toks = tokenize(raw);
    if (toks.empty()) continue;
    const std::string& head = toks[0];

    if (open) {
      if (head == "dims") {
        if (open->have_dims) fail(lineno, "duplicate 'dims' in module '" + open->name + "'");
        open->have_dims = true;
        open->dims_line = lineno;
        for (std::size_t i = 1; i < toks.size(); ++i)
          open->dims.push_back(parse_uint(toks[i], lineno, "dimension"));
      } else if (head == "mat") {
        if (toks.size() < 4) fail(lineno, "'mat' needs a label, rows, cols, then entries");
        RawMat m;
        m.line = lineno;
        m.label = toks[1];
        m.rows = parse_uint(toks[2], lineno, "row count");
        m.cols = parse_uint(toks[3], lineno, "column count");
        m.entries.assign(toks.begin() + 4, toks.end());
        open->mats.push_back(std::move(m));
      } else if (head == "end") {
        if (toks.size() != 1) fail(lineno, "'end' takes no arguments");
        open = nullptr;
      } else {
        fail(lineno, "expected 'dims', 'mat', or 'end' inside module '" +
                         open->name + "', got '" + head + "'");
      }
      continue;
    }

    if (head == "name") {
      if (toks.size() != 2) fail(lineno, "'name' takes one identifier");
      if (name_line) fail(lineno, "duplicate 'name' (first at line " + std::to_string(name_line) + ")");
      name = toks[1];
      name_line = lineno;
    } else if (head == "field") {
      if (field_line) fail(lineno, "duplicate 'field' (first at line " + std::to_string(field_line) + ")");
      field_line = lineno;
      if (toks.size() != 2) fail(lineno, "'field' takes a prime or 'rationals'");
      try {
        declared_field = field_from_flag(toks[1]);
      } catch (const InputError& e) {
        fail(lineno, e.what());
      }
    } else if (head == "vertices") {
      if (vertices) fail(lineno, "duplicate 'vertices' (first at line " + std::to_string(vertices_line) + ")");
      if (toks.size() != 2) fail(lineno, "'vertices' takes one count");
      vertices = parse_uint(toks[1], lineno, "vertex count");
      vertices_line = lineno;
      if (*vertices == 0) fail(lineno, "the quiver needs at least one vertex");
    } else if (head == "arrow") {
      if (toks.size() != 4) fail(lineno, "'arrow' takes label, source, target");
      if (!vertices) fail(lineno, "declare 'vertices' before any arrow");
      Arrow a;
      a.label = toks[1];
      a.src = parse_uint(toks[2], lineno, "arrow source");
      a.tgt = parse_uint(toks[3], lineno, "arrow target");
      if (a.src >= *vertices || a.tgt >= *vertices)
        fail(lineno, "arrow '" + a.label + "' references a vertex outside 0.." +
                         std::to_string(*vertices - 1));
      for (const auto& b : arrows)
        if (b.label == a.label) fail(lineno, "duplicate arrow label '" + a.label + "'");
      arrows.push_back(std::move(a));
      arrow_lines.push_back(lineno);
    } else if (head == "relation") {
      RawRelation r;
      r.line = lineno;
      RawTerm term;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (toks[i] == "+") {
          if (term.coeff.empty()) fail(lineno, "empty relation term before '+'");
          r.terms.push_back(std::move(term));
          term = RawTerm{};
        } else if (term.coeff.empty()) {
          term.coeff = toks[i];
        } else {
          term.labels.push_back(toks[i]);
        }
      }
      if (term.coeff.empty()) fail(lineno, "relation needs at least one term");
      r.terms.push_back(std::move(term));
      raw_relations.push_back(std::move(r));
    } else if (head == "module") {
      if (toks.size() != 2) fail(lineno, "'module' takes one name");
      RawModule m;
      m.line = lineno;
      m.name = toks[1];
      raw_modules.push_back(std::move(m));
      open = &raw_modules.back();
    } else if (head == "family") {
      if (toks.size() < 3) fail(lineno, "'family' takes a slot (psi, q, or theta) and module names");
      const std::string& slot = toks[1];
      if (slot != "psi" && slot != "q" && slot != "theta")
        fail(lineno, "family slot must be 'psi', 'q', or 'theta', got '" + slot + "'");
      if (raw_families.count(slot))
        fail(lineno, "duplicate family '" + slot + "' (first at line " +
                         std::to_string(raw_families[slot].line) + ")");
      RawFamily f;
      f.line = lineno;
      f.names.assign(toks.begin() + 2, toks.end());
      raw_families.emplace(slot, std::move(f));
    } else if (head == "order") {
      if (order) fail(lineno, "duplicate 'order'");
      if (toks.size() < 2) fail(lineno, "'order' takes at least one position");
      std::vector<std::size_t> ord;
      for (std::size_t i = 1; i < toks.size(); ++i)
        ord.push_back(parse_uint(toks[i], lineno, "order position"));
      std::set<std::size_t> seen(ord.begin(), ord.end());
      if (seen.size() != ord.size() || *seen.rbegin() != ord.size() - 1)
        fail(lineno, "'order' must be a permutation of 0.." + std::to_string(ord.size() - 1));
      order = std::move(ord);
    } else if (head == "budget" || head == "cap" || head == "seed") {
      if (toks.size() != 2) fail(lineno, "'" + head + "' takes one value");
      const std::uint64_t v = parse_uint(toks[1], lineno, head);
      if (head == "budget") {
        if (budget) fail(lineno, "duplicate 'budget'");
        budget = v;
      } else if (head == "cap") {
        if (cap) fail(lineno, "duplicate 'cap'");
        if (v == 0) fail(lineno, "cap must be positive");
        cap = static_cast<std::size_t>(v);
      } else {
        if (seed) fail(lineno, "duplicate 'seed'");
        seed = v;
      }
    } else {
      fail(lineno, "unknown directive '" + head + "'");
    }
  }
  if (open)
    fail(lineno ? lineno : 1, "module '" + open->name + "' is missing its 'end'");

  // ---- semantic pass ------------------------------------------------------
  Instance inst;
  inst.name = name;
  if (field_override) {
    inst.field = *field_override;
  } else if (declared_field) {
    inst.field = *declared_field;
  } else {
    throw InputError("missing 'field' directive (a prime or 'rationals')");
  }
  if (!vertices) throw InputError("missing 'vertices' directive");
  inst.quiver.num_vertices = *vertices;
  inst.quiver.arrows = arrows;

  auto arrow_id = [&](const std::string& label,
                      std::size_t line) -> std::size_t {
    for (std::size_t k = 0; k < arrows.size(); ++k)
      if (arrows[k].label == label) return k;
    fail(line, "unknown arrow label '" + label + "'");
  };

  for (const auto& rr : raw_relations) {
    Relation rel;
    for (const auto& t : rr.terms) {
      RelationTerm rt;
      rt.coeff = parse_scalar(inst.field, t.coeff, rr.line);
      if (t.labels.empty()) fail(rr.line, "relation term needs at least one arrow");
      for (const auto& l : t.labels) rt.word.push_back(arrow_id(l, rr.line));
      for (std::size_t i = 0; i + 1 < rt.word.size(); ++i)
        if (arrows[rt.word[i]].tgt != arrows[rt.word[i + 1]].src)
          fail(rr.line, "path '" + t.labels[i] + " " + t.labels[i + 1] +
                            "' is not composable (target of the first factor"
                            " is not the source of the next)");
      rel.push_back(std::move(rt));
    }
    const auto src0 = arrows[rel[0].word.front()].src;
    const auto tgt0 = arrows[rel[0].word.back()].tgt;
    for (const auto& rt : rel)
      if (arrows[rt.word.front()].src != src0 || arrows[rt.word.back()].tgt != tgt0)
        fail(rr.line, "all terms of a relation must share source and target vertices");
    inst.relations.push_back(std::move(rel));
  }

  try {
    inst.algebra = std::make_shared<const Algebra>(build_bound_quiver_algebra(
        inst.field, inst.quiver, inst.relations, 30,
        inst.name.empty() ? "instance" : inst.name));
  } catch (const std::exception& e) {
    throw InputError(std::string("algebra construction: ") + e.what());
  }

  const std::size_t t = inst.quiver.num_vertices;
  for (const auto& rm : raw_modules) {
    if (rm.name.empty()) fail(rm.line, "module name must be nonempty");
    if (inst.modules.count(rm.name))
      fail(rm.line, "duplicate module name '" + rm.name + "'");
    if (!rm.have_dims)
      fail(rm.line, "module '" + rm.name + "' is missing its 'dims' line");
    if (rm.dims.size() != t)
      fail(rm.dims_line, "module '" + rm.name + "' declares " +
                             std::to_string(rm.dims.size()) + " dimensions but the quiver has " +
                             std::to_string(t) + " vertices");

    Module m;
    m.alg = inst.algebra;
    m.dims = rm.dims;
    for (const auto& a : arrows)
      m.action.emplace_back(inst.field, rm.dims[a.tgt], rm.dims[a.src]);
    std::set<std::size_t> declared;
    for (const auto& mat : rm.mats) {
      const std::size_t g = arrow_id(mat.label, mat.line);
      if (!declared.insert(g).second)
        fail(mat.line, "module '" + rm.name + "' declares arrow '" + mat.label + "' twice");
      const std::size_t need_r = rm.dims[arrows[g].tgt];
      const std::size_t need_c = rm.dims[arrows[g].src];
      if (mat.rows != need_r || mat.cols != need_c)
        fail(mat.line, "module '" + rm.name + "', arrow '" + mat.label +
                           "': declared shape " + std::to_string(mat.rows) + "x" +
                           std::to_string(mat.cols) + " but the dimension vector requires " +
                           std::to_string(need_r) + "x" + std::to_string(need_c));
      if (mat.entries.size() != mat.rows * mat.cols)
        fail(mat.line, "module '" + rm.name + "', arrow '" + mat.label + "': expected " +
                           std::to_string(mat.rows * mat.cols) + " entries, got " +
                           std::to_string(mat.entries.size()));
      for (std::size_t r = 0; r < mat.rows; ++r)
        for (std::size_t c = 0; c < mat.cols; ++c)
          m.action[g].at(r, c) = parse_scalar(inst.field, mat.entries[r * mat.cols + c], mat.line);
    }

    for (std::size_t k = 0; k < inst.relations.size(); ++k) {
      const Relation& rel = inst.relations[k];
      const std::size_t vr = arrows[rel[0].word.back()].tgt;
      const std::size_t vc = arrows[rel[0].word.front()].src;
      Matrix sum(inst.field, rm.dims[vr], rm.dims[vc]);
      for (const auto& term : rel)
        sum = sum + evaluate_word(m, term.word).scale(term.coeff);
      if (!sum.is_zero())
        fail(rm.line, "module '" + rm.name + "' does not satisfy relation " +
                          std::to_string(k + 1) + " (" +
                          relation_text(rel, inst.quiver) + ")");
    }
    try {
      m.check_valid();
    } catch (const std::exception& e) {
      fail(rm.line, "module '" + rm.name + "' is not a valid representation: " + e.what());
    }
    inst.module_names.push_back(rm.name);
    inst.modules.emplace(rm.name, std::move(m));
  }

  for (const auto& [slot, rf] : raw_families) {
    for (const auto& n : rf.names)
      if (!inst.modules.count(n))
        fail(rf.line, "family '" + slot + "' references undeclared module '" + n + "'");
    inst.families.emplace(slot, rf.names);
  }

  inst.order = order;
  if (budget) inst.limits.budget = *budget;
  if (cap) inst.limits.cap = *cap;
  if (seed) inst.limits.seed = *seed;
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  if (!inst.name.empty()) out << "name " << inst.name << "\n";
  out << "field "
      << (inst.field.kind == FieldKind::Prime ? std::to_string(inst.field.modulus)
                                              : std::string("rationals"))
      << "\n";
  out << "vertices " << inst.quiver.num_vertices << "\n";
  for (const auto& a : inst.quiver.arrows)
    out << "arrow " << a.label << " " << a.src << " " << a.tgt << "\n";
  for (const auto& rel : inst.relations) {
    out << "relation";
    for (std::size_t t = 0; t < rel.size(); ++t) {
      if (t) out << " +";
      out << " " << rel[t].coeff.to_string();
      for (std::size_t id : rel[t].word) out << " " << inst.quiver.arrows[id].label;
    }
    out << "\n";
  }
  for (const auto& name : inst.module_names) {
    const Module& m = inst.modules.at(name);
    out << "module " << name << "\n";
    out << "dims";
    for (std::size_t d : m.dims) out << " " << d;
    out << "\n";
    for (std::size_t g = 0; g < inst.quiver.arrows.size(); ++g) {
      const Matrix& mat = m.action[g];
      if (mat.rows() * mat.cols() == 0 || mat.is_zero()) continue;
      out << "mat " << inst.quiver.arrows[g].label << " " << mat.rows() << " "
          << mat.cols();
      for (std::size_t r = 0; r < mat.rows(); ++r)
        for (std::size_t c = 0; c < mat.cols(); ++c)
          out << " " << mat.at(r, c).to_string();
      out << "\n";
    }
    out << "end\n";
  }
  for (const char* slot : {"psi", "q", "theta"}) {
    auto it = inst.families.find(slot);
    if (it == inst.families.end()) continue;
    out << "family " << slot;
    for (const auto& n : it->second) out << " " << n;
    out << "\n";
  }
  if (inst.order) {
    out << "order";
    for (std::size_t i : *inst.order) out << " " << i;
    out << "\n";
  }
  out << "budget " << inst.limits.budget << "\n";
  out << "cap " << inst.limits.cap << "\n";
  out << "seed " << inst.limits.seed << "\n";
  return out.str();
}

}  // namespace strata
