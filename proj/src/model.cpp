#include "wrec/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace wrec {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
  });
}

bool ends_with_prop_suffix(std::string_view s) { return s.size() > 2 && s.ends_with("_p"); }

[[noreturn]] void fail(const std::string& msg) { throw ModelError(msg); }

}  // namespace

// ---------------------------------------------------------------------------
// Value

Value Value::from_token(const std::string& token) {
  std::string_view t = token;
  std::string_view digits = t.starts_with('-') ? t.substr(1) : t;
  if (!digits.empty() && std::all_of(digits.begin(), digits.end(),
                                     [](char ch) { return ch >= '0' && ch <= '9'; })) {
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
    if (ec == std::errc() && ptr == t.data() + t.size()) return Value(n);
  }
  return Value(token);
}

std::string Value::str() const {
  if (is_int()) return std::to_string(as_int());
  return as_symbol();
}

std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.str(); }

// ---------------------------------------------------------------------------
// Domain

Domain Domain::enumerated(std::vector<Value> values) {
  Domain d;
  d.kind = Kind::kEnumerated;
  d.values = std::move(values);
  return d;
}

Domain Domain::range(std::int64_t lo, std::int64_t hi) {
  Domain d;
  d.kind = Kind::kRange;
  d.lo = lo;
  d.hi = hi;
  return d;
}

bool Domain::contains(const Value& v) const {
  if (kind == Kind::kRange) return v.is_int() && lo <= v.as_int() && v.as_int() <= hi;
  return std::find(values.begin(), values.end(), v) != values.end();
}

bool Domain::is_integral() const {
  if (kind == Kind::kRange) return true;
  return !values.empty() &&
         std::all_of(values.begin(), values.end(), [](const Value& v) { return v.is_int(); });
}

std::size_t Domain::size() const {
  if (kind == Kind::kRange) return static_cast<std::size_t>(hi - lo) + 1;
  return values.size();
}

// ---------------------------------------------------------------------------
// Constraints

const char* to_string(Cmp op) {
  switch (op) {
    case Cmp::kEq: return "=";
    case Cmp::kNe: return "!=";
    case Cmp::kLe: return "<=";
    case Cmp::kGe: return ">=";
    case Cmp::kLt: return "<";
    case Cmp::kGt: return ">";
  }
  return "?";
}

bool compare(const Value& lhs, Cmp op, const Value& rhs) {
  switch (op) {
    case Cmp::kEq: return lhs == rhs;
    case Cmp::kNe: return lhs != rhs;
    default: break;
  }
  if (!lhs.is_int() || !rhs.is_int()) return false;
  const auto a = lhs.as_int();
  const auto b = rhs.as_int();
  switch (op) {
    case Cmp::kLe: return a <= b;
    case Cmp::kGe: return a >= b;
    case Cmp::kLt: return a < b;
    case Cmp::kGt: return a > b;
    default: return false;
  }
}

std::size_t ConstraintExpr::atom_count() const {
  if (const auto* inc = std::get_if<Incompatibility>(&body)) return inc->atoms.size();
  return std::get<Filter>(body).guard.size() + 1;
}

std::string constraint_id(int definition_rank) { return "c" + std::to_string(definition_rank); }

namespace {

void write_atoms(std::ostream& os, const std::vector<Atom>& atoms) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0) os << " & ";
    os << atoms[i].var << " = " << atoms[i].value;
  }
}

void write_operand(std::ostream& os, const Operand& o) {
  if (o.kind == Operand::Kind::kLiteral) {
    os << o.literal;
  } else {
    os << o.name;
  }
}

}  // namespace

std::string to_text(const ConstraintExpr& c) {
  std::ostringstream os;
  if (const auto* inc = std::get_if<Incompatibility>(&c.body)) {
    os << "incompatible { ";
    write_atoms(os, inc->atoms);
    os << " }";
  } else {
    const auto& f = std::get<Filter>(c.body);
    if (!f.guard.empty()) {
      write_atoms(os, f.guard);
      os << " -> ";
    }
    write_operand(os, f.relation.lhs);
    os << ' ' << to_string(f.relation.op) << ' ';
    write_operand(os, f.relation.rhs);
  }
  return os.str();
}

std::vector<Requirement> TestCase::as_requirements() const {
  std::vector<Requirement> out;
  out.reserve(atoms.size());
  int rank = 1;
  for (const auto& a : atoms) out.push_back({a.var, a.value, rank++});
  return out;
}

// ---------------------------------------------------------------------------
// KnowledgeBase

const UserVariable* KnowledgeBase::find_user_var(std::string_view name) const {
  auto idx = user_var_index(name);
  return idx ? &user_vars[*idx] : nullptr;
}

const ProductProperty* KnowledgeBase::find_product_prop(std::string_view name) const {
  auto idx = product_prop_index(name);
  return idx ? &product_props[*idx] : nullptr;
}

const Product* KnowledgeBase::find_product(std::string_view name) const {
  auto idx = product_index(name);
  return idx ? &products[*idx] : nullptr;
}

const ConstraintExpr* KnowledgeBase::find_constraint(std::string_view id) const {
  for (const auto* c : constraints()) {
    if (c->id == id) return c;
  }
  return nullptr;
}

std::optional<std::size_t> KnowledgeBase::user_var_index(std::string_view name) const {
  for (std::size_t i = 0; i < user_vars.size(); ++i) {
    if (user_vars[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> KnowledgeBase::product_prop_index(std::string_view name) const {
  for (std::size_t i = 0; i < product_props.size(); ++i) {
    if (product_props[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> KnowledgeBase::product_index(std::string_view name) const {
  for (std::size_t i = 0; i < products.size(); ++i) {
    if (products[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<const ConstraintExpr*> KnowledgeBase::constraints() const {
  std::vector<const ConstraintExpr*> all;
  all.reserve(comp.size() + filt.size());
  for (const auto& c : comp) all.push_back(&c);
  for (const auto& c : filt) all.push_back(&c);
  std::stable_sort(all.begin(), all.end(), [](const auto* a, const auto* b) {
    return a->definition_rank < b->definition_rank;
  });
  return all;
}

std::vector<std::string> KnowledgeBase::constraint_ids() const {
  std::vector<std::string> ids;
  for (const auto* c : constraints()) ids.push_back(c->id);
  return ids;
}

namespace {

void validate_domain(const std::string& owner, const Domain& d) {
  if (d.kind == Domain::Kind::kRange) {
    if (d.lo > d.hi) fail(owner + ": empty range " + std::to_string(d.lo) + ".." + std::to_string(d.hi));
    return;
  }
  if (d.values.empty()) fail(owner + ": empty domain");
  std::set<Value> seen;
  for (const auto& v : d.values) {
    if (!seen.insert(v).second) fail(owner + ": duplicate domain value " + v.str());
  }
}

void validate_atoms(const KnowledgeBase& kb, const std::string& owner, const std::vector<Atom>& atoms) {
  std::set<std::string> vars;
  for (const auto& a : atoms) {
    const auto* uv = kb.find_user_var(a.var);
    if (uv == nullptr) fail(owner + ": undeclared user variable " + a.var);
    if (!uv->domain.contains(a.value)) fail(owner + ": value " + a.value.str() + " outside domain of " + a.var);
    if (!vars.insert(a.var).second) fail(owner + ": variable " + a.var + " assigned twice");
  }
}

// Which kind of value an operand produces: integers, symbols, or both.
bool operand_integral(const KnowledgeBase& kb, const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::kLiteral: return o.literal.is_int();
    case Operand::Kind::kUserVar: return kb.find_user_var(o.name)->domain.is_integral();
    case Operand::Kind::kProductProp: return kb.find_product_prop(o.name)->domain.is_integral();
  }
  return false;
}

void validate_relation(const KnowledgeBase& kb, const std::string& owner, const Relation& r) {
  for (const Operand* o : {&r.lhs, &r.rhs}) {
    if (o->kind == Operand::Kind::kUserVar && kb.find_user_var(o->name) == nullptr)
      fail(owner + ": undeclared user variable " + o->name);
    if (o->kind == Operand::Kind::kProductProp && kb.find_product_prop(o->name) == nullptr)
      fail(owner + ": undeclared product property " + o->name);
  }
  if (r.lhs.kind == Operand::Kind::kLiteral && r.rhs.kind == Operand::Kind::kLiteral)
    fail(owner + ": relation references no variable");
  for (auto [var, lit] : {std::pair{&r.lhs, &r.rhs}, std::pair{&r.rhs, &r.lhs}}) {
    if (var->kind != Operand::Kind::kUserVar || lit->kind != Operand::Kind::kLiteral) continue;
    const auto& d = kb.find_user_var(var->name)->domain;
    if ((r.op == Cmp::kEq || r.op == Cmp::kNe) && !lit->literal.is_int() && !d.contains(lit->literal))
      fail(owner + ": value " + lit->literal.str() + " outside domain of " + var->name);
  }
  if (r.op != Cmp::kEq && r.op != Cmp::kNe) {
    if (!operand_integral(kb, r.lhs) || !operand_integral(kb, r.rhs))
      fail(owner + ": ordering comparison on non-integer operand");
  }
}

}  // namespace

void KnowledgeBase::validate() const {
  std::set<std::string> names;
  for (const auto& uv : user_vars) {
    if (!is_identifier(uv.name)) fail("invalid user variable name '" + uv.name + "'");
    if (!names.insert(uv.name).second) fail("duplicate variable " + uv.name);
    validate_domain(uv.name, uv.domain);
  }
  for (const auto& pp : product_props) {
    if (!is_identifier(pp.name) || !ends_with_prop_suffix(pp.name))
      fail("invalid product property name '" + pp.name + "'");
    if (!names.insert(pp.name).second) fail("duplicate variable " + pp.name);
    validate_domain(pp.name, pp.domain);
  }

  if (product_props.empty()) fail("no product properties declared");
  if (products.empty()) fail("no products declared");
  std::set<std::string> product_names;
  for (const auto& p : products) {
    if (!is_identifier(p.name)) fail("invalid product name '" + p.name + "'");
    if (!product_names.insert(p.name).second) fail("duplicate product " + p.name);
    if (p.values.size() != product_props.size()) fail(p.name + ": expected one value per product property");
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      if (!product_props[i].domain.contains(p.values[i]))
        fail(p.name + ": value " + p.values[i].str() + " outside domain of " + product_props[i].name);
    }
  }

  std::vector<int> ranks;
  std::set<std::string> ids;
  for (const auto& c : comp) {
    if (!c.is_incompatibility()) fail(c.id + ": filter stored among incompatibilities");
  }
  for (const auto& c : filt) {
    if (c.is_incompatibility()) fail(c.id + ": incompatibility stored among filters");
  }
  for (const auto* c : constraints()) {
    if (c->id != constraint_id(c->definition_rank)) fail(c->id + ": id does not match definition rank");
    if (!ids.insert(c->id).second) fail("duplicate constraint " + c->id);
    ranks.push_back(c->definition_rank);
    if (const auto* inc = std::get_if<Incompatibility>(&c->body)) {
      if (inc->atoms.empty()) fail(c->id + ": empty incompatibility");
      validate_atoms(*this, c->id, inc->atoms);
    } else {
      const auto& f = std::get<Filter>(c->body);
      validate_atoms(*this, c->id, f.guard);
      validate_relation(*this, c->id, f.relation);
    }
  }
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] != static_cast<int>(i) + 1) fail("constraint ranks are not 1..n");
  }

  std::set<std::string> test_names;
  for (const auto& t : tests) {
    if (!is_identifier(t.name)) fail("invalid test name '" + t.name + "'");
    if (!test_names.insert(t.name).second) fail("duplicate test " + t.name);
    if (t.atoms.empty()) fail(t.name + ": empty test");
    validate_atoms(*this, t.name, t.atoms);
  }
}

void validate_requirements(const KnowledgeBase& kb, const std::vector<Requirement>& requirements) {
  std::set<std::string> vars;
  std::set<int> ranks;
  for (const auto& r : requirements) {
    const auto* uv = kb.find_user_var(r.var);
    if (uv == nullptr) fail("unknown variable " + r.var);
    if (!uv->domain.contains(r.value)) fail("value " + r.value.str() + " outside domain of " + r.var);
    if (!vars.insert(r.var).second) fail("more than one requirement on " + r.var);
    if (r.entry_rank < 1 || !ranks.insert(r.entry_rank).second)
      fail("invalid or repeated entry rank for " + r.var);
  }
}

// ---------------------------------------------------------------------------
// References, diagnoses, support

ConstraintRef requirement_ref(const Requirement& r) { return r; }
ConstraintRef kb_ref(std::string id) { return KbConstraintRef{std::move(id)}; }
ConstraintRef product_ref(std::string product) { return ProductPin{std::move(product)}; }

std::string label(const ConstraintRef& ref) {
  if (const auto* r = std::get_if<Requirement>(&ref)) return r->var;
  if (const auto* k = std::get_if<KbConstraintRef>(&ref)) return k->id;
  return "@" + std::get<ProductPin>(ref).product;
}

std::vector<ConstraintRef> to_refs(const std::vector<Requirement>& requirements) {
  return {requirements.begin(), requirements.end()};
}

bool Diagnosis::contains(const ConstraintRef& ref) const {
  return std::find(elements.begin(), elements.end(), ref) != elements.end();
}

std::vector<std::string> Diagnosis::labels() const {
  std::vector<std::string> out;
  for (const auto& e : elements) out.push_back(label(e));
  return out;
}

bool Diagnosis::same_set(const Diagnosis& other) const {
  if (elements.size() != other.elements.size()) return false;
  return std::all_of(elements.begin(), elements.end(),
                     [&](const ConstraintRef& e) { return other.contains(e); });
}

std::string Support::str() const {
  return std::to_string(changed) + "/" + std::to_string(total == 0 ? 1 : total);
}

}  // namespace wrec
