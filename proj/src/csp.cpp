#include "wrec/csp.hpp"

#include <algorithm>
#include <map>
#include <memory>

namespace wrec::csp {

namespace {

struct CAtom {
  std::size_t var;
  Value value;
};

struct COperand {
  Operand::Kind kind = Operand::Kind::kLiteral;
  std::size_t index = 0;
  Value literal;
};

struct CConstraint {
  std::string id;
  bool incompatibility = false;
  std::vector<CAtom> atoms;  // incompatibility atoms, or a filter's guard
  COperand lhs;
  Cmp op = Cmp::kEq;
  COperand rhs;
  std::vector<std::size_t> vars;  // user variables mentioned, ascending
  std::vector<std::int64_t> constants;
};

const Value& operand_value(const COperand& o, const std::vector<Value>& assignment, const Product& product) {
  switch (o.kind) {
    case Operand::Kind::kUserVar: return assignment[o.index];
    case Operand::Kind::kProductProp: return product.values[o.index];
    case Operand::Kind::kLiteral: break;
  }
  return o.literal;
}

bool holds(const CConstraint& c, const std::vector<Value>& assignment, const Product& product) {
  const bool all_atoms =
      std::all_of(c.atoms.begin(), c.atoms.end(), [&](const CAtom& a) { return assignment[a.var] == a.value; });
  if (c.incompatibility) return !all_atoms;
  if (!all_atoms) return true;
  return compare(operand_value(c.lhs, assignment, product), c.op, operand_value(c.rhs, assignment, product));
}

}  // namespace

struct Solver::Compiled {
  std::vector<CConstraint> constraints;     // definition order
  std::map<std::string, std::size_t> by_id;
  std::vector<std::int64_t> base_constants;  // integers the knowledge base itself mentions
};

struct Solver::Search {
  const KnowledgeBase& kb;
  std::vector<const CConstraint*> enforced;
  std::vector<std::optional<Value>> fixed;
  std::vector<std::size_t> products;
  std::vector<std::vector<Value>> candidates;
  std::vector<std::vector<const CConstraint*>> checks;  // [0] product-only, [i+1] triggered by var i
  bool contradiction = false;

  Search(const KnowledgeBase& kb_, const Compiled& compiled, std::span<const ConstraintRef> active,
         const ExcludedSet& excluded, bool enumerate_all,
         const std::vector<std::pair<std::size_t, Value>>& extra_fixed = {})
      : kb(kb_), fixed(kb_.user_vars.size()) {
    std::set<std::string> forced;
    std::optional<std::size_t> pinned;
    bool pin_conflict = false;

    auto fix = [&](std::size_t var, const Value& v) {
      if (fixed[var] && *fixed[var] != v) contradiction = true;
      fixed[var] = v;
    };

    for (const auto& ref : active) {
      if (const auto* r = std::get_if<Requirement>(&ref)) {
        auto idx = kb.user_var_index(r->var);
        if (!idx) throw ContractViolation("requirement on unknown variable " + r->var);
        if (!kb.user_vars[*idx].domain.contains(r->value)) {
          throw ContractViolation("requirement value " + r->value.str() + " outside domain of " + r->var);
        }
        fix(*idx, r->value);
      } else if (const auto* k = std::get_if<KbConstraintRef>(&ref)) {
        if (!compiled.by_id.count(k->id)) throw ContractViolation("unknown constraint " + k->id);
        forced.insert(k->id);
      } else {
        const auto& pin = std::get<ProductPin>(ref);
        auto idx = kb.product_index(pin.product);
        if (!idx) throw ContractViolation("unknown product " + pin.product);
        if (pinned && *pinned != *idx) pin_conflict = true;
        pinned = idx;
      }
    }
    for (const auto& [var, v] : extra_fixed) fix(var, v);
    for (const auto& id : excluded) {
      if (!compiled.by_id.count(id)) throw ContractViolation("cannot exclude unknown constraint " + id);
    }

    if (!pin_conflict) {
      if (pinned) {
        products.push_back(*pinned);
      } else {
        for (std::size_t i = 0; i < kb.products.size(); ++i) products.push_back(i);
      }
    }

    std::vector<bool> mentioned(kb.user_vars.size(), false);
    std::vector<std::int64_t> constants = compiled.base_constants;
    for (const auto& c : compiled.constraints) {
      if (excluded.count(c.id) && !forced.count(c.id)) continue;
      enforced.push_back(&c);
      for (auto v : c.vars) mentioned[v] = true;
      constants.insert(constants.end(), c.constants.begin(), c.constants.end());
    }
    for (const auto& f : fixed) {
      if (f && f->is_int()) constants.push_back(f->as_int());
    }
    std::sort(constants.begin(), constants.end());
    constants.erase(std::unique(constants.begin(), constants.end()), constants.end());

    std::int64_t spread = 0;
    for (std::size_t i = 0; i < kb.user_vars.size(); ++i) {
      if (!fixed[i] && mentioned[i] && kb.user_vars[i].domain.kind == Domain::Kind::kRange) ++spread;
    }

    candidates.resize(kb.user_vars.size());
    for (std::size_t i = 0; i < kb.user_vars.size(); ++i) {
      const Domain& d = kb.user_vars[i].domain;
      if (fixed[i]) {
        candidates[i] = {*fixed[i]};
      } else if (d.kind == Domain::Kind::kEnumerated) {
        if (mentioned[i] || enumerate_all) {
          candidates[i] = d.values;
        } else {
          candidates[i] = {d.values.front()};
        }
      } else if (!mentioned[i]) {
        candidates[i] = {Value(d.lo)};
      } else {
        candidates[i] = range_points(d, constants, spread);
      }
    }

    checks.resize(kb.user_vars.size() + 1);
    for (const auto* c : enforced) {
      const std::size_t slot = c->vars.empty() ? 0 : c->vars.back() + 1;
      checks[slot].push_back(c);
    }
  }

  static std::vector<Value> range_points(const Domain& d, const std::vector<std::int64_t>& constants,
                                         std::int64_t spread) {
    std::vector<std::int64_t> pts;
    auto add = [&](std::int64_t base) {
      for (std::int64_t k = -spread; k <= spread; ++k) {
        // Clamp before adding to stay clear of overflow at the int64 edges.
        if ((k < 0 && base < d.lo - k) || (k > 0 && base > d.hi - k)) continue;
        const std::int64_t p = base + k;
        if (p >= d.lo && p <= d.hi) pts.push_back(p);
      }
    };
    add(d.lo);
    add(d.hi);
    for (auto c : constants) {
      if (c >= d.lo - spread && c <= d.hi + spread) add(c);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return {pts.begin(), pts.end()};
  }

  // Returns false when the visitor asked to stop.
  bool run(const std::function<bool(const Scenario&)>& visit) const {
    if (contradiction) return true;
    std::vector<Value> assignment(kb.user_vars.size());
    for (auto p : products) {
      const Product& product = kb.products[p];
      if (!passes(checks[0], assignment, product)) continue;
      if (!descend(0, assignment, product, visit)) return false;
    }
    return true;
  }

  static bool passes(const std::vector<const CConstraint*>& cs, const std::vector<Value>& assignment,
                     const Product& product) {
    return std::all_of(cs.begin(), cs.end(), [&](const CConstraint* c) { return holds(*c, assignment, product); });
  }

  bool descend(std::size_t var, std::vector<Value>& assignment, const Product& product,
               const std::function<bool(const Scenario&)>& visit) const {
    if (var == kb.user_vars.size()) return visit(Scenario{assignment, product.name});
    for (const auto& v : candidates[var]) {
      assignment[var] = v;
      if (!passes(checks[var + 1], assignment, product)) continue;
      if (!descend(var + 1, assignment, product, visit)) return false;
    }
    return true;
  }
};

Solver::Solver(const KnowledgeBase& kb) : kb_(&kb), compiled_(std::make_unique<Compiled>()) {
  auto var_index = [&](const std::string& name) {
    auto idx = kb.user_var_index(name);
    if (!idx) throw ContractViolation("constraint references unknown variable " + name);
    return *idx;
  };
  auto compile_operand = [&](const Operand& o, CConstraint& c) {
    COperand out;
    out.kind = o.kind;
    if (o.kind == Operand::Kind::kUserVar) {
      out.index = var_index(o.name);
      c.vars.push_back(out.index);
    } else if (o.kind == Operand::Kind::kProductProp) {
      auto idx = kb.product_prop_index(o.name);
      if (!idx) throw ContractViolation("constraint references unknown property " + o.name);
      out.index = *idx;
    } else {
      out.literal = o.literal;
      if (o.literal.is_int()) c.constants.push_back(o.literal.as_int());
    }
    return out;
  };

  for (const auto* expr : kb.constraints()) {
    CConstraint c;
    c.id = expr->id;
    const std::vector<Atom>* atoms = nullptr;
    if (const auto* inc = std::get_if<Incompatibility>(&expr->body)) {
      c.incompatibility = true;
      atoms = &inc->atoms;
    } else {
      const auto& f = std::get<Filter>(expr->body);
      atoms = &f.guard;
      c.lhs = compile_operand(f.relation.lhs, c);
      c.op = f.relation.op;
      c.rhs = compile_operand(f.relation.rhs, c);
    }
    for (const auto& a : *atoms) {
      c.atoms.push_back({var_index(a.var), a.value});
      c.vars.push_back(c.atoms.back().var);
      if (a.value.is_int()) c.constants.push_back(a.value.as_int());
    }
    std::sort(c.vars.begin(), c.vars.end());
    c.vars.erase(std::unique(c.vars.begin(), c.vars.end()), c.vars.end());
    compiled_->by_id[c.id] = compiled_->constraints.size();
    compiled_->constraints.push_back(std::move(c));
  }

  auto& base = compiled_->base_constants;
  for (const auto& p : kb.products) {
    for (const auto& v : p.values) {
      if (v.is_int()) base.push_back(v.as_int());
    }
  }
  for (const auto& uv : kb.user_vars) {
    if (uv.domain.kind == Domain::Kind::kRange) {
      base.push_back(uv.domain.lo);
      base.push_back(uv.domain.hi);
    } else {
      for (const auto& v : uv.domain.values) {
        if (v.is_int()) base.push_back(v.as_int());
      }
    }
  }
}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;

std::optional<Scenario> Solver::find_solution(std::span<const ConstraintRef> active, const ExcludedSet& excluded,
                                              CheckStats* stats) const {
  if (stats != nullptr) ++stats->consistency_checks;
  Search search(*kb_, *compiled_, active, excluded, /*enumerate_all=*/false);
  std::optional<Scenario> found;
  search.run([&](const Scenario& s) {
    found = s;
    return false;
  });
  return found;
}

bool Solver::is_consistent(std::span<const ConstraintRef> active, const ExcludedSet& excluded,
                           CheckStats* stats) const {
  return find_solution(active, excluded, stats).has_value();
}

void Solver::for_each_solution(std::span<const ConstraintRef> active, const ExcludedSet& excluded,
                               const std::function<bool(const Scenario&)>& visit, CheckStats* stats) const {
  Search search(*kb_, *compiled_, active, excluded, /*enumerate_all=*/true);
  search.run([&](const Scenario& s) {
    if (stats != nullptr) ++stats->solutions_enumerated;
    return visit(s);
  });
}

void Solver::for_each_projection(std::span<const ConstraintRef> active, const ExcludedSet& excluded,
                                 const std::vector<std::size_t>& vars,
                                 const std::function<bool(const std::vector<Value>&)>& visit,
                                 CheckStats* stats) const {
  const Search shape(*kb_, *compiled_, active, excluded, /*enumerate_all=*/true);
  std::vector<std::pair<std::size_t, Value>> partial;

  // Returns false once the visitor asks to stop.
  std::function<bool(std::size_t)> step = [&](std::size_t depth) {
    if (stats != nullptr) ++stats->consistency_checks;
    const Search probe(*kb_, *compiled_, active, excluded, /*enumerate_all=*/false, partial);
    bool ok = false;
    probe.run([&](const Scenario&) {
      ok = true;
      return false;
    });
    if (!ok) return true;
    if (depth == vars.size()) {
      std::vector<Value> row;
      row.reserve(partial.size());
      for (const auto& entry : partial) row.push_back(entry.second);
      return visit(row);
    }
    for (const auto& v : shape.candidates[vars[depth]]) {
      partial.emplace_back(vars[depth], v);
      const bool go_on = step(depth + 1);
      partial.pop_back();
      if (!go_on) return false;
    }
    return true;
  };
  step(0);
}

std::vector<std::vector<Value>> Solver::enumerate_projections(std::span<const ConstraintRef> active,
                                                              const ExcludedSet& excluded,
                                                              const std::vector<std::size_t>& vars,
                                                              std::size_t limit, CheckStats* stats) const {
  std::vector<std::vector<Value>> out;
  if (limit == 0) return out;
  for_each_projection(
      active, excluded, vars,
      [&](const std::vector<Value>& row) {
        out.push_back(row);
        return out.size() < limit;
      },
      stats);
  return out;
}

bool is_consistent(const KnowledgeBase& kb, std::span<const ConstraintRef> active, const ExcludedSet& excluded,
                   CheckStats* stats) {
  return Solver(kb).is_consistent(active, excluded, stats);
}

std::vector<std::string> consideration_set(const Solver& solver, std::span<const ConstraintRef> active) {
  std::vector<std::string> items;
  std::vector<ConstraintRef> refs(active.begin(), active.end());
  refs.emplace_back(ProductPin{});
  for (const auto& p : solver.kb().products) {
    refs.back() = ProductPin{p.name};
    if (solver.is_consistent(refs)) items.push_back(p.name);
  }
  return items;
}

std::vector<std::string> consideration_set(const KnowledgeBase& kb, const std::vector<Requirement>& requirements) {
  const auto refs = to_refs(requirements);
  return consideration_set(Solver(kb), refs);
}

std::vector<Scenario> enumerate_solutions(const KnowledgeBase& kb, const std::vector<Requirement>& requirements,
                                          std::size_t limit, CheckStats* stats) {
  std::vector<Scenario> out;
  if (limit == 0) return out;
  const auto refs = to_refs(requirements);
  Solver(kb).for_each_solution(
      refs, {},
      [&](const Scenario& s) {
        out.push_back(s);
        return out.size() < limit;
      },
      stats);
  return out;
}

}  // namespace wrec::csp
