#include "wrec/fixtures.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "wrec/dsl.hpp"

namespace wrec::fixtures {

namespace detail {
extern const char* const kPcSource;  // generated from fixtures/pc.wrec
}

std::string_view pc_source() { return detail::kPcSource; }

KnowledgeBase paper_fixture() { return dsl::parse(pc_source()); }

std::vector<Requirement> paper_requirements() {
  return {
      {"usage", "Scientific", 1}, {"eefficiency", "high", 2}, {"maxprice", 1700, 3},
      {"country", "Austria", 4},  {"mb", "MBSilver", 5},      {"cpu", "CPUD", 6},
  };
}

namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(unsigned percent) { return below(100) < percent; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

const std::vector<Value> kSymbols = {"A", "B", "C", "D", "E", "F"};

Value random_value(Gen& g, const Domain& d) {
  if (d.kind == Domain::Kind::kRange) return Value(static_cast<std::int64_t>(g.between(d.lo, d.hi)));
  return g.pick(d.values);
}

std::vector<Atom> random_atoms(Gen& g, const KnowledgeBase& kb, std::size_t count) {
  std::vector<std::size_t> idx(kb.user_vars.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), g.engine());
  idx.resize(std::min(count, idx.size()));
  std::sort(idx.begin(), idx.end());
  std::vector<Atom> atoms;
  for (auto i : idx) atoms.push_back({kb.user_vars[i].name, random_value(g, kb.user_vars[i].domain)});
  return atoms;
}

std::optional<Relation> random_relation(Gen& g, const KnowledgeBase& kb) {
  std::vector<std::size_t> sym_vars;
  std::vector<std::size_t> int_vars;
  for (std::size_t i = 0; i < kb.user_vars.size(); ++i) {
    (kb.user_vars[i].domain.is_integral() ? int_vars : sym_vars).push_back(i);
  }
  std::vector<std::size_t> sym_props;
  std::vector<std::size_t> int_props;
  for (std::size_t i = 0; i < kb.product_props.size(); ++i) {
    (kb.product_props[i].domain.is_integral() ? int_props : sym_props).push_back(i);
  }
  static const std::vector<Cmp> kAll = {Cmp::kEq, Cmp::kNe, Cmp::kLe, Cmp::kGe, Cmp::kLt, Cmp::kGt};

  for (int attempt = 0; attempt < 8; ++attempt) {
    switch (g.below(5)) {
      case 0:  // symbolic var vs symbolic property
        if (sym_vars.empty() || sym_props.empty()) break;
        return Relation{Operand::user_var(kb.user_vars[g.pick(sym_vars)].name), g.chance(80) ? Cmp::kEq : Cmp::kNe,
                        Operand::product_prop(kb.product_props[g.pick(sym_props)].name)};
      case 1:  // integer var vs integer property
        if (int_vars.empty() || int_props.empty()) break;
        return Relation{Operand::user_var(kb.user_vars[g.pick(int_vars)].name), g.pick(kAll),
                        Operand::product_prop(kb.product_props[g.pick(int_props)].name)};
      case 2: {  // unary restriction on a symbolic var
        if (sym_vars.empty()) break;
        const auto& uv = kb.user_vars[g.pick(sym_vars)];
        return Relation{Operand::user_var(uv.name), g.chance(50) ? Cmp::kEq : Cmp::kNe,
                        Operand::constant(g.pick(uv.domain.values))};
      }
      case 3:  // integer var vs literal
        if (int_vars.empty()) break;
        return Relation{Operand::user_var(kb.user_vars[g.pick(int_vars)].name), g.pick(kAll),
                        Operand::constant(Value(static_cast<std::int64_t>(g.below(8))))};
      case 4:  // two user vars of the same type
        if (int_vars.size() >= 2) {
          auto a = g.pick(int_vars);
          auto b = g.pick(int_vars);
          if (a == b) break;
          return Relation{Operand::user_var(kb.user_vars[a].name), g.pick(kAll),
                          Operand::user_var(kb.user_vars[b].name)};
        }
        if (sym_vars.size() >= 2) {
          auto a = g.pick(sym_vars);
          auto b = g.pick(sym_vars);
          if (a == b) break;
          return Relation{Operand::user_var(kb.user_vars[a].name), g.chance(50) ? Cmp::kEq : Cmp::kNe,
                          Operand::user_var(kb.user_vars[b].name)};
        }
        break;
    }
  }
  return std::nullopt;
}

}  // namespace

Instance random_instance(std::uint64_t seed, const RandomParams& params) {
  Gen g(seed);
  KnowledgeBase kb;

  const std::size_t n_vars = g.between(2, std::max<std::size_t>(2, params.max_vars));
  std::size_t ranges = 0;
  for (std::size_t i = 0; i < n_vars; ++i) {
    UserVariable uv;
    uv.name = "x" + std::to_string(i);
    if (ranges < 2 && g.chance(25)) {
      ++ranges;
      const auto lo = static_cast<std::int64_t>(g.below(3));
      const auto span = static_cast<std::size_t>(std::max<std::int64_t>(1, params.max_range_span));
      uv.domain = Domain::range(lo, lo + static_cast<std::int64_t>(g.between(1, span)));
    } else {
      const std::size_t k = g.between(2, std::max<std::size_t>(2, params.max_values));
      uv.domain = Domain::enumerated({kSymbols.begin(), kSymbols.begin() + static_cast<std::ptrdiff_t>(k)});
    }
    uv.keep = g.chance(12);
    kb.user_vars.push_back(std::move(uv));
  }

  const std::size_t n_props = g.between(1, 3);
  std::vector<bool> integral(n_props);
  for (std::size_t i = 0; i < n_props; ++i) {
    integral[i] = g.chance(40);
    kb.product_props.push_back({"q" + std::to_string(i) + "_p", Domain::enumerated({})});
  }
  const std::size_t n_products = g.between(1, std::max<std::size_t>(1, params.max_products));
  for (std::size_t p = 0; p < n_products; ++p) {
    Product prod;
    prod.name = "item" + std::to_string(p);
    for (std::size_t i = 0; i < n_props; ++i) {
      Value v = integral[i] ? Value(static_cast<std::int64_t>(g.below(9))) : kSymbols[g.below(params.max_values)];
      auto& dom = kb.product_props[i].domain.values;
      if (std::find(dom.begin(), dom.end(), v) == dom.end()) dom.push_back(v);
      prod.values.push_back(std::move(v));
    }
    kb.products.push_back(std::move(prod));
  }

  const std::size_t n_constraints = g.below(params.max_constraints + 1);
  int rank = 0;
  for (std::size_t i = 0; i < n_constraints; ++i) {
    ConstraintExpr c;
    if (g.chance(45)) {
      c.body = Incompatibility{random_atoms(g, kb, g.between(1, 3))};
    } else {
      auto rel = random_relation(g, kb);
      if (!rel) continue;
      Filter f;
      if (g.chance(30)) f.guard = random_atoms(g, kb, g.between(1, 2));
      f.relation = std::move(*rel);
      c.body = std::move(f);
    }
    c.definition_rank = ++rank;
    c.id = constraint_id(rank);
    (c.is_incompatibility() ? kb.comp : kb.filt).push_back(std::move(c));
  }

  const std::size_t n_tests = g.below(params.max_tests + 1);
  for (std::size_t i = 0; i < n_tests; ++i) {
    kb.tests.push_back({"t" + std::to_string(i + 1), random_atoms(g, kb, g.between(1, 3)), g.chance(50)});
  }

  Instance inst;
  const std::size_t n_req = g.between(std::min<std::size_t>(2, n_vars), n_vars);
  auto atoms = random_atoms(g, kb, n_req);
  std::vector<int> ranks(atoms.size());
  std::iota(ranks.begin(), ranks.end(), 1);
  std::shuffle(ranks.begin(), ranks.end(), g.engine());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    inst.requirements.push_back({atoms[i].var, atoms[i].value, ranks[i]});
  }
  kb.validate();
  inst.kb = std::move(kb);
  return inst;
}

}  // namespace wrec::fixtures
