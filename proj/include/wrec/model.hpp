#pragma once

// Core domain types of a constraint-based recommender knowledge base.
//
// A knowledge base has two kinds of variables: user variables (questions the
// customer answers) and product properties (columns of the product table).
// Constraints come in two flavours: incompatibilities over user variables and
// filter relations linking user variables, product properties and literals.
// The product table itself acts as one disjunctive constraint: a scenario must
// pick exactly one product row.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wrec {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A knowledge base value violates a structural invariant.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition (unresolved reference,
/// inconsistent background, invalid diagnosis).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The background alone is inconsistent, so no subset of the diagnosable
/// elements can restore consistency.
class NoDiagnosisExists : public Error {
 public:
  using Error::Error;
};

/// A domain value: either a symbol (`Scientific`) or an integer (`1700`).
class Value {
 public:
  Value() = default;
  Value(std::int64_t number) : v_(number) {}  // NOLINT(google-explicit-constructor)
  Value(int number) : v_(std::int64_t{number}) {}  // NOLINT
  Value(std::string symbol) : v_(std::move(symbol)) {}  // NOLINT
  Value(const char* symbol) : v_(std::string(symbol)) {}  // NOLINT

  /// Interprets a token the way the knowledge-base format does: a token that
  /// is an optionally signed digit string becomes a number, anything else a symbol.
  static Value from_token(const std::string& token);

  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  const std::string& as_symbol() const { return std::get<std::string>(v_); }
  std::string str() const;

  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value&, const Value&) = default;

 private:
  std::variant<std::int64_t, std::string> v_;
};

std::ostream& operator<<(std::ostream& os, const Value& v);

struct Domain {
  enum class Kind { kEnumerated, kRange };

  Kind kind = Kind::kEnumerated;
  std::vector<Value> values;  // kEnumerated only
  std::int64_t lo = 0;        // kRange only, inclusive
  std::int64_t hi = 0;

  static Domain enumerated(std::vector<Value> values);
  static Domain range(std::int64_t lo, std::int64_t hi);

  bool contains(const Value& v) const;
  /// True when every member is an integer, so ordering comparisons apply.
  bool is_integral() const;
  std::size_t size() const;

  friend bool operator==(const Domain&, const Domain&) = default;
};

struct UserVariable {
  std::string name;
  Domain domain;
  bool keep = false;  // requirements on this variable are never diagnosed

  friend bool operator==(const UserVariable&, const UserVariable&) = default;
};

/// A product-table column. Names end in `_p`; the domain is the set of values
/// the column takes, in order of first appearance.
struct ProductProperty {
  std::string name;
  Domain domain;

  friend bool operator==(const ProductProperty&, const ProductProperty&) = default;
};

struct Product {
  std::string name;
  std::vector<Value> values;  // positional, aligned with KnowledgeBase::product_props

  friend bool operator==(const Product&, const Product&) = default;
};

/// Unary requirement `var = value`. entry_rank 1 is the requirement the user
/// entered first, which is also the one they care about most.
struct Requirement {
  std::string var;
  Value value;
  int entry_rank = 0;

  friend bool operator==(const Requirement&, const Requirement&) = default;
};

struct Atom {
  std::string var;
  Value value;

  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class Cmp { kEq, kNe, kLe, kGe, kLt, kGt };

const char* to_string(Cmp op);
bool compare(const Value& lhs, Cmp op, const Value& rhs);

struct Operand {
  enum class Kind { kUserVar, kProductProp, kLiteral };

  Kind kind = Kind::kLiteral;
  std::string name;  // variable or property name
  Value literal;     // kLiteral only

  static Operand user_var(std::string name) { return {Kind::kUserVar, std::move(name), {}}; }
  static Operand product_prop(std::string name) { return {Kind::kProductProp, std::move(name), {}}; }
  static Operand constant(Value v) { return {Kind::kLiteral, {}, std::move(v)}; }

  friend bool operator==(const Operand&, const Operand&) = default;
};

struct Relation {
  Operand lhs;
  Cmp op = Cmp::kEq;
  Operand rhs;

  friend bool operator==(const Relation&, const Relation&) = default;
};

/// ¬(a₁ ∧ … ∧ aₖ) over user variables.
struct Incompatibility {
  std::vector<Atom> atoms;

  friend bool operator==(const Incompatibility&, const Incompatibility&) = default;
};

/// guard → relation; an empty guard means the relation must always hold.
struct Filter {
  std::vector<Atom> guard;
  Relation relation;

  friend bool operator==(const Filter&, const Filter&) = default;
};

struct ConstraintExpr {
  std::string id;           // "c<definition_rank>"
  int definition_rank = 0;  // 1-based position in the constraints section
  std::variant<Incompatibility, Filter> body;

  bool is_incompatibility() const { return std::holds_alternative<Incompatibility>(body); }
  /// Number of atoms, counting a filter's relation as one.
  std::size_t atom_count() const;

  friend bool operator==(const ConstraintExpr&, const ConstraintExpr&) = default;
};

std::string constraint_id(int definition_rank);

/// Human-readable text of a constraint, in knowledge-base syntax.
std::string to_text(const ConstraintExpr& c);

/// A positive regression test: the conjunction must stay consistent with the
/// knowledge base.
struct TestCase {
  std::string name;
  std::vector<Atom> atoms;
  bool show = false;

  std::vector<Requirement> as_requirements() const;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

struct KnowledgeBase {
  std::vector<UserVariable> user_vars;
  std::vector<ProductProperty> product_props;
  std::vector<Product> products;
  std::vector<ConstraintExpr> comp;
  std::vector<ConstraintExpr> filt;
  std::vector<TestCase> tests;

  const UserVariable* find_user_var(std::string_view name) const;
  const ProductProperty* find_product_prop(std::string_view name) const;
  const Product* find_product(std::string_view name) const;
  const ConstraintExpr* find_constraint(std::string_view id) const;

  std::optional<std::size_t> user_var_index(std::string_view name) const;
  std::optional<std::size_t> product_prop_index(std::string_view name) const;
  std::optional<std::size_t> product_index(std::string_view name) const;

  /// COMP followed by FILT, ordered by definition rank.
  std::vector<const ConstraintExpr*> constraints() const;
  std::vector<std::string> constraint_ids() const;

  /// Throws ModelError on the first violated invariant.
  void validate() const;

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

/// Throws ModelError unless every requirement names a declared user variable,
/// carries an in-domain value, and no variable or entry rank repeats.
void validate_requirements(const KnowledgeBase& kb, const std::vector<Requirement>& requirements);

// ---------------------------------------------------------------------------
// Constraint references: one vocabulary for everything a consistency check can
// be asked about.

struct KbConstraintRef {
  std::string id;
  friend bool operator==(const KbConstraintRef&, const KbConstraintRef&) = default;
  friend auto operator<=>(const KbConstraintRef&, const KbConstraintRef&) = default;
};

struct ProductPin {
  std::string product;
  friend bool operator==(const ProductPin&, const ProductPin&) = default;
  friend auto operator<=>(const ProductPin&, const ProductPin&) = default;
};

using ConstraintRef = std::variant<Requirement, KbConstraintRef, ProductPin>;

ConstraintRef requirement_ref(const Requirement& r);
ConstraintRef kb_ref(std::string id);
ConstraintRef product_ref(std::string product);

/// Stable label: the variable name for a requirement, the constraint id for a
/// knowledge-base constraint, `@product` for a pin.
std::string label(const ConstraintRef& ref);

std::vector<ConstraintRef> to_refs(const std::vector<Requirement>& requirements);

struct Diagnosis {
  enum class Kind { kRequirements, kKnowledgeBase };

  /// Elements in preference order, most important first.
  std::vector<ConstraintRef> elements;
  Kind kind = Kind::kRequirements;

  bool empty() const { return elements.empty(); }
  std::size_t size() const { return elements.size(); }
  bool contains(const ConstraintRef& ref) const;
  std::vector<std::string> labels() const;

  /// Set equality, ignoring element order.
  bool same_set(const Diagnosis& other) const;
};

/// Fraction of the requirements that a repair changes. Kept as an unreduced
/// numerator/denominator pair so it renders as `2/6`.
struct Support {
  std::int64_t changed = 0;
  std::int64_t total = 0;

  double value() const { return total == 0 ? 0.0 : static_cast<double>(changed) / total; }
  std::string str() const;

  /// Rational equality (2/6 == 1/3).
  friend bool operator==(const Support& a, const Support& b) {
    const std::int64_t at = a.total == 0 ? 1 : a.total;
    const std::int64_t bt = b.total == 0 ? 1 : b.total;
    return a.changed * bt == b.changed * at;
  }
};

struct Repair {
  Diagnosis diagnosis;
  std::vector<Requirement> adaptation;  // new values, one per diagnosed requirement
  std::vector<std::string> items;       // consideration set of R − Δ ∪ A
  Support support;
};

}  // namespace wrec
