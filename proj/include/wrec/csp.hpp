#pragma once

// Finite-domain consistency checking over a knowledge base plus an arbitrary
// selection of constraints. Every diagnosis algorithm asks its questions
// through this module.
//
// Search picks a product row first, then assigns user variables in
// declaration order, checking each constraint as soon as its last variable is
// assigned. Integer-range variables are never enumerated in full: a free range
// variable takes values within distance m of the integer constants that occur
// in the problem (m = number of free range variables that constraints
// mention). Comparisons only see the relative order of values, so this finite
// set of representatives admits a solution iff the full range does.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "wrec/model.hpp"

namespace wrec::csp {

struct Scenario {
  std::vector<Value> assignment;  // aligned with KnowledgeBase::user_vars
  std::string product;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct CheckStats {
  std::uint64_t consistency_checks = 0;
  std::uint64_t solutions_enumerated = 0;
  std::uint64_t conflict_extractions = 0;  // bumped by conflict::quickxplain

  CheckStats& operator+=(const CheckStats& o) {
    consistency_checks += o.consistency_checks;
    solutions_enumerated += o.solutions_enumerated;
    conflict_extractions += o.conflict_extractions;
    return *this;
  }
};

/// Knowledge-base constraint ids that are switched off for one query.
using ExcludedSet = std::set<std::string>;

/// Compiled view of one knowledge base. Holds a reference: the knowledge base
/// must outlive the solver. All queries are const and reentrant.
class Solver {
 public:
  explicit Solver(const KnowledgeBase& kb);
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;
  Solver& operator=(Solver&&) = delete;

  const KnowledgeBase& kb() const { return *kb_; }

  /// True iff some scenario satisfies every requirement and pin in `active`
  /// and every knowledge-base constraint that is not in `excluded` (a
  /// constraint referenced from `active` is enforced regardless).
  /// Throws ContractViolation on references that do not resolve.
  bool is_consistent(std::span<const ConstraintRef> active, const ExcludedSet& excluded = {},
                     CheckStats* stats = nullptr) const;

  /// First satisfying scenario in enumeration order, if any.
  std::optional<Scenario> find_solution(std::span<const ConstraintRef> active, const ExcludedSet& excluded = {},
                                        CheckStats* stats = nullptr) const;

  /// Calls `visit` on satisfying scenarios in deterministic order until it
  /// returns false.
  void for_each_solution(std::span<const ConstraintRef> active, const ExcludedSet& excluded,
                         const std::function<bool(const Scenario&)>& visit, CheckStats* stats = nullptr) const;

  /// Visits distinct assignments of `vars` (user-variable indices) that
  /// extend to a full solution, in lexicographic value order, until `visit`
  /// returns false. Range variables take representative values only.
  void for_each_projection(std::span<const ConstraintRef> active, const ExcludedSet& excluded,
                           const std::vector<std::size_t>& vars,
                           const std::function<bool(const std::vector<Value>&)>& visit,
                           CheckStats* stats = nullptr) const;

  /// The first `limit` projections of for_each_projection().
  std::vector<std::vector<Value>> enumerate_projections(std::span<const ConstraintRef> active,
                                                        const ExcludedSet& excluded,
                                                        const std::vector<std::size_t>& vars, std::size_t limit,
                                                        CheckStats* stats = nullptr) const;

 private:
  struct Compiled;
  struct Search;

  const KnowledgeBase* kb_;
  std::unique_ptr<Compiled> compiled_;
};

bool is_consistent(const KnowledgeBase& kb, std::span<const ConstraintRef> active,
                   const ExcludedSet& excluded = {}, CheckStats* stats = nullptr);

/// Products that admit a scenario under `requirements`, in definition order.
std::vector<std::string> consideration_set(const KnowledgeBase& kb, const std::vector<Requirement>& requirements);
std::vector<std::string> consideration_set(const Solver& solver, std::span<const ConstraintRef> active);

/// Up to `limit` satisfying scenarios; empty iff inconsistent.
std::vector<Scenario> enumerate_solutions(const KnowledgeBase& kb, const std::vector<Requirement>& requirements,
                                          std::size_t limit, CheckStats* stats = nullptr);

}  // namespace wrec::csp
