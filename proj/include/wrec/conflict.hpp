#pragma once

// QuickXPlain: one preferred minimal conflict set at a time, by recursive
// halving of the candidate list.

#include <optional>
#include <span>
#include <vector>

#include "wrec/oracle.hpp"

namespace wrec::conflict {

struct ConflictSet {
  std::vector<ConstraintRef> elements;  // in candidate order

  std::vector<std::string> labels() const;
  bool same_set(const ConflictSet& other) const;
};

/// Returns std::nullopt when background ∪ candidates is consistent, otherwise
/// a minimal subset of `candidates` inconsistent with `background`. Throws
/// ContractViolation if the background alone is inconsistent.
std::optional<ConflictSet> quickxplain(const ConsistencyOracle& oracle, std::span<const ConstraintRef> background,
                                       std::span<const ConstraintRef> candidates, csp::CheckStats* stats = nullptr);

/// Requirements flavour: the background is joined with the knowledge base.
std::optional<ConflictSet> quickxplain(const KnowledgeBase& kb, std::span<const ConstraintRef> background,
                                       std::span<const ConstraintRef> candidates, csp::CheckStats* stats = nullptr);

namespace detail {

/// Index form used by the hitting-set search. `subset` holds positions in
/// `items`; the result is ordered like `subset`.
std::optional<wrec::detail::IndexSet> quickxplain(const ConsistencyOracle& oracle,
                                                  std::span<const ConstraintRef> background,
                                                  const std::vector<ConstraintRef>& items,
                                                  const wrec::detail::IndexSet& subset, csp::CheckStats* stats);

}  // namespace detail

}  // namespace wrec::conflict
