#pragma once

// Conflict-driven diagnosis: Reiter's hitting-set DAG labelled with minimal
// conflicts from QuickXPlain, expanded breadth-first so that diagnoses come out
// by ascending cardinality. This is the baseline direct diagnosis avoids.

#include <optional>
#include <span>
#include <vector>

#include "wrec/conflict.hpp"
#include "wrec/oracle.hpp"

namespace wrec::hsdag {

struct Limits {
  std::optional<std::size_t> max_cardinality;
  std::optional<std::size_t> max_count;
};

struct Result {
  bool consistent = false;  // background ∪ diagnosable needed no repair
  std::vector<Diagnosis> diagnoses;
  std::vector<conflict::ConflictSet> conflicts;  // node labels, discovery order
};

/// All minimal diagnoses (subject to `limits`), sorted by cardinality and then
/// lexicographically by position in `diagnosable`. Throws ContractViolation
/// when the background is inconsistent.
Result all_minimal_diagnoses(const ConsistencyOracle& oracle, std::span<const ConstraintRef> background,
                             std::span<const ConstraintRef> diagnosable, const Limits& limits = {},
                             csp::CheckStats* stats = nullptr,
                             Diagnosis::Kind kind = Diagnosis::Kind::kRequirements);

Result all_minimal_diagnoses(const KnowledgeBase& kb, std::span<const ConstraintRef> background,
                             std::span<const ConstraintRef> diagnosable, const Limits& limits = {},
                             csp::CheckStats* stats = nullptr);

/// Every minimal conflict among `candidates`, in discovery order.
std::vector<conflict::ConflictSet> all_minimal_conflicts(const ConsistencyOracle& oracle,
                                                         std::span<const ConstraintRef> background,
                                                         std::span<const ConstraintRef> candidates,
                                                         csp::CheckStats* stats = nullptr);

std::vector<conflict::ConflictSet> all_minimal_conflicts(const KnowledgeBase& kb,
                                                         std::span<const ConstraintRef> background,
                                                         std::span<const ConstraintRef> candidates,
                                                         csp::CheckStats* stats = nullptr);

}  // namespace wrec::hsdag
