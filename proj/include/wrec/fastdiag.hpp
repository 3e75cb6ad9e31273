#pragma once

// Direct diagnosis. FastDiag finds the preferred minimal diagnosis by
// divide-and-conquer over consistency checks alone; it never extracts a
// conflict set. Leading diagnoses are enumerated by re-running it with
// elements of earlier diagnoses pinned into the background.
//
// Preference: diagnosable elements are listed most important first. Between
// two minimal diagnoses, compare their elements most-important-first; the
// preferred one has the less important element at the first position where
// they differ. Equivalently, the preferred diagnosis is the complement of the
// greedy maximal consistent subset built in importance order.

#include <span>
#include <vector>

#include "wrec/oracle.hpp"

namespace wrec::fastdiag {

/// Diagnosable elements, most important first.
struct PreferenceOrder {
  std::vector<ConstraintRef> elements;
};

/// Preferred minimal Δ ⊆ diagnosable such that background ∪ (diagnosable − Δ)
/// is consistent; empty when already consistent. Throws NoDiagnosisExists if
/// the background alone is inconsistent.
Diagnosis fastdiag(const ConsistencyOracle& oracle, const PreferenceOrder& diagnosable,
                   std::span<const ConstraintRef> background, csp::CheckStats* stats = nullptr,
                   Diagnosis::Kind kind = Diagnosis::Kind::kRequirements);

Diagnosis fastdiag(const KnowledgeBase& kb, const PreferenceOrder& diagnosable,
                   std::span<const ConstraintRef> background, csp::CheckStats* stats = nullptr);

/// Up to n distinct minimal diagnoses in preference order; the first equals
/// fastdiag()'s result. Empty when background ∪ diagnosable is consistent.
std::vector<Diagnosis> leading_diagnoses(const ConsistencyOracle& oracle, const PreferenceOrder& diagnosable,
                                         std::span<const ConstraintRef> background, std::size_t n,
                                         csp::CheckStats* stats = nullptr,
                                         Diagnosis::Kind kind = Diagnosis::Kind::kRequirements);

std::vector<Diagnosis> leading_diagnoses(const KnowledgeBase& kb, const PreferenceOrder& diagnosable,
                                         std::span<const ConstraintRef> background, std::size_t n,
                                         csp::CheckStats* stats = nullptr);

struct KeepSplit {
  PreferenceOrder diagnosable;          // sorted by entry rank, earliest first
  std::vector<ConstraintRef> pinned;    // requirements on keep-tagged variables
};

/// Moves requirements on keep-tagged variables into the background.
KeepSplit keep_filter(const std::vector<Requirement>& requirements, const KnowledgeBase& kb);

/// True when `a` is preferred over `b` under the comparator above, given both
/// as positions in the preference order.
bool preferred(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

}  // namespace wrec::fastdiag
