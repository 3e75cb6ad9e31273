#pragma once

// Repair proposals for inconsistent requirements: for a diagnosis Δ, find
// adaptations A (new values for the diagnosed variables) such that R − Δ ∪ A
// is consistent, and list the products each adaptation admits.

#include <atomic>
#include <string>
#include <vector>

#include "wrec/model.hpp"

namespace wrec::repair {

inline constexpr std::size_t kDefaultMaxAlternatives = 10;
inline constexpr std::size_t kDefaultLeadingDiagnoses = 3;

/// Alternative adaptations for `diagnosis`, in the solver's enumeration order.
/// Adaptations that differ only in integer-range values and admit the same
/// products are reported once, with the smallest such values. `extra` joins
/// the background (e.g. a product pin). Throws ContractViolation if the
/// diagnosis is not a subset of `requirements` or R − Δ is inconsistent.
std::vector<Repair> repairs_for(const KnowledgeBase& kb, const std::vector<Requirement>& requirements,
                                const Diagnosis& diagnosis, std::size_t max_alternatives = kDefaultMaxAlternatives,
                                const std::vector<ConstraintRef>& extra = {});

struct DiagnosisGroup {
  Diagnosis diagnosis;
  std::vector<Repair> repairs;
};

struct RecommendationResult {
  enum class Kind { kSolutions, kRepairs, kUnrepairable };

  Kind kind = Kind::kSolutions;
  /// kSolutions: the consideration set. kRepairs: every item reachable by
  /// some repair, in diagnosis-preference order.
  std::vector<std::string> items;
  std::vector<DiagnosisGroup> groups;  // kRepairs only
};

const char* to_string(RecommendationResult::Kind kind);

/// Consideration set when the requirements are consistent; otherwise the
/// first `n_diagnoses` leading diagnoses, each with its repairs. Requirements
/// on keep-tagged variables are never diagnosed. Throws ModelError on
/// malformed requirements.
RecommendationResult recommend(const KnowledgeBase& kb, const std::vector<Requirement>& requirements,
                               std::size_t n_diagnoses = kDefaultLeadingDiagnoses,
                               std::size_t max_alternatives = kDefaultMaxAlternatives,
                               const std::atomic<bool>* cancel = nullptr);

/// Diagnosis of the requirements against one chosen product.
struct ItemDiagnosis {
  bool repairable = false;
  Diagnosis diagnosis;
  std::vector<Repair> repairs;
};

ItemDiagnosis diagnose_for_item(const KnowledgeBase& kb, const std::vector<Requirement>& requirements,
                                const std::string& product,
                                std::size_t max_alternatives = kDefaultMaxAlternatives,
                                const std::atomic<bool>* cancel = nullptr);

}  // namespace wrec::repair
