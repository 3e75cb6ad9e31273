#include "wrec/repair.hpp"

#include <algorithm>
#include <set>

#include "wrec/csp.hpp"
#include "wrec/fastdiag.hpp"
#include "wrec/oracle.hpp"

namespace wrec::repair {

const char* to_string(RecommendationResult::Kind kind) {
  switch (kind) {
    case RecommendationResult::Kind::kSolutions: return "solutions";
    case RecommendationResult::Kind::kRepairs: return "repairs";
    case RecommendationResult::Kind::kUnrepairable: return "unrepairable";
  }
  return "?";
}

std::vector<Repair> repairs_for(const KnowledgeBase& kb, const std::vector<Requirement>& requirements,
                                const Diagnosis& diagnosis, std::size_t max_alternatives,
                                const std::vector<ConstraintRef>& extra) {
  std::vector<Requirement> removed;
  for (const auto& e : diagnosis.elements) {
    const auto* r = std::get_if<Requirement>(&e);
    if (r == nullptr || std::find(requirements.begin(), requirements.end(), *r) == requirements.end()) {
      throw ContractViolation("diagnosis element " + label(e) + " is not one of the requirements");
    }
    removed.push_back(*r);
  }

  std::vector<Requirement> kept;
  for (const auto& r : requirements) {
    if (std::find(removed.begin(), removed.end(), r) == removed.end()) kept.push_back(r);
  }
  std::vector<ConstraintRef> active = to_refs(kept);
  active.insert(active.end(), extra.begin(), extra.end());

  const csp::Solver solver(kb);
  if (!solver.is_consistent(active)) throw ContractViolation("requirements minus the diagnosis are still inconsistent");

  const Support support{static_cast<std::int64_t>(removed.size()), static_cast<std::int64_t>(requirements.size())};
  std::vector<Repair> out;
  if (max_alternatives == 0) return out;

  // Project onto the diagnosed variables, in declaration order.
  std::vector<std::size_t> vars;
  for (const auto& r : removed) vars.push_back(*kb.user_var_index(r.var));
  std::sort(vars.begin(), vars.end());

  const auto kept_refs = to_refs(kept);
  std::set<std::pair<std::vector<Value>, std::vector<std::string>>> seen;
  solver.for_each_projection(active, {}, vars, [&](const std::vector<Value>& row) {
    Repair rep;
    rep.diagnosis = diagnosis;
    rep.support = support;
    std::vector<Value> symbolic_key;
    for (const auto& r : removed) {
      const auto var = *kb.user_var_index(r.var);
      const auto pos = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), var) - vars.begin());
      rep.adaptation.push_back({r.var, row[pos], r.entry_rank});
      const bool range = kb.user_vars[var].domain.kind == Domain::Kind::kRange;
      symbolic_key.push_back(range ? Value() : row[pos]);
    }
    std::vector<ConstraintRef> repaired = kept_refs;
    for (const auto& a : rep.adaptation) repaired.emplace_back(a);
    rep.items = csp::consideration_set(solver, repaired);
    if (!seen.emplace(std::move(symbolic_key), rep.items).second) return true;
    out.push_back(std::move(rep));
    return out.size() < max_alternatives;
  });
  return out;
}

RecommendationResult recommend(const KnowledgeBase& kb, const std::vector<Requirement>& requirements,
                               std::size_t n_diagnoses, std::size_t max_alternatives,
                               const std::atomic<bool>* cancel) {
  validate_requirements(kb, requirements);
  RecommendationResult result;
  RequirementOracle oracle(kb);
  oracle.set_cancel_flag(cancel);
  const auto refs = to_refs(requirements);
  if (oracle.solver().is_consistent(refs)) {
    result.kind = RecommendationResult::Kind::kSolutions;
    result.items = csp::consideration_set(oracle.solver(), refs);
    return result;
  }

  const auto split = fastdiag::keep_filter(requirements, kb);
  std::vector<Diagnosis> leading;
  try {
    leading = fastdiag::leading_diagnoses(oracle, split.diagnosable, split.pinned, n_diagnoses);
  } catch (const NoDiagnosisExists&) {
    result.kind = RecommendationResult::Kind::kUnrepairable;
    return result;
  }

  result.kind = RecommendationResult::Kind::kRepairs;
  for (auto& d : leading) {
    DiagnosisGroup group{d, repairs_for(kb, requirements, d, max_alternatives)};
    for (const auto& rep : group.repairs) {
      for (const auto& item : rep.items) {
        if (std::find(result.items.begin(), result.items.end(), item) == result.items.end()) {
          result.items.push_back(item);
        }
      }
    }
    result.groups.push_back(std::move(group));
  }
  return result;
}

ItemDiagnosis diagnose_for_item(const KnowledgeBase& kb, const std::vector<Requirement>& requirements,
                                const std::string& product, std::size_t max_alternatives,
                                const std::atomic<bool>* cancel) {
  validate_requirements(kb, requirements);
  if (kb.find_product(product) == nullptr) throw ContractViolation("unknown product " + product);

  RequirementOracle oracle(kb);
  oracle.set_cancel_flag(cancel);
  auto split = fastdiag::keep_filter(requirements, kb);
  std::vector<ConstraintRef> background = split.pinned;
  background.push_back(product_ref(product));

  ItemDiagnosis out;
  try {
    out.diagnosis = fastdiag::fastdiag(oracle, split.diagnosable, background);
  } catch (const NoDiagnosisExists&) {
    return out;
  }
  out.repairable = true;
  out.repairs = repairs_for(kb, requirements, out.diagnosis, max_alternatives, {product_ref(product)});
  return out;
}

}  // namespace wrec::repair
