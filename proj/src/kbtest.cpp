#include "wrec/kbtest.hpp"

#include <algorithm>

#include "wrec/fastdiag.hpp"

namespace wrec::kbtest {

std::vector<TestResult> run_tests(const KnowledgeBase& kb, const csp::ExcludedSet& excluded) {
  const csp::Solver solver(kb);
  std::vector<TestResult> out;
  for (const auto& t : kb.tests) {
    const auto refs = to_refs(t.as_requirements());
    out.push_back({t.name, solver.is_consistent(refs, excluded), t.show});
  }
  return out;
}

const char* to_string(OrderingKey key) {
  switch (key) {
    case OrderingKey::kDefinitionOrder: return "definition";
    case OrderingKey::kReverseDefinitionOrder: return "reverse";
    case OrderingKey::kComplexity: return "complexity";
  }
  return "?";
}

std::optional<OrderingKey> parse_ordering(std::string_view text) {
  if (text == "definition" || text == "definition_order") return OrderingKey::kDefinitionOrder;
  if (text == "reverse" || text == "reverse_definition_order") return OrderingKey::kReverseDefinitionOrder;
  if (text == "complexity") return OrderingKey::kComplexity;
  return std::nullopt;
}

std::vector<std::string> ordered_constraint_ids(const KnowledgeBase& kb, OrderingKey ordering) {
  auto cs = kb.constraints();
  switch (ordering) {
    case OrderingKey::kDefinitionOrder: break;
    case OrderingKey::kReverseDefinitionOrder: std::reverse(cs.begin(), cs.end()); break;
    case OrderingKey::kComplexity:
      // Fewest atoms first: the most complex constraints end up least trusted.
      std::stable_sort(cs.begin(), cs.end(),
                       [](const ConstraintExpr* a, const ConstraintExpr* b) { return a->atom_count() < b->atom_count(); });
      break;
  }
  std::vector<std::string> ids;
  for (const auto* c : cs) ids.push_back(c->id);
  return ids;
}

TestSuiteOracle::TestSuiteOracle(const KnowledgeBase& kb) : solver_(kb), ids_(kb.constraint_ids()) {
  for (const auto& t : kb.tests) tests_.push_back(to_refs(t.as_requirements()));
}

bool TestSuiteOracle::consistent(std::span<const ConstraintRef> constraints) const {
  csp::ExcludedSet excluded(ids_.begin(), ids_.end());
  std::vector<ConstraintRef> others;
  for (const auto& ref : constraints) {
    if (const auto* k = std::get_if<KbConstraintRef>(&ref)) {
      excluded.erase(k->id);
    } else {
      others.push_back(ref);
    }
  }
  std::vector<ConstraintRef> query;
  for (const auto& t : tests_) {
    query = others;
    query.insert(query.end(), t.begin(), t.end());
    if (!solver_.is_consistent(query, excluded)) return false;
  }
  return true;
}

KbDiagnosisReport diagnose_kb(const KnowledgeBase& kb, OrderingKey ordering, std::size_t n,
                              const std::atomic<bool>* cancel) {
  KbDiagnosisReport report;
  const auto results = run_tests(kb);
  report.all_pass = std::all_of(results.begin(), results.end(), [](const TestResult& r) { return r.pass; });
  if (report.all_pass) return report;

  fastdiag::PreferenceOrder order;
  for (auto& id : ordered_constraint_ids(kb, ordering)) order.elements.push_back(kb_ref(std::move(id)));

  TestSuiteOracle oracle(kb);
  oracle.set_cancel_flag(cancel);
  try {
    report.diagnoses = fastdiag::leading_diagnoses(oracle, order, {}, n, nullptr, Diagnosis::Kind::kKnowledgeBase);
  } catch (const NoDiagnosisExists&) {
    throw NoDiagnosisExists("a test case fails against the product table alone; removing constraints cannot help");
  }
  return report;
}

}  // namespace wrec::kbtest
