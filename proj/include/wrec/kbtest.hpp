#pragma once

// Regression testing of a knowledge base against its positive test cases, and
// diagnosis of the knowledge-base constraints that make tests fail.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wrec/csp.hpp"
#include "wrec/oracle.hpp"

namespace wrec::kbtest {

struct TestResult {
  std::string name;
  bool pass = false;
  bool show = false;
};

/// Pass iff the test's assignments are consistent with every constraint not
/// in `excluded`.
std::vector<TestResult> run_tests(const KnowledgeBase& kb, const csp::ExcludedSet& excluded = {});

/// Total order on COMP ∪ FILT used as the preference for knowledge-base
/// diagnosis. The first constraint in the order is the most trusted.
enum class OrderingKey {
  kDefinitionOrder,         // earlier-defined constraints are more trusted
  kReverseDefinitionOrder,  // later-defined constraints are more trusted
  kComplexity,              // constraints with more atoms are diagnosed first
};

const char* to_string(OrderingKey key);
std::optional<OrderingKey> parse_ordering(std::string_view text);

/// Constraint ids, most trusted first.
std::vector<std::string> ordered_constraint_ids(const KnowledgeBase& kb, OrderingKey ordering);

/// consistent(S) holds iff every test is consistent with the knowledge-base
/// constraints in S (plus the product table). Constraints not referenced from
/// S are switched off.
class TestSuiteOracle : public ConsistencyOracle {
 public:
  explicit TestSuiteOracle(const KnowledgeBase& kb);

 protected:
  bool consistent(std::span<const ConstraintRef> constraints) const override;

 private:
  csp::Solver solver_;
  std::vector<std::vector<ConstraintRef>> tests_;
  std::vector<std::string> ids_;
};

struct KbDiagnosisReport {
  bool all_pass = false;
  std::vector<Diagnosis> diagnoses;  // kind = kKnowledgeBase, leading first
};

/// Leading minimal sets of constraints whose removal makes every test pass.
/// Throws NoDiagnosisExists when some test fails against the product table
/// alone.
KbDiagnosisReport diagnose_kb(const KnowledgeBase& kb, OrderingKey ordering = OrderingKey::kDefinitionOrder,
                              std::size_t n = 3, const std::atomic<bool>* cancel = nullptr);

}  // namespace wrec::kbtest
