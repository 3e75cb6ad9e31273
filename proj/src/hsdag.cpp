#include "wrec/hsdag.hpp"

#include <algorithm>
#include <set>

namespace wrec::hsdag {

using wrec::detail::gather;
using wrec::detail::IndexSet;

namespace {

bool subset_of(const IndexSet& small, const IndexSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool disjoint(const IndexSet& a, const IndexSet& b) {
  return std::none_of(a.begin(), a.end(), [&](std::size_t x) { return std::binary_search(b.begin(), b.end(), x); });
}

struct Tree {
  std::vector<IndexSet> diagnoses;  // ascending positions
  std::vector<IndexSet> conflicts;  // in candidate order
  bool consistent = false;
};

// Breadth-first HS-DAG. Nodes are identified by their path set H (sorted), so
// two paths reaching the same H share a node. A node is closed when H already
// contains a diagnosis; it reuses any known conflict disjoint from H as its
// label before asking QuickXPlain for a new one.
Tree build(const ConsistencyOracle& oracle, std::span<const ConstraintRef> background,
           const std::vector<ConstraintRef>& items, const Limits& limits, csp::CheckStats* stats) {
  Tree tree;
  if (!oracle.check(background, stats)) throw ContractViolation("hsdag: background is inconsistent");

  IndexSet all(items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  std::vector<IndexSet> level{IndexSet{}};
  std::set<IndexSet> seen{IndexSet{}};
  for (std::size_t depth = 0; !level.empty(); ++depth) {
    std::vector<IndexSet> found_here;
    std::vector<IndexSet> next;
    for (const IndexSet& h : level) {
      const bool closed = std::any_of(tree.diagnoses.begin(), tree.diagnoses.end(),
                                      [&](const IndexSet& d) { return subset_of(d, h); });
      if (closed) continue;

      const IndexSet* label = nullptr;
      for (const auto& cs : tree.conflicts) {
        if (disjoint(cs, h)) {
          label = &cs;
          break;
        }
      }
      if (label == nullptr) {
        IndexSet remaining;
        std::set_difference(all.begin(), all.end(), h.begin(), h.end(), std::back_inserter(remaining));
        auto cs = conflict::detail::quickxplain(oracle, background, items, remaining, stats);
        if (!cs) {
          if (h.empty()) tree.consistent = true;
          found_here.push_back(h);
          continue;
        }
        tree.conflicts.push_back(std::move(*cs));
        label = &tree.conflicts.back();
      }

      if (limits.max_cardinality && depth >= *limits.max_cardinality) continue;
      const IndexSet label_copy = *label;  // conflicts may reallocate below
      for (auto e : label_copy) {
        IndexSet child = h;
        child.insert(std::upper_bound(child.begin(), child.end(), e), e);
        if (seen.insert(child).second) next.push_back(std::move(child));
      }
    }

    std::sort(found_here.begin(), found_here.end());
    for (auto& d : found_here) {
      if (!d.empty()) tree.diagnoses.push_back(std::move(d));
    }
    if (limits.max_count && tree.diagnoses.size() >= *limits.max_count) {
      tree.diagnoses.resize(*limits.max_count);
      break;
    }
    if (tree.consistent) break;
    level = std::move(next);
  }
  return tree;
}

}  // namespace

Result all_minimal_diagnoses(const ConsistencyOracle& oracle, std::span<const ConstraintRef> background,
                             std::span<const ConstraintRef> diagnosable, const Limits& limits,
                             csp::CheckStats* stats, Diagnosis::Kind kind) {
  const std::vector<ConstraintRef> items(diagnosable.begin(), diagnosable.end());
  Tree tree = build(oracle, background, items, limits, stats);
  Result out;
  out.consistent = tree.consistent;
  for (const auto& d : tree.diagnoses) {
    Diagnosis diag;
    diag.kind = kind;
    for (auto i : d) diag.elements.push_back(items[i]);
    out.diagnoses.push_back(std::move(diag));
  }
  for (const auto& cs : tree.conflicts) {
    conflict::ConflictSet set;
    for (auto i : cs) set.elements.push_back(items[i]);
    out.conflicts.push_back(std::move(set));
  }
  return out;
}

Result all_minimal_diagnoses(const KnowledgeBase& kb, std::span<const ConstraintRef> background,
                             std::span<const ConstraintRef> diagnosable, const Limits& limits,
                             csp::CheckStats* stats) {
  return all_minimal_diagnoses(RequirementOracle(kb), background, diagnosable, limits, stats);
}

std::vector<conflict::ConflictSet> all_minimal_conflicts(const ConsistencyOracle& oracle,
                                                         std::span<const ConstraintRef> background,
                                                         std::span<const ConstraintRef> candidates,
                                                         csp::CheckStats* stats) {
  return all_minimal_diagnoses(oracle, background, candidates, {}, stats).conflicts;
}

std::vector<conflict::ConflictSet> all_minimal_conflicts(const KnowledgeBase& kb,
                                                         std::span<const ConstraintRef> background,
                                                         std::span<const ConstraintRef> candidates,
                                                         csp::CheckStats* stats) {
  return all_minimal_conflicts(RequirementOracle(kb), background, candidates, stats);
}

}  // namespace wrec::hsdag
