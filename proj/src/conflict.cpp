#include "wrec/conflict.hpp"

#include <algorithm>

namespace wrec::conflict {

using wrec::detail::gather;
using wrec::detail::IndexSet;

std::vector<std::string> ConflictSet::labels() const {
  std::vector<std::string> out;
  for (const auto& e : elements) out.push_back(label(e));
  return out;
}

bool ConflictSet::same_set(const ConflictSet& other) const {
  if (elements.size() != other.elements.size()) return false;
  return std::all_of(elements.begin(), elements.end(), [&](const ConstraintRef& e) {
    return std::find(other.elements.begin(), other.elements.end(), e) != other.elements.end();
  });
}

namespace {

struct Run {
  const ConsistencyOracle& oracle;
  const std::vector<ConstraintRef>& items;
  csp::CheckStats* stats;
  std::span<const ConstraintRef> base;  // external background, always included

  bool consistent(const IndexSet& a, const IndexSet& b = {}) const {
    return oracle.check(gather(base, items, {&a, &b}), stats);
  }

  IndexSet qxp(const IndexSet& background, bool delta_nonempty, const IndexSet& candidates) const {
    if (delta_nonempty && !consistent(background)) return {};
    if (candidates.size() == 1) return candidates;
    const std::size_t k = (candidates.size() + 1) / 2;
    const IndexSet c1(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k));
    const IndexSet c2(candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());

    IndexSet b1 = background;
    b1.insert(b1.end(), c1.begin(), c1.end());
    const IndexSet d2 = qxp(b1, !c1.empty(), c2);

    IndexSet b2 = background;
    b2.insert(b2.end(), d2.begin(), d2.end());
    IndexSet d1 = qxp(b2, !d2.empty(), c1);

    d1.insert(d1.end(), d2.begin(), d2.end());
    return d1;
  }
};

}  // namespace

namespace detail {

std::optional<IndexSet> quickxplain(const ConsistencyOracle& oracle, std::span<const ConstraintRef> background,
                                    const std::vector<ConstraintRef>& items, const IndexSet& subset,
                                    csp::CheckStats* stats) {
  if (stats != nullptr) ++stats->conflict_extractions;
  const Run run{oracle, items, stats, background};
  if (!run.consistent({})) throw ContractViolation("quickxplain: background is inconsistent");
  if (subset.empty() || run.consistent(subset)) return std::nullopt;
  IndexSet cs = run.qxp({}, false, subset);
  // Report in candidate order.
  std::sort(cs.begin(), cs.end(), [&](std::size_t a, std::size_t b) {
    return std::find(subset.begin(), subset.end(), a) < std::find(subset.begin(), subset.end(), b);
  });
  return cs;
}

}  // namespace detail

std::optional<ConflictSet> quickxplain(const ConsistencyOracle& oracle, std::span<const ConstraintRef> background,
                                       std::span<const ConstraintRef> candidates, csp::CheckStats* stats) {
  const std::vector<ConstraintRef> items(candidates.begin(), candidates.end());
  IndexSet all(items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto cs = detail::quickxplain(oracle, background, items, all, stats);
  if (!cs) return std::nullopt;
  ConflictSet out;
  for (auto i : *cs) out.elements.push_back(items[i]);
  return out;
}

std::optional<ConflictSet> quickxplain(const KnowledgeBase& kb, std::span<const ConstraintRef> background,
                                       std::span<const ConstraintRef> candidates, csp::CheckStats* stats) {
  return quickxplain(RequirementOracle(kb), background, candidates, stats);
}

}  // namespace wrec::conflict
