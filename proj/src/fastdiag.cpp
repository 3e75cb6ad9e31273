#include "wrec/fastdiag.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace wrec::fastdiag {

using wrec::detail::gather;
using wrec::detail::IndexSet;

namespace {

IndexSet minus(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  for (auto x : a) {
    if (std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
  }
  return out;
}

struct Run {
  const ConsistencyOracle& oracle;
  const std::vector<ConstraintRef>& items;
  std::span<const ConstraintRef> background;
  csp::CheckStats* stats;

  bool consistent(const IndexSet& kept) const { return oracle.check(gather(background, items, {&kept}), stats); }

  // `c` is ordered least important first, so the first half of every split is
  // the half we would rather give up. If dropping it already restores
  // consistency, the second half is never looked at.
  IndexSet fd(bool delta_nonempty, const IndexSet& c, const IndexSet& ac) const {
    if (delta_nonempty && consistent(ac)) return {};
    if (c.size() == 1) return c;
    const std::size_t k = (c.size() + 1) / 2;
    const IndexSet c1(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(k));
    const IndexSet c2(c.begin() + static_cast<std::ptrdiff_t>(k), c.end());
    IndexSet d1 = fd(!c1.empty(), c2, minus(ac, c1));
    IndexSet d2 = fd(!d1.empty(), c1, minus(ac, d1));
    d1.insert(d1.end(), d2.begin(), d2.end());
    return d1;
  }
};

// `allowed` lists diagnosable positions most important first. Returns the
// diagnosis as ascending positions.
IndexSet fastdiag_indices(const ConsistencyOracle& oracle, const std::vector<ConstraintRef>& items,
                          std::span<const ConstraintRef> background, const IndexSet& allowed,
                          csp::CheckStats* stats) {
  const Run run{oracle, items, background, stats};
  if (!run.consistent({})) throw NoDiagnosisExists("background constraints are inconsistent on their own");
  if (allowed.empty() || run.consistent(allowed)) return {};
  const IndexSet least_first(allowed.rbegin(), allowed.rend());
  IndexSet d = run.fd(false, least_first, allowed);
  std::sort(d.begin(), d.end());
  return d;
}

Diagnosis make_diagnosis(const std::vector<ConstraintRef>& items, const IndexSet& idx, Diagnosis::Kind kind) {
  Diagnosis d;
  d.kind = kind;
  for (auto i : idx) d.elements.push_back(items[i]);
  return d;
}

}  // namespace

bool preferred(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return a.size() < b.size();
}

Diagnosis fastdiag(const ConsistencyOracle& oracle, const PreferenceOrder& diagnosable,
                   std::span<const ConstraintRef> background, csp::CheckStats* stats, Diagnosis::Kind kind) {
  const auto& items = diagnosable.elements;
  IndexSet all(items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return make_diagnosis(items, fastdiag_indices(oracle, items, background, all, stats), kind);
}

Diagnosis fastdiag(const KnowledgeBase& kb, const PreferenceOrder& diagnosable,
                   std::span<const ConstraintRef> background, csp::CheckStats* stats) {
  return fastdiag(RequirementOracle(kb), diagnosable, background, stats);
}

// Best-first search over pinned sets. A node pins some diagnosable elements
// into the background; its label is the preferred diagnosis avoiding them.
// Children pin one more element of the label. Popping labels in preference
// order yields the leading diagnoses in exactly that order: any not-yet-seen
// diagnosis Δ* is the label of some node whose pinned set avoids Δ*, and every
// node on the path to it carries a label at least as preferred as Δ*.
std::vector<Diagnosis> leading_diagnoses(const ConsistencyOracle& oracle, const PreferenceOrder& diagnosable,
                                         std::span<const ConstraintRef> background, std::size_t n,
                                         csp::CheckStats* stats, Diagnosis::Kind kind) {
  const auto& items = diagnosable.elements;
  std::vector<Diagnosis> out;
  if (n == 0) return out;

  IndexSet all(items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  struct Node {
    IndexSet label;
    IndexSet pinned;
    std::size_t seq;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.label != b.label) return preferred(b.label, a.label);
    return a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  std::set<IndexSet> visited{IndexSet{}};
  std::vector<IndexSet> closed;
  std::set<IndexSet> emitted;
  std::size_t seq = 0;

  IndexSet root = fastdiag_indices(oracle, items, background, all, stats);
  if (root.empty()) return out;
  open.push({std::move(root), {}, seq++});

  while (!open.empty() && out.size() < n) {
    Node node = open.top();
    open.pop();
    if (emitted.insert(node.label).second) {
      out.push_back(make_diagnosis(items, node.label, kind));
      if (out.size() == n) break;
    }
    for (auto e : node.label) {
      IndexSet pinned = node.pinned;
      pinned.insert(std::upper_bound(pinned.begin(), pinned.end(), e), e);
      if (!visited.insert(pinned).second) continue;
      const bool dead = std::any_of(closed.begin(), closed.end(), [&](const IndexSet& c) {
        return std::includes(pinned.begin(), pinned.end(), c.begin(), c.end());
      });
      if (dead) continue;

      std::vector<ConstraintRef> bg(background.begin(), background.end());
      for (auto i : pinned) bg.push_back(items[i]);
      IndexSet label;
      try {
        label = fastdiag_indices(oracle, items, bg, minus(all, pinned), stats);
      } catch (const NoDiagnosisExists&) {
        closed.push_back(pinned);
        continue;
      }
      open.push({std::move(label), std::move(pinned), seq++});
    }
  }
  return out;
}

std::vector<Diagnosis> leading_diagnoses(const KnowledgeBase& kb, const PreferenceOrder& diagnosable,
                                         std::span<const ConstraintRef> background, std::size_t n,
                                         csp::CheckStats* stats) {
  return leading_diagnoses(RequirementOracle(kb), diagnosable, background, n, stats);
}

KeepSplit keep_filter(const std::vector<Requirement>& requirements, const KnowledgeBase& kb) {
  std::vector<Requirement> sorted = requirements;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Requirement& a, const Requirement& b) { return a.entry_rank < b.entry_rank; });
  KeepSplit split;
  for (const auto& r : sorted) {
    const auto* uv = kb.find_user_var(r.var);
    if (uv != nullptr && uv->keep) {
      split.pinned.emplace_back(r);
    } else {
      split.diagnosable.elements.emplace_back(r);
    }
  }
  return split;
}

}  // namespace wrec::fastdiag
