#pragma once

#include <atomic>
#include <span>
#include <vector>

#include "wrec/csp.hpp"
#include "wrec/model.hpp"

namespace wrec {

/// Raised from inside a search when its cancellation flag is set.
class Cancelled : public Error {
 public:
  Cancelled() : Error("cancelled") {}
};

/// The consistency predicate the diagnosis algorithms are written against.
/// Implementations must be pure: equal inputs, equal answers.
class ConsistencyOracle {
 public:
  virtual ~ConsistencyOracle() = default;

  /// Counts the check in `stats` and honours the cancellation flag.
  bool check(std::span<const ConstraintRef> constraints, csp::CheckStats* stats) const {
    if (cancel_ != nullptr && cancel_->load(std::memory_order_relaxed)) throw Cancelled();
    if (stats != nullptr) ++stats->consistency_checks;
    return consistent(constraints);
  }

  void set_cancel_flag(const std::atomic<bool>* flag) { cancel_ = flag; }

 protected:
  virtual bool consistent(std::span<const ConstraintRef> constraints) const = 0;

 private:
  const std::atomic<bool>* cancel_ = nullptr;
};

/// Requirements against the full knowledge base C = COMP ∪ PROD ∪ FILT.
class RequirementOracle : public ConsistencyOracle {
 public:
  explicit RequirementOracle(const KnowledgeBase& kb) : solver_(kb) {}
  const csp::Solver& solver() const { return solver_; }

 protected:
  bool consistent(std::span<const ConstraintRef> constraints) const override {
    return solver_.is_consistent(constraints);
  }

 private:
  csp::Solver solver_;
};

namespace detail {

/// Index-set helpers shared by the divide-and-conquer algorithms. Index sets
/// refer to positions in a caller-owned element list.
using IndexSet = std::vector<std::size_t>;

inline std::vector<ConstraintRef> gather(std::span<const ConstraintRef> background,
                                         const std::vector<ConstraintRef>& items,
                                         std::initializer_list<const IndexSet*> parts) {
  std::vector<ConstraintRef> out(background.begin(), background.end());
  for (const IndexSet* part : parts) {
    for (auto i : *part) out.push_back(items[i]);
  }
  return out;
}

}  // namespace detail

}  // namespace wrec
