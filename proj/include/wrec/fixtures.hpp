#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "wrec/model.hpp"

namespace wrec::fixtures {

/// Text of the bundled PC recommender knowledge base (fixtures/pc.wrec).
std::string_view pc_source();

/// pc_source(), parsed.
KnowledgeBase paper_fixture();

/// The six requirements of the working example, in entry order:
/// usage=Scientific, eefficiency=high, maxprice=1700, country=Austria,
/// mb=MBSilver, cpu=CPUD.
std::vector<Requirement> paper_requirements();

struct RandomParams {
  std::size_t max_vars = 6;
  std::size_t max_values = 4;
  std::int64_t max_range_span = 3;  // integer ranges hold at most span + 1 values
  std::size_t max_products = 4;
  std::size_t max_constraints = 8;
  std::size_t max_tests = 0;
};

struct Instance {
  KnowledgeBase kb;
  std::vector<Requirement> requirements;  // entry ranks are a shuffled 1..k
};

/// Deterministic in `seed`. About half of the generated instances have
/// requirements that are inconsistent with the knowledge base.
Instance random_instance(std::uint64_t seed, const RandomParams& params = {});

}  // namespace wrec::fixtures
