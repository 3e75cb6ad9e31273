#include <random>

#include <gtest/gtest.h>

#include "fuzz_input.hpp"
#include "wrec/dsl.hpp"
#include "wrec/fixtures.hpp"

using wrec::dsl::ParseError;
using wrec::dsl::parse;
using wrec::dsl::serialize;

namespace {

ParseError parse_error(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse error for:\n" << text;
  return ParseError(0, 0, ParseError::Kind::kSyntax, "");
}

constexpr std::string_view kMinimal =
    "&QUESTIONS\n"
    "usage? [A, B]\n"
    "&PRODUCTS\n"
    "kind_p\n"
    "p1: A\n";

}  // namespace

TEST(dsl, fixture_shape) {
  const auto kb = wrec::fixtures::paper_fixture();
  EXPECT_EQ(kb.user_vars.size(), 6U);
  EXPECT_EQ(kb.product_props.size(), 4U);
  EXPECT_EQ(kb.products.size(), 3U);
  EXPECT_EQ(kb.comp.size(), 2U);
  EXPECT_EQ(kb.filt.size(), 3U);
  ASSERT_EQ(kb.tests.size(), 1U);
  EXPECT_TRUE(kb.tests[0].show);
  EXPECT_TRUE(kb.find_user_var("country")->keep);
  EXPECT_EQ(kb.find_user_var("maxprice")->domain, wrec::Domain::range(0, 3000));
}

TEST(dsl, definition_rank_follows_text) {
  const auto kb = wrec::fixtures::paper_fixture();
  const auto ids = kb.constraint_ids();
  EXPECT_EQ(ids, (std::vector<std::string>{"c1", "c2", "c3", "c4", "c5"}));
  EXPECT_TRUE(kb.find_constraint("c1")->is_incompatibility());
  EXPECT_FALSE(kb.find_constraint("c3")->is_incompatibility());
}

TEST(dsl, section_order_is_irrelevant) {
  const auto a = parse(kMinimal);
  const auto b = parse("&PRODUCTS\nkind_p\np1: A\n&QUESTIONS\nusage? [A, B]\n");
  EXPECT_EQ(a, b);
}

TEST(dsl, no_products_is_a_reference_error) {
  const auto e = parse_error("&QUESTIONS\nusage? [A,B]");
  EXPECT_EQ(e.kind(), ParseError::Kind::kReference);
  EXPECT_NE(e.message().find("no products"), std::string::npos);
}

TEST(dsl, duplicate_domain_value) {
  const auto e = parse_error("&QUESTIONS\nusage? [A,A]");
  EXPECT_EQ(e.kind(), ParseError::Kind::kDomainViolation);
  EXPECT_EQ(e.line(), 2);
}

TEST(dsl, unknown_section_tag) {
  const auto e = parse_error("&QUESTIONS\nusage? [A]\n&RULES\n");
  EXPECT_EQ(e.kind(), ParseError::Kind::kSyntax);
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.column(), 1);
}

TEST(dsl, undeclared_variable_in_constraint) {
  std::string text(kMinimal);
  text += "&CONSTRAINTS\nincompatible { colour = A }\n";
  const auto e = parse_error(text);
  EXPECT_EQ(e.kind(), ParseError::Kind::kReference);
  EXPECT_EQ(e.line(), 7);
  EXPECT_EQ(e.column(), 16);
}

TEST(dsl, out_of_domain_literal) {
  std::string text(kMinimal);
  text += "&CONSTRAINTS\nincompatible { usage = C }\n";
  EXPECT_EQ(parse_error(text).kind(), ParseError::Kind::kDomainViolation);
}

TEST(dsl, duplicate_variable) {
  EXPECT_EQ(parse_error("&QUESTIONS\nusage? [A]\nusage? [B]\n&PRODUCTS\nk_p\np: A\n").kind(),
            ParseError::Kind::kReference);
}

TEST(dsl, missing_product_value) {
  const auto e = parse_error("&QUESTIONS\nusage? [A]\n&PRODUCTS\nk_p, price_p\np1: A\n");
  EXPECT_EQ(e.kind(), ParseError::Kind::kReference);
  EXPECT_EQ(e.line(), 5);
}

TEST(dsl, malformed_line) {
  const auto e = parse_error("&QUESTIONS\nusage [A]\n&PRODUCTS\nk_p\np: A\n");
  EXPECT_EQ(e.kind(), ParseError::Kind::kSyntax);
  EXPECT_EQ(e.line(), 2);
  EXPECT_EQ(e.column(), 7);
}

TEST(dsl, ordering_needs_integers) {
  std::string text(kMinimal);
  text += "&CONSTRAINTS\nusage <= kind_p\n";
  EXPECT_EQ(parse_error(text).kind(), ParseError::Kind::kDomainViolation);
}

TEST(dsl, comments_and_blank_lines) {
  const auto kb = parse("# header\n\n&QUESTIONS  # tail\nusage? [A, B] # why\n\n&PRODUCTS\nkind_p\np1: A\n");
  EXPECT_EQ(kb, parse(kMinimal));
}

TEST(dsl, guarded_filter) {
  std::string text(kMinimal);
  text += "&CONSTRAINTS\nusage = A -> usage = kind_p\n";
  const auto kb = parse(text);
  ASSERT_EQ(kb.filt.size(), 1U);
  const auto& f = std::get<wrec::Filter>(kb.filt[0].body);
  ASSERT_EQ(f.guard.size(), 1U);
  EXPECT_EQ(kb.filt[0].atom_count(), 2U);
}

TEST(dsl, roundtrip_fixture) {
  const auto kb = wrec::fixtures::paper_fixture();
  const auto text = serialize(kb);
  EXPECT_EQ(parse(text), kb);
  EXPECT_EQ(serialize(parse(text)), text);
}

TEST(dsl, serialize_keeps_flags) {
  const auto text = serialize(wrec::fixtures::paper_fixture());
  EXPECT_NE(text.find("country? [Austria, Germany, Italy] keep"), std::string::npos);
  EXPECT_NE(text.find("|show|"), std::string::npos);
}

TEST(dsl, roundtrip_generated) {
  wrec::fixtures::RandomParams params;
  params.max_tests = 3;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto inst = wrec::fixtures::random_instance(seed, params);
    const auto text = serialize(inst.kb);
    wrec::KnowledgeBase back;
    ASSERT_NO_THROW(back = parse(text)) << "seed " << seed << "\n" << text;
    EXPECT_EQ(back, inst.kb) << "seed " << seed << "\n" << text;
  }
}

TEST(dsl, fuzz_throws_only_parse_errors) {
  std::mt19937_64 rng(7);
  const auto source = wrec::fixtures::pc_source();
  for (int i = 0; i < 20000; ++i) {
    const auto text = fuzz::input(rng, source);
    try {
      const auto kb = parse(text);
      EXPECT_NO_THROW(kb.validate());
      EXPECT_EQ(parse(serialize(kb)), kb);
    } catch (const ParseError& e) {
      EXPECT_GE(e.line(), 1);
      EXPECT_GE(e.column(), 1);
    }
  }
}
