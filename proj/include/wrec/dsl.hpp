#pragma once

// Plaintext knowledge-base format (`.wrec`).
//
//   &QUESTIONS
//   usage? [Scientific, Office, Multimedia]
//   maxprice? [0..3000]
//   country? [Austria, Germany] keep
//
//   &PRODUCTS
//   cpu_p, price_p
//   hw1: CPUS; 1400
//
//   &CONSTRAINTS
//   incompatible { usage = Scientific & cpu = CPUD }
//   maxprice >= price_p
//   usage = Scientific -> cpu = cpu_p
//
//   &TEST
//   test t1: usage = Scientific & cpu = CPUD |show|
//
// Lines are independent; `#` starts a comment. Sections may appear in any
// order. Product property names end in `_p`.

#include <string>
#include <string_view>

#include "wrec/model.hpp"

namespace wrec::dsl {

class ParseError : public Error {
 public:
  enum class Kind { kSyntax, kReference, kDomainViolation };

  ParseError(int line, int column, Kind kind, std::string message);

  int line() const { return line_; }
  int column() const { return column_; }
  Kind kind() const { return kind_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  Kind kind_;
  std::string message_;
};

const char* to_string(ParseError::Kind kind);

/// Parses a knowledge base. Throws ParseError; never anything else.
KnowledgeBase parse(std::string_view text);

/// Canonical text; parse(serialize(kb)) == kb for every valid kb.
std::string serialize(const KnowledgeBase& kb);

}  // namespace wrec::dsl
