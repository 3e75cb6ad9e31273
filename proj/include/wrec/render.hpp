#pragma once

// JSON request decoding and response rendering shared by the HTTP service and
// the CLI's --json mode, so both emit the same bytes for the same input.

#include <atomic>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wrec/dsl.hpp"
#include "wrec/kbtest.hpp"
#include "wrec/model.hpp"
#include "wrec/repair.hpp"

namespace wrec::render {

using json = nlohmann::json;

/// A request the engine cannot act on (unknown variable, out-of-domain value,
/// malformed payload). Maps to HTTP 400 and CLI exit code 1.
class RequestError : public Error {
 public:
  using Error::Error;
};

/// Serialized response body: pretty-printed JSON plus a trailing newline.
std::string body(const json& j);

json value_json(const Value& v);
Value value_from_json(const json& j);

/// `{requirements:[{var, value}], n?, item?}` → requirements ranked by array
/// position. Throws RequestError.
std::vector<Requirement> requirements_from_json(const KnowledgeBase& kb, const json& requirements);

/// Parses a CLI `var=value` flag. Throws RequestError.
Requirement requirement_from_flag(const KnowledgeBase& kb, std::string_view flag, int entry_rank);

/// Full recommend request → response. Throws RequestError.
json recommend(const KnowledgeBase& kb, const json& request, const std::atomic<bool>* cancel = nullptr);

json recommendation_json(const KnowledgeBase& kb, const repair::RecommendationResult& result);
json item_diagnosis_json(const std::string& product, const repair::ItemDiagnosis& result,
                         const std::vector<std::string>& consideration);
json test_results_json(const std::vector<kbtest::TestResult>& results);

/// `{ordering?, n?}` → KB diagnosis response. Throws RequestError; throws
/// NoDiagnosisExists when no constraint removal can help.
json diagnose_kb(const KnowledgeBase& kb, const json& request, const std::atomic<bool>* cancel = nullptr);
json kb_diagnosis_json(const KnowledgeBase& kb, const kbtest::KbDiagnosisReport& report);

json kb_summary_json(const KnowledgeBase& kb, std::string_view source, std::uint64_t version);
json parse_error_json(const dsl::ParseError& e);

}  // namespace wrec::render
