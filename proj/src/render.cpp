#include "wrec/render.hpp"

#include <algorithm>

#include "wrec/csp.hpp"

namespace wrec::render {

std::string body(const json& j) { return j.dump(2) + "\n"; }

json value_json(const Value& v) {
  if (v.is_int()) return v.as_int();
  return v.as_symbol();
}

Value value_from_json(const json& j) {
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_string()) return Value::from_token(j.get<std::string>());
  throw RequestError("value must be a string or an integer");
}

namespace {

void check_requirement(const KnowledgeBase& kb, const Requirement& r) {
  const auto* uv = kb.find_user_var(r.var);
  if (uv == nullptr) throw RequestError("unknown variable " + r.var);
  if (!uv->domain.contains(r.value)) throw RequestError("value " + r.value.str() + " is not in the domain of " + r.var);
}

std::size_t size_field(const json& request, const char* key, std::size_t fallback) {
  if (!request.contains(key)) return fallback;
  const auto& v = request.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) throw RequestError(std::string(key) + " must be a positive integer");
  return v.get<std::size_t>();
}

json strings(const std::vector<std::string>& v) {
  json out = json::array();
  for (const auto& s : v) out.push_back(s);
  return out;
}

json repair_json(const Repair& rep) {
  json changes = json::object();
  for (const auto& a : rep.adaptation) changes[a.var] = value_json(a.value);
  return {
      {"changes", std::move(changes)},
      {"items", strings(rep.items)},
      {"support", rep.support.str()},
      {"support_value", rep.support.value()},
  };
}

json group_json(const Diagnosis& d, const std::vector<Repair>& repairs) {
  json reps = json::array();
  for (const auto& r : repairs) reps.push_back(repair_json(r));
  return {{"remove", strings(d.labels())}, {"repairs", std::move(reps)}};
}

}  // namespace

std::vector<Requirement> requirements_from_json(const KnowledgeBase& kb, const json& requirements) {
  if (!requirements.is_array()) throw RequestError("requirements must be an array");
  std::vector<Requirement> out;
  int rank = 0;
  for (const auto& entry : requirements) {
    if (!entry.is_object() || !entry.contains("var") || !entry.contains("value") || !entry.at("var").is_string()) {
      throw RequestError("each requirement must be an object {var, value}");
    }
    Requirement r{entry.at("var").get<std::string>(), value_from_json(entry.at("value")), ++rank};
    check_requirement(kb, r);
    for (const auto& prev : out) {
      if (prev.var == r.var) throw RequestError("variable " + r.var + " is constrained twice");
    }
    out.push_back(std::move(r));
  }
  return out;
}

Requirement requirement_from_flag(const KnowledgeBase& kb, std::string_view flag, int entry_rank) {
  const auto eq = flag.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == flag.size()) {
    throw RequestError("requirement must look like var=value: " + std::string(flag));
  }
  Requirement r{std::string(flag.substr(0, eq)), Value::from_token(std::string(flag.substr(eq + 1))), entry_rank};
  check_requirement(kb, r);
  return r;
}

json recommendation_json(const KnowledgeBase& /*kb*/, const repair::RecommendationResult& result) {
  json out = {{"status", repair::to_string(result.kind)}};
  if (result.kind == repair::RecommendationResult::Kind::kUnrepairable) {
    out["message"] = "requirements on keep-tagged variables cannot be satisfied";
    return out;
  }
  out["items"] = strings(result.items);
  if (result.kind == repair::RecommendationResult::Kind::kRepairs) {
    json groups = json::array();
    for (const auto& g : result.groups) groups.push_back(group_json(g.diagnosis, g.repairs));
    out["diagnoses"] = std::move(groups);
  }
  return out;
}

json item_diagnosis_json(const std::string& product, const repair::ItemDiagnosis& result,
                         const std::vector<std::string>& consideration) {
  json out = {{"item", product}};
  if (!result.repairable) {
    out["status"] = "unrepairable";
    out["message"] = "no change to the diagnosable requirements admits " + product;
    return out;
  }
  if (result.diagnosis.empty()) {
    out["status"] = "solutions";
    out["items"] = strings(consideration);
    return out;
  }
  out["status"] = "repairs";
  std::vector<std::string> items;
  for (const auto& rep : result.repairs) {
    for (const auto& i : rep.items) {
      if (std::find(items.begin(), items.end(), i) == items.end()) items.push_back(i);
    }
  }
  out["items"] = strings(items);
  out["diagnoses"] = json::array({group_json(result.diagnosis, result.repairs)});
  return out;
}

json recommend(const KnowledgeBase& kb, const json& request, const std::atomic<bool>* cancel) {
  if (!request.is_object()) throw RequestError("request body must be a JSON object");
  const auto requirements =
      requirements_from_json(kb, request.contains("requirements") ? request.at("requirements") : json::array());
  const auto n = size_field(request, "n", repair::kDefaultLeadingDiagnoses);

  if (request.contains("item")) {
    const auto& item = request.at("item");
    if (!item.is_string() || kb.find_product(item.get<std::string>()) == nullptr) {
      throw RequestError("unknown item " + item.dump());
    }
    const auto name = item.get<std::string>();
    const auto result = repair::diagnose_for_item(kb, requirements, name, repair::kDefaultMaxAlternatives, cancel);
    std::vector<std::string> consideration;
    if (result.repairable && result.diagnosis.empty()) consideration = csp::consideration_set(kb, requirements);
    return item_diagnosis_json(name, result, consideration);
  }
  return recommendation_json(kb, repair::recommend(kb, requirements, n, repair::kDefaultMaxAlternatives, cancel));
}

json test_results_json(const std::vector<kbtest::TestResult>& results) {
  json arr = json::array();
  for (const auto& r : results) {
    arr.push_back({{"name", r.name}, {"status", r.pass ? "pass" : "fail"}, {"show", r.show}});
  }
  return {{"results", std::move(arr)}};
}

json kb_diagnosis_json(const KnowledgeBase& kb, const kbtest::KbDiagnosisReport& report) {
  json diags = json::array();
  for (const auto& d : report.diagnoses) {
    json cs = json::array();
    for (const auto& id : d.labels()) {
      const auto* c = kb.find_constraint(id);
      cs.push_back({{"id", id}, {"text", c != nullptr ? to_text(*c) : std::string()}});
    }
    diags.push_back({{"constraints", std::move(cs)}});
  }
  return {{"all_pass", report.all_pass}, {"diagnoses", std::move(diags)}};
}

json diagnose_kb(const KnowledgeBase& kb, const json& request, const std::atomic<bool>* cancel) {
  if (!request.is_object()) throw RequestError("request body must be a JSON object");
  auto ordering = kbtest::OrderingKey::kDefinitionOrder;
  if (request.contains("ordering")) {
    const auto& o = request.at("ordering");
    const auto parsed = o.is_string() ? kbtest::parse_ordering(o.get<std::string>()) : std::nullopt;
    if (!parsed) throw RequestError("ordering must be one of definition, reverse, complexity");
    ordering = *parsed;
  }
  const auto n = size_field(request, "n", 3);
  auto out = kb_diagnosis_json(kb, kbtest::diagnose_kb(kb, ordering, n, cancel));
  out["ordering"] = kbtest::to_string(ordering);
  return out;
}

json kb_summary_json(const KnowledgeBase& kb, std::string_view source, std::uint64_t version) {
  json questions = json::array();
  for (const auto& uv : kb.user_vars) {
    json domain;
    if (uv.domain.kind == Domain::Kind::kRange) {
      domain = {{"kind", "range"}, {"lo", uv.domain.lo}, {"hi", uv.domain.hi}};
    } else {
      json values = json::array();
      for (const auto& v : uv.domain.values) values.push_back(value_json(v));
      domain = {{"kind", "enumerated"}, {"values", std::move(values)}};
    }
    questions.push_back({{"name", uv.name}, {"domain", std::move(domain)}, {"keep", uv.keep}});
  }
  json products = json::array();
  for (const auto& p : kb.products) products.push_back(p.name);
  json tests = json::array();
  for (const auto& t : kb.tests) tests.push_back(t.name);
  return {
      {"source", std::string(source)}, {"version", version}, {"questions", std::move(questions)},
      {"products", std::move(products)}, {"tests", std::move(tests)},
  };
}

json parse_error_json(const dsl::ParseError& e) {
  return {
      {"error", "parse"}, {"kind", dsl::to_string(e.kind())}, {"line", e.line()},
      {"column", e.column()}, {"message", e.message()},
  };
}

}  // namespace wrec::render
