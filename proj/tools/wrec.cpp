// wrec: command-line front end for knowledge-base validation, recommendation,
// regression tests, knowledge-base diagnosis, and the HTTP service.
//
// Exit codes: 0 success, 1 domain-level failure, 2 usage or I/O error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wrec/dsl.hpp"
#include "wrec/kbtest.hpp"
#include "wrec/oracle.hpp"
#include "wrec/render.hpp"
#include "wrec/service.hpp"

namespace {

using wrec::render::json;

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;

struct IoError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError{"cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_parse_error(const std::string& path, const wrec::dsl::ParseError& e) {
  std::cerr << path << ":" << e.line() << ":" << e.column() << ": " << wrec::dsl::to_string(e.kind())
            << " error: " << e.message() << "\n";
}

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::string value_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void print_recommendation(const json& r) {
  const auto status = r.at("status").get<std::string>();
  if (r.contains("item")) std::cout << "item: " << r.at("item").get<std::string>() << "\n";
  std::cout << "status: " << status << "\n";
  if (status == "unrepairable") {
    std::cout << r.at("message").get<std::string>() << "\n";
    return;
  }
  if (status == "solutions") {
    std::cout << "items: " << join(r.at("items").get<std::vector<std::string>>()) << "\n";
    return;
  }
  for (const auto& d : r.at("diagnoses")) {
    std::cout << "remove: " << join(d.at("remove").get<std::vector<std::string>>()) << "\n";
    for (const auto& rep : d.at("repairs")) {
      std::vector<std::string> changes;
      for (const auto& [var, value] : rep.at("changes").items()) changes.push_back(var + "=" + value_text(value));
      std::cout << "  change " << join(changes) << " -> " << join(rep.at("items").get<std::vector<std::string>>())
                << " (support " << rep.at("support").get<std::string>() << ")\n";
    }
  }
}

struct Options {
  bool json = false;
  std::string file;
  std::vector<std::string> requirements;
  std::size_t n = wrec::repair::kDefaultLeadingDiagnoses;
  std::string item;
  std::string ordering = "definition";
  std::string address = "127.0.0.1";
  int port = 8080;
  std::string kb_dir;
};

int cmd_validate(const Options& o) {
  const auto source = read_file(o.file);
  try {
    const auto kb = wrec::dsl::parse(source);
    if (o.json) {
      std::cout << wrec::render::body(json{{"valid", true}});
    } else {
      std::cout << "ok: " << kb.user_vars.size() << " questions, " << kb.products.size() << " products, "
                << kb.comp.size() + kb.filt.size() << " constraints, " << kb.tests.size() << " tests\n";
    }
    return kOk;
  } catch (const wrec::dsl::ParseError& e) {
    if (o.json) {
      auto j = wrec::render::parse_error_json(e);
      j["valid"] = false;
      std::cout << wrec::render::body(j);
    } else {
      print_parse_error(o.file, e);
    }
    return kDomainFailure;
  }
}

wrec::KnowledgeBase load(const std::string& path) {
  const auto source = read_file(path);
  try {
    return wrec::dsl::parse(source);
  } catch (const wrec::dsl::ParseError& e) {
    print_parse_error(path, e);
    throw IoError{"invalid knowledge base"};
  }
}

int cmd_recommend(const Options& o) {
  const auto kb = load(o.file);
  json request = json::object();
  json reqs = json::array();
  int rank = 0;
  try {
    for (const auto& flag : o.requirements) {
      const auto r = wrec::render::requirement_from_flag(kb, flag, ++rank);
      reqs.push_back({{"var", r.var}, {"value", wrec::render::value_json(r.value)}});
    }
    request["requirements"] = std::move(reqs);
    request["n"] = o.n;
    if (!o.item.empty()) request["item"] = o.item;
    const auto response = wrec::render::recommend(kb, request);
    if (o.json) {
      std::cout << wrec::render::body(response);
    } else {
      print_recommendation(response);
    }
    return response.at("status") == "unrepairable" ? kDomainFailure : kOk;
  } catch (const wrec::render::RequestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFailure;
  }
}

int cmd_test(const Options& o) {
  const auto kb = load(o.file);
  const auto results = wrec::kbtest::run_tests(kb);
  bool all_pass = true;
  for (const auto& r : results) all_pass = all_pass && r.pass;
  if (o.json) {
    std::cout << wrec::render::body(wrec::render::test_results_json(results));
  } else {
    for (const auto& r : results) std::cout << (r.pass ? "pass " : "FAIL ") << r.name << (r.show ? " [show]" : "") << "\n";
    std::cout << (all_pass ? "all tests pass\n" : "some tests fail\n");
  }
  return all_pass ? kOk : kDomainFailure;
}

int cmd_diagnose_kb(const Options& o) {
  const auto kb = load(o.file);
  json request = {{"ordering", o.ordering}, {"n", o.n}};
  try {
    const auto response = wrec::render::diagnose_kb(kb, request);
    if (o.json) {
      std::cout << wrec::render::body(response);
    } else if (response.at("all_pass").get<bool>()) {
      std::cout << "all tests pass; nothing to diagnose\n";
    } else {
      for (const auto& d : response.at("diagnoses")) {
        std::cout << "diagnosis:\n";
        for (const auto& c : d.at("constraints")) {
          std::cout << "  " << c.at("id").get<std::string>() << ": " << c.at("text").get<std::string>() << "\n";
        }
      }
    }
    return kOk;
  } catch (const wrec::render::RequestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const wrec::NoDiagnosisExists& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFailure;
  }
}

int cmd_serve(const Options& o) {
  std::optional<std::filesystem::path> dir;
  if (!o.kb_dir.empty()) dir = o.kb_dir;
  std::cerr << "listening on " << o.address << ":" << o.port << "\n";
  if (!wrec::service::serve(o.address, o.port, dir)) {
    std::cerr << "error: cannot listen on " << o.address << ":" << o.port << "\n";
    return kUsage;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constraint-based recommender: validate, recommend, test, diagnose"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "Emit the service's JSON response bodies");

  auto* validate = app.add_subcommand("validate", "Parse and check a knowledge base");
  validate->add_option("file", o.file, "Knowledge base (.wrec)")->required();

  auto* recommend = app.add_subcommand("recommend", "Recommend items, or diagnose and repair the requirements");
  recommend->add_option("file", o.file, "Knowledge base (.wrec)")->required();
  recommend->add_option("-r,--req", o.requirements, "Requirement var=value; flag order is importance order");
  recommend->add_option("-n", o.n, "Number of leading diagnoses")->check(CLI::PositiveNumber);
  recommend->add_option("--item", o.item, "Diagnose against this product");

  auto* test = app.add_subcommand("test", "Run the knowledge base's test cases");
  test->add_option("file", o.file, "Knowledge base (.wrec)")->required();

  auto* diagnose = app.add_subcommand("diagnose-kb", "Find constraints responsible for failing tests");
  diagnose->add_option("file", o.file, "Knowledge base (.wrec)")->required();
  diagnose->add_option("--ordering", o.ordering, "definition | reverse | complexity")
      ->check(CLI::IsMember({"definition", "reverse", "complexity", "definition_order", "reverse_definition_order"}));
  diagnose->add_option("-n", o.n, "Number of leading diagnoses")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--addr", o.address, "Listen address")->envname("WREC_ADDR");
  serve->add_option("--port", o.port, "Listen port")->envname("WREC_PORT");
  serve->add_option("--kb-dir", o.kb_dir, "Directory mirroring stored knowledge bases")->envname("WREC_KB_DIR");

  for (auto* sub : {validate, recommend, test, diagnose}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*recommend) return cmd_recommend(o);
    if (*test) return cmd_test(o);
    if (*diagnose) return cmd_diagnose_kb(o);
    if (*serve) return cmd_serve(o);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
