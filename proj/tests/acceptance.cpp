// Acceptance gate: one PASS/FAIL line per primary criterion. Exit status is
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "brute_force.hpp"
#include "fuzz_input.hpp"
#include "wrec/conflict.hpp"
#include "wrec/dsl.hpp"
#include "wrec/fastdiag.hpp"
#include "wrec/fixtures.hpp"
#include "wrec/hsdag.hpp"
#include "wrec/kbtest.hpp"
#include "wrec/repair.hpp"
#include "wrec/service.hpp"

namespace {

using wrec::ConstraintRef;
using Labels = std::vector<std::string>;
using Clock = std::chrono::steady_clock;

// Tolerances.
constexpr double kExampleSeconds = 1.0;      // P1, P2
constexpr double kPropertySeconds = 60.0;    // P5
constexpr std::uint64_t kPropertySeeds = 300;  // P5, P6: at least 200
constexpr std::uint64_t kRoundtripKbs = 100;   // P7
constexpr int kFuzzInputs = 100000;            // P7

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

Labels sorted(Labels v) {
  std::sort(v.begin(), v.end());
  return v;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << s << "s";
  return os.str();
}

Outcome p1_conflicts() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto kb = wrec::fixtures::paper_fixture();
  const auto refs = wrec::to_refs(wrec::fixtures::paper_requirements());
  std::set<Labels> got;
  for (const auto& c : wrec::hsdag::all_minimal_conflicts(kb, {}, refs)) got.insert(sorted(c.labels()));
  const double t = seconds_since(t0);
  o.require(got == std::set<Labels>{{"cpu", "usage"}, {"mb", "usage"}}, "conflict sets differ from {r1,r6},{r1,r5}");
  o.require(t < kExampleSeconds, "took " + fmt_seconds(t));
  if (o.pass) o.detail = "{usage,cpu} {usage,mb} in " + fmt_seconds(t);
  return o;
}

Outcome p2_diagnoses() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto kb = wrec::fixtures::paper_fixture();
  const auto r = wrec::fixtures::paper_requirements();
  const auto hs = wrec::hsdag::all_minimal_diagnoses(kb, {}, wrec::to_refs(r));
  o.require(hs.diagnoses.size() == 2 && hs.diagnoses[0].labels() == Labels{"usage"} &&
                sorted(hs.diagnoses[1].labels()) == Labels{"cpu", "mb"},
            "hsdag diagnoses differ from [{r1},{r5,r6}]");
  const auto split = wrec::fastdiag::keep_filter(r, kb);
  o.require(split.pinned.size() == 1 && wrec::label(split.pinned[0]) == "country", "country is not keep-excluded");
  const auto fd = wrec::fastdiag::fastdiag(kb, split.diagnosable, split.pinned);
  o.require(fd.labels() == Labels{"mb", "cpu"}, "fastdiag did not return {r5,r6}");
  const auto lead = wrec::fastdiag::leading_diagnoses(kb, split.diagnosable, split.pinned, 3);
  o.require(lead.size() == 2 && lead[0].labels() == Labels{"mb", "cpu"} && lead[1].labels() == Labels{"usage"},
            "leading diagnoses differ from [{r5,r6},{r1}]");
  const double t = seconds_since(t0);
  o.require(t < kExampleSeconds, "took " + fmt_seconds(t));
  if (o.pass) o.detail = "hsdag [{usage},{mb,cpu}], fastdiag {mb,cpu}, leading [{mb,cpu},{usage}] in " + fmt_seconds(t);
  return o;
}

Outcome p3_repairs() {
  Outcome o;
  const auto kb = wrec::fixtures::paper_fixture();
  const auto r = wrec::fixtures::paper_requirements();
  auto diagnosis = [&](const Labels& vars) {
    wrec::Diagnosis d;
    for (const auto& req : r) {
      if (std::find(vars.begin(), vars.end(), req.var) != vars.end()) d.elements.emplace_back(req);
    }
    return d;
  };
  const auto d1 = wrec::repair::repairs_for(kb, r, diagnosis({"mb", "cpu"}));
  bool found = false;
  for (const auto& rep : d1) {
    const bool a = rep.adaptation.size() == 2 && rep.adaptation[0].var == "mb" &&
                   rep.adaptation[0].value == wrec::Value("MBDiamond") && rep.adaptation[1].var == "cpu" &&
                   rep.adaptation[1].value == wrec::Value("CPUS");
    if (a) {
      found = true;
      o.require(rep.items == Labels{"hw1"}, "delta1 repair items are not [hw1]");
      o.require(rep.support.changed * 6 == 2 * rep.support.total, "delta1 support is not 2/6");
    }
  }
  o.require(found, "no repair A = {mb=MBDiamond, cpu=CPUS} for delta1");
  const auto d2 = wrec::repair::repairs_for(kb, r, diagnosis({"usage"}));
  o.require(!d2.empty(), "no repair for delta2");
  for (const auto& rep : d2) {
    o.require(rep.items == Labels{"energystar"}, "delta2 repair items are not [energystar]");
    o.require(rep.support.changed * 6 == 1 * rep.support.total, "delta2 support is not 1/6");
  }
  if (o.pass) o.detail = "delta1 -> [hw1] 2/6, delta2 -> [energystar] 1/6";
  return o;
}

Outcome p4_kb_diagnosis() {
  Outcome o;
  const auto kb = wrec::fixtures::paper_fixture();
  const auto report = wrec::kbtest::diagnose_kb(kb);
  o.require(!report.all_pass, "test t unexpectedly passes");
  o.require(report.diagnoses.size() == 1 && sorted(report.diagnoses[0].labels()) == Labels{"c1", "c2"},
            "KB diagnosis is not {c1,c2}");
  bool both_incompat = !report.diagnoses.empty();
  if (both_incompat) {
    for (const auto& id : report.diagnoses[0].labels()) {
      both_incompat = both_incompat && kb.find_constraint(id)->is_incompatibility();
    }
  }
  o.require(both_incompat, "diagnosed constraints are not the incompatibility constraints");
  if (o.pass) {
    wrec::csp::ExcludedSet removed;
    for (const auto& id : report.diagnoses[0].labels()) removed.insert(id);
    const auto results = wrec::kbtest::run_tests(kb, removed);
    o.require(std::all_of(results.begin(), results.end(), [](const auto& t) { return t.pass; }),
              "tests still fail after removing the diagnosis");
  }
  if (o.pass) o.detail = "{c1,c2} (both incompatibilities); all tests pass after removal";
  return o;
}

struct PropertyStats {
  std::uint64_t instances = 0;
  std::uint64_t inconsistent = 0;
  std::uint64_t mismatches_a = 0;
  std::uint64_t mismatches_b = 0;
  std::uint64_t mismatches_c = 0;
  std::uint64_t mismatches_d = 0;
  std::uint64_t bound_violations = 0;
  std::uint64_t fastdiag_calls = 0;
  std::uint64_t fastdiag_extractions = 0;
  double seconds = 0;
};

PropertyStats run_property_suite() {
  PropertyStats ps;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 0; seed < kPropertySeeds; ++seed) {
    const auto inst = wrec::fixtures::random_instance(seed);
    const auto& kb = inst.kb;
    ++ps.instances;
    const wrec::csp::Solver solver(kb);

    // (a) consistency on every subset of the requirements.
    const auto refs = wrec::to_refs(inst.requirements);
    if (!solver.is_consistent(refs)) ++ps.inconsistent;
    for (brute::Mask m = 0; m < (brute::Mask{1} << refs.size()); ++m) {
      std::vector<ConstraintRef> active;
      for (auto i : brute::bits(m)) active.push_back(refs[i]);
      if (solver.is_consistent(active) != brute::consistent(kb, active)) ++ps.mismatches_a;
    }

    const auto split = wrec::fastdiag::keep_filter(inst.requirements, kb);
    auto elements = split.diagnosable.elements;
    elements.insert(elements.end(), split.pinned.begin(), split.pinned.end());
    const brute::Mask cand = (brute::Mask{1} << split.diagnosable.elements.size()) - 1;
    const brute::Mask bg = ((brute::Mask{1} << elements.size()) - 1) & ~cand;
    const auto table = brute::Table::for_refs(kb, elements);
    if (!table.admits(bg)) continue;

    // (b) fastdiag and the documented preference, plus the check-count shape.
    wrec::csp::CheckStats stats;
    const auto fd = wrec::fastdiag::fastdiag(kb, split.diagnosable, split.pinned, &stats);
    const auto minimal = brute::minimal_diagnoses(table, bg, cand);
    const auto ranked = brute::by_preference(minimal);
    if (ranked.empty() || brute::mask_of(elements, fd.elements) != ranked.front()) ++ps.mismatches_b;
    ++ps.fastdiag_calls;
    ps.fastdiag_extractions += stats.conflict_extractions;
    const double n = static_cast<double>(split.diagnosable.elements.size());
    const double d = static_cast<double>(fd.size());
    const double bound = d == 0 ? 2.0 : 2 * d * (std::log2(n / d) + 1) + 2 * d;
    if (static_cast<double>(stats.consistency_checks) > bound) ++ps.bound_violations;

    // (c) hsdag ≡ exhaustive minimal diagnoses ≡ minimal hitting sets of all minimal conflicts.
    const auto hs = wrec::hsdag::all_minimal_diagnoses(kb, split.pinned, split.diagnosable.elements);
    std::vector<brute::Mask> got;
    for (const auto& dg : hs.diagnoses) got.push_back(brute::mask_of(elements, dg.elements));
    std::sort(got.begin(), got.end());
    const auto conflicts = brute::minimal_conflicts(table, bg, cand);
    if (hs.consistent) {
      if (minimal != std::vector<brute::Mask>{0}) ++ps.mismatches_c;
    } else if (got != minimal || minimal != brute::minimal_hitting_sets(conflicts, cand)) {
      ++ps.mismatches_c;
    }

    // (d) quickxplain soundness and minimality.
    const auto qx = wrec::conflict::quickxplain(kb, split.pinned, split.diagnosable.elements);
    if (qx.has_value() != !table.admits(bg | cand)) {
      ++ps.mismatches_d;
    } else if (qx) {
      const auto m = brute::mask_of(elements, qx->elements);
      if (std::find(conflicts.begin(), conflicts.end(), m) == conflicts.end()) ++ps.mismatches_d;
    }
  }
  ps.seconds = seconds_since(t0);
  return ps;
}

Outcome p5_oracles(const PropertyStats& ps) {
  Outcome o;
  o.require(ps.instances >= 200, "fewer than 200 instances");
  o.require(ps.mismatches_a == 0, std::to_string(ps.mismatches_a) + " is_consistent mismatches");
  o.require(ps.mismatches_b == 0, std::to_string(ps.mismatches_b) + " fastdiag mismatches");
  o.require(ps.mismatches_c == 0, std::to_string(ps.mismatches_c) + " hsdag mismatches");
  o.require(ps.mismatches_d == 0, std::to_string(ps.mismatches_d) + " quickxplain mismatches");
  o.require(ps.seconds < kPropertySeconds, "took " + fmt_seconds(ps.seconds));
  if (o.pass) {
    o.detail = std::to_string(ps.instances) + " instances (" + std::to_string(ps.inconsistent) +
               " inconsistent), 0 mismatches in " + fmt_seconds(ps.seconds);
  }
  return o;
}

Outcome p6_efficiency(const PropertyStats& ps) {
  Outcome o;
  o.require(ps.fastdiag_calls > 0, "no fastdiag calls");
  o.require(ps.bound_violations == 0, std::to_string(ps.bound_violations) + " check-count bound violations");
  o.require(ps.fastdiag_extractions == 0, std::to_string(ps.fastdiag_extractions) + " conflict extractions");
  if (o.pass) {
    o.detail = std::to_string(ps.fastdiag_calls) + " fastdiag calls within bound, 0 conflict extractions";
  }
  return o;
}

Outcome p7_parser() {
  Outcome o;
  auto roundtrip = [](const wrec::KnowledgeBase& kb) {
    const auto once = wrec::dsl::parse(wrec::dsl::serialize(kb));
    return once == kb && wrec::dsl::parse(wrec::dsl::serialize(once)) == once;
  };
  o.require(roundtrip(wrec::fixtures::paper_fixture()), "fixture roundtrip differs");
  wrec::fixtures::RandomParams params;
  params.max_tests = 3;
  for (std::uint64_t seed = 0; seed < kRoundtripKbs && o.pass; ++seed) {
    try {
      o.require(roundtrip(wrec::fixtures::random_instance(seed, params).kb), "roundtrip differs, seed " + std::to_string(seed));
    } catch (const std::exception& e) {
      o.require(false, "roundtrip threw on seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  std::mt19937_64 rng(2024);
  const auto source = wrec::fixtures::pc_source();
  int accepted = 0;
  for (int i = 0; i < kFuzzInputs && o.pass; ++i) {
    const auto text = fuzz::input(rng, source);
    try {
      const auto kb = wrec::dsl::parse(text);
      ++accepted;
      o.require(roundtrip(kb), "fuzz input accepted but does not roundtrip");
    } catch (const wrec::dsl::ParseError&) {
    } catch (const std::exception& e) {
      o.require(false, std::string("parse threw a non-ParseError: ") + e.what());
    }
  }
  if (o.pass) {
    o.detail = "fixture + " + std::to_string(kRoundtripKbs) + " generated KBs roundtrip; " +
               std::to_string(kFuzzInputs) + " fuzz inputs (" + std::to_string(accepted) + " accepted), no crash";
  }
  return o;
}

Outcome p8_parity() {
  Outcome o;
  const std::string flags =
      " -r usage=Scientific -r eefficiency=high -r maxprice=1700 -r country=Austria -r mb=MBSilver -r cpu=CPUD";
  const std::string payload = R"({"requirements":[
    {"var":"usage","value":"Scientific"},{"var":"eefficiency","value":"high"},
    {"var":"maxprice","value":1700},{"var":"country","value":"Austria"},
    {"var":"mb","value":"MBSilver"},{"var":"cpu","value":"CPUD"}]})";

  wrec::service::KbStore store;
  wrec::service::Service service(store);
  httplib::Server server;
  wrec::service::register_routes(server, service);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  std::string http_body;
  {
    httplib::Client client("127.0.0.1", port);
    auto put = client.Put("/kb/pc", std::string(wrec::fixtures::pc_source()), "text/plain");
    o.require(put && put->status == 200, "PUT /kb/pc failed");
    auto res = client.Post("/kb/pc/recommend", payload, "application/json");
    o.require(res && res->status == 200, "POST /kb/pc/recommend failed");
    if (res) http_body = res->body;
  }
  server.stop();
  th.join();

  std::string cli_out;
  const std::string cmd = std::string(WREC_CLI_PATH) + " --json recommend " + WREC_FIXTURE_PATH + flags;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  o.require(pipe != nullptr, "cannot run the CLI");
  if (pipe != nullptr) {
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) cli_out.append(buf.data(), n);
    const int status = ::pclose(pipe);
    o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "CLI exited with failure");
  }
  o.require(!http_body.empty() && cli_out == http_body, "CLI and service bodies differ");
  if (o.pass) o.detail = std::to_string(http_body.size()) + " bytes, identical";
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](const char* id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
    if (!o.pass) ++failed;
  };

  report("P1", "conflicts", p1_conflicts);
  report("P2", "diagnoses", p2_diagnoses);
  report("P3", "repairs", p3_repairs);
  report("P4", "kb diagnosis", p4_kb_diagnosis);
  PropertyStats ps;
  try {
    ps = run_property_suite();
  } catch (const std::exception& e) {
    std::cout << "property suite threw: " << e.what() << std::endl;
    ps.mismatches_a = ps.mismatches_b = 1;
  }
  report("P5", "oracle equivalence", [&] { return p5_oracles(ps); });
  report("P6", "direct-diagnosis efficiency", [&] { return p6_efficiency(ps); });
  report("P7", "parser", p7_parser);
  report("P8", "cli/service parity", p8_parity);
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
  return failed == 0 ? 0 : 1;
}
