#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "wrec/fixtures.hpp"
#include "wrec/service.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(WREC_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kFixture = WREC_FIXTURE_PATH;
const std::string kPaperFlags =
    " -r usage=Scientific -r eefficiency=high -r maxprice=1700 -r country=Austria -r mb=MBSilver -r cpu=CPUD";

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(cli, validate_fixture) {
  const auto r = run("validate " + kFixture);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("6 questions"), std::string::npos);
}

TEST(cli, validate_malformed_reports_position) {
  const auto path = write_temp("wrec_cli_bad.wrec", "&QUESTIONS\nusage? [A,A]\n");
  const auto r = run("validate " + path);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find(":2:"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("domain-violation"), std::string::npos) << r.out;
}

TEST(cli, missing_file_is_an_io_error) { EXPECT_EQ(run("validate /nonexistent/kb.wrec").code, 2); }

TEST(cli, usage_errors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("diagnose-kb " + kFixture + " --ordering random").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(cli, recommend_text) {
  const auto r = run("recommend " + kFixture + kPaperFlags);
  EXPECT_EQ(r.code, 0) << r.out;
  const auto first = r.out.find("remove: mb, cpu");
  const auto second = r.out.find("remove: usage");
  ASSERT_NE(first, std::string::npos) << r.out;
  ASSERT_NE(second, std::string::npos) << r.out;
  EXPECT_LT(first, second);
  EXPECT_NE(r.out.find("-> hw1 (support 2/6)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("-> energystar (support 1/6)"), std::string::npos) << r.out;
}

TEST(cli, recommend_solutions) {
  const auto r = run("recommend " + kFixture + " -r usage=Office");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("status: solutions"), std::string::npos) << r.out;
}

TEST(cli, recommend_unknown_variable) {
  const auto r = run("recommend " + kFixture + " -r colour=red");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("unknown variable colour"), std::string::npos);
}

TEST(cli, flag_order_is_importance_order) {
  const auto r = run("recommend " + kFixture + " -r mb=MBSilver -r cpu=CPUD -r usage=Scientific -n 1");
  EXPECT_NE(r.out.find("remove: usage"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("remove: mb"), std::string::npos) << r.out;
}

TEST(cli, recommend_json_matches_service) {
  wrec::service::KbStore store;
  wrec::service::Service service(store);
  service.put_kb("pc", std::string(wrec::fixtures::pc_source()));
  const auto body = service
                        .recommend("pc", R"({"requirements":[{"var":"usage","value":"Office"},
                                             {"var":"maxprice","value":1500}]})")
                        .body;
  const auto r = run("--json recommend " + kFixture + " -r usage=Office -r maxprice=1500");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, body);
}

TEST(cli, test_command_exit_codes) {
  const auto r = run("test " + kFixture);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL t1"), std::string::npos);

  std::string source(wrec::fixtures::pc_source());
  const std::string line = "incompatible { usage = Scientific & cpu = CPUD }\n";
  source.erase(source.find(line), line.size());
  const std::string line2 = "incompatible { usage = Scientific & mb = MBSilver }\n";
  source.erase(source.find(line2), line2.size());
  EXPECT_EQ(run("test " + write_temp("wrec_cli_fixed.wrec", source)).code, 0);
}

TEST(cli, diagnose_kb) {
  const auto r = run("diagnose-kb " + kFixture + " --ordering complexity");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("c1: incompatible"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("c2: incompatible"), std::string::npos) << r.out;
  const auto j = run("--json diagnose-kb " + kFixture);
  EXPECT_NE(j.out.find("\"all_pass\": false"), std::string::npos) << j.out;
}
