#include "wrec/service.hpp"

#include <csignal>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>

#include "wrec/dsl.hpp"
#include "wrec/kbtest.hpp"
#include "wrec/oracle.hpp"
#include "wrec/render.hpp"

namespace wrec::service {

using render::json;

namespace {

Response error(int status, const std::string& message) {
  return {status, render::body(json{{"error", message}})};
}

Response ok(const json& j) { return {200, render::body(j)}; }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

KbStore::KbStore(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (!dir_) return;
  std::filesystem::create_directories(*dir_);
  for (const auto& entry : std::filesystem::directory_iterator(*dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".wrec") continue;
    const auto name = entry.path().stem().string();
    if (!valid_name(name)) continue;
    auto source = read_file(entry.path());
    try {
      auto kb = dsl::parse(source);
      slots_[name] = std::make_shared<const Slot>(Slot{std::move(source), std::move(kb), 1});
    } catch (const dsl::ParseError&) {
      // A file that no longer parses is skipped rather than blocking startup.
    }
  }
}

bool KbStore::valid_name(const std::string& name) {
  if (name.empty() || name.size() > 128) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::uint64_t KbStore::put(const std::string& name, std::string source) {
  auto kb = dsl::parse(source);
  std::unique_lock lock(mu_);
  const auto it = slots_.find(name);
  const std::uint64_t version = it == slots_.end() ? 1 : it->second->version + 1;
  if (dir_) {
    const auto tmp = *dir_ / (name + ".wrec.tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << source;
    }
    std::filesystem::rename(tmp, *dir_ / (name + ".wrec"));
  }
  slots_[name] = std::make_shared<const Slot>(Slot{std::move(source), std::move(kb), version});
  return version;
}

std::shared_ptr<const KbStore::Slot> KbStore::get(const std::string& name) const {
  std::shared_lock lock(mu_);
  const auto it = slots_.find(name);
  return it == slots_.end() ? nullptr : it->second;
}

Response Service::put_kb(const std::string& name, const std::string& source) {
  if (!KbStore::valid_name(name)) return error(400, "invalid knowledge base name");
  try {
    return ok(json{{"version", store_.put(name, source)}});
  } catch (const dsl::ParseError& e) {
    return {422, render::body(render::parse_error_json(e))};
  }
}

Response Service::get_kb(const std::string& name) const {
  const auto slot = store_.get(name);
  if (!slot) return error(404, "unknown knowledge base " + name);
  return ok(render::kb_summary_json(slot->kb, slot->source, slot->version));
}

Response Service::recommend(const std::string& name, const std::string& request) const {
  const auto slot = store_.get(name);
  if (!slot) return error(404, "unknown knowledge base " + name);
  const auto payload = json::parse(request.empty() ? std::string("{}") : request, nullptr, false);
  if (payload.is_discarded()) return error(400, "request body is not valid JSON");
  try {
    return ok(render::recommend(slot->kb, payload, &cancel_));
  } catch (const render::RequestError& e) {
    return error(400, e.what());
  } catch (const Cancelled&) {
    return error(503, "cancelled");
  }
}

Response Service::run_tests(const std::string& name) const {
  const auto slot = store_.get(name);
  if (!slot) return error(404, "unknown knowledge base " + name);
  return ok(render::test_results_json(kbtest::run_tests(slot->kb)));
}

Response Service::diagnose(const std::string& name, const std::string& request) const {
  const auto slot = store_.get(name);
  if (!slot) return error(404, "unknown knowledge base " + name);
  const auto payload = json::parse(request.empty() ? std::string("{}") : request, nullptr, false);
  if (payload.is_discarded()) return error(400, "request body is not valid JSON");
  try {
    return ok(render::diagnose_kb(slot->kb, payload, &cancel_));
  } catch (const render::RequestError& e) {
    return error(400, e.what());
  } catch (const NoDiagnosisExists& e) {
    return error(422, e.what());
  } catch (const Cancelled&) {
    return error(503, "cancelled");
  }
}

void register_routes(httplib::Server& server, Service& service) {
  const auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  const std::string name = R"(/kb/([A-Za-z0-9_-]+))";

  server.Put(name, [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.put_kb(req.matches[1], req.body));
  });
  server.Get(name, [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.get_kb(req.matches[1]));
  });
  server.Post(name + "/recommend", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.recommend(req.matches[1], req.body));
  });
  server.Post(name + "/tests/run", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.run_tests(req.matches[1]));
  });
  server.Post(name + "/diagnose", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.diagnose(req.matches[1], req.body));
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(render::body(json{{"error", what}}), "application/json");
  });
}

namespace {
httplib::Server* g_server = nullptr;
Service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service != nullptr) g_service->cancel_all();
  if (g_server != nullptr) g_server->stop();
}
}  // namespace

bool serve(const std::string& address, int port, std::optional<std::filesystem::path> kb_dir) {
  KbStore store(std::move(kb_dir));
  Service service(store);
  httplib::Server server;
  register_routes(server, service);
  g_server = &server;
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const bool ok = server.listen(address, port);
  g_server = nullptr;
  g_service = nullptr;
  return ok;
}

}  // namespace wrec::service
