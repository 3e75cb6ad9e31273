#pragma once

// HTTP facade over the engine. Handlers are plain methods returning a status
// code and body so they can be exercised without a socket.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "wrec/model.hpp"

namespace httplib {
class Server;
}

namespace wrec::service {

/// Named knowledge bases. Readers get an immutable snapshot; writers replace
/// it wholesale, so a request in flight never observes a half-updated KB.
class KbStore {
 public:
  struct Slot {
    std::string source;
    KnowledgeBase kb;
    std::uint64_t version = 0;
  };

  /// With a directory, every accepted KB is written to `<dir>/<name>.wrec`
  /// and the directory's existing files are loaded at construction.
  explicit KbStore(std::optional<std::filesystem::path> dir = std::nullopt);

  /// Parses and stores `source`. Throws dsl::ParseError; returns the new version.
  std::uint64_t put(const std::string& name, std::string source);
  std::shared_ptr<const Slot> get(const std::string& name) const;

  static bool valid_name(const std::string& name);

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<const Slot>> slots_;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class Service {
 public:
  explicit Service(KbStore& store) : store_(store) {}

  Response put_kb(const std::string& name, const std::string& source);
  Response get_kb(const std::string& name) const;
  Response recommend(const std::string& name, const std::string& request) const;
  Response run_tests(const std::string& name) const;
  Response diagnose(const std::string& name, const std::string& request) const;

  /// Aborts in-flight searches with 503. Set on shutdown.
  void cancel_all() { cancel_.store(true); }

 private:
  KbStore& store_;
  std::atomic<bool> cancel_{false};
};

/// Wires the handlers onto `server`.
void register_routes(httplib::Server& server, Service& service);

/// Blocks serving until the process is stopped. Returns false if binding fails.
bool serve(const std::string& address, int port, std::optional<std::filesystem::path> kb_dir);

}  // namespace wrec::service
