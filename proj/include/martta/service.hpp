#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "martta/render.hpp"
#include "martta/workbench.hpp"

namespace martta {

struct ViewConfig {
  Stylist stylist;
  FoldState folds;
};

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;
  std::string body;
};

struct Reply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

/// One model behind the HTTP API. Mutations are applied one at a time under
/// a lock; every committed change bumps the revision.
class Session {
 public:
  Session(const Workbench& workbench, Model model);

  std::uint64_t revision() const;
  /// Adds or replaces a view.
  void configure_view(const std::string& id, ViewConfig config);
  Reply handle(const Request& request);

 private:
  Reply dispatch(const Request& request, std::unique_lock<std::mutex>& lock);
  /// Runs a mutation: checks the revision precondition, bumps on change.
  template <typename F>
  Reply mutate(const Request& request, const std::optional<std::uint64_t>& expected, F&& body);
  std::string fingerprint() const;

  const Workbench& workbench_;
  Editor editor_;
  std::map<std::string, ViewConfig> views_;
  std::uint64_t revision_ = 1;
  mutable std::mutex mutex_;
  std::condition_variable changed_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 0;
};

/// Blocking HTTP server over a session. `on_ready` receives the bound port.
class HttpServer {
 public:
  explicit HttpServer(Session& session);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves until stop(). Returns false if binding failed.
  bool listen(const ServeOptions& options, const std::function<void(int)>& on_ready = {});
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace martta
