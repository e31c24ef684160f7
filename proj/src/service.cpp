#include "martta/service.hpp"

#include <cctype>
#include <chrono>

#include "httplib.h"
#include "json.hpp"
#include "martta/error.hpp"
#include "martta/persistence.hpp"

namespace martta {

namespace {

using nlohmann::json;

struct BadRequest {
  std::string message;
};

Reply json_reply(int status, const json& body) {
  Reply r;
  r.status = status;
  r.body = body.dump() + "\n";
  return r;
}

json parse_body(const Request& request) {
  if (request.body.empty()) return json::object();
  try {
    auto j = json::parse(request.body);
    if (!j.is_object()) throw BadRequest{"body must be a JSON object"};
    return j;
  } catch (const json::parse_error& e) {
    throw BadRequest{e.what()};
  }
}

std::string string_field(const json& body, const char* key, bool required = true) {
  if (!body.contains(key)) {
    if (required) throw BadRequest{std::string("missing field '") + key + "'"};
    return {};
  }
  if (!body[key].is_string()) throw BadRequest{std::string("field '") + key + "' must be a string"};
  return body[key].get<std::string>();
}

std::optional<std::uint64_t> precondition(const Request& request, const json& body) {
  if (body.contains("revision")) {
    if (!body["revision"].is_number_unsigned()) throw BadRequest{"revision must be a non-negative integer"};
    return body["revision"].get<std::uint64_t>();
  }
  for (const auto& [name, value] : request.headers) {
    std::string lower = name;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower != "if-match") continue;
    std::string digits = value;
    std::erase(digits, '"');
    try {
      std::size_t used = 0;
      auto n = std::stoull(digits, &used);
      if (used == digits.size()) return n;
    } catch (...) {
    }
    throw BadRequest{"If-Match must be a revision number"};
  }
  return std::nullopt;
}

json diagnostic_json(const Diagnostic& d) {
  return json{{"id", cpp::diagnostic_id(d)},
              {"path", d.node_path.to_string()},
              {"severity", std::string(severity_name(d.severity))},
              {"code", d.code},
              {"message", d.message},
              {"fixes", d.fixes}};
}

json state_json(const Editor& editor) {
  json s = json::object();
  s["focus"] = editor.model().focus().to_string();
  s["pending"] = editor.pending_keys();
  if (const auto& session = editor.session()) {
    s["session"] = json{{"target", session->target.to_string()},
                        {"kind", std::string(editor_kind_name(session->kind))},
                        {"draft", session->draft},
                        {"purpose", session->purpose},
                        {"completions", session->completions}};
  } else {
    s["session"] = nullptr;
  }
  return s;
}

/// The focused node when it can fold; placeholders keep "{" for entry.
std::optional<NodePath> fold_target(const Model& model) {
  auto p = model.resolve(model.focus());
  if (model.is_placeholder(p) || !is_foldable(model, p)) return std::nullopt;
  return p;
}

}  // namespace

Session::Session(const Workbench& workbench, Model model) : workbench_(workbench), editor_(workbench.editor(std::move(model))) {
  views_["default"] = {};
  ViewConfig underscore;
  underscore.stylist.identifier_style = IdentifierStyle::Underscore;
  views_["underscore"] = underscore;
}

std::uint64_t Session::revision() const {
  std::lock_guard lock(mutex_);
  return revision_;
}

void Session::configure_view(const std::string& id, ViewConfig config) {
  std::lock_guard lock(mutex_);
  views_[id] = std::move(config);
  ++revision_;
  changed_.notify_all();
}

std::string Session::fingerprint() const {
  std::string out = save(editor_.model());
  out += state_json(editor_).dump();
  for (const auto& [id, view] : views_) {
    out += id;
    for (const auto& p : view.folds) out += "|" + p.to_string();
  }
  return out;
}

template <typename F>
Reply Session::mutate(const Request&, const std::optional<std::uint64_t>& expected, F&& body) {
  if (expected && *expected != revision_)
    return json_reply(409, {{"error", "StaleRevision"}, {"revision", revision_}, {"expected", *expected}});
  const auto before = fingerprint();
  json out = body();
  if (fingerprint() != before) {
    ++revision_;
    changed_.notify_all();
  }
  out["revision"] = revision_;
  if (!out.contains("state")) out["state"] = state_json(editor_);
  return json_reply(200, out);
}

Reply Session::handle(const Request& request) {
  std::unique_lock lock(mutex_);
  Reply reply;
  try {
    reply = dispatch(request, lock);
  } catch (const BadRequest& e) {
    reply = json_reply(400, {{"error", "BadRequest"}, {"message", e.message}});
  } catch (const Error& e) {
    reply = json_reply(422, {{"error", std::string(e.name())}, {"message", e.what()}});
  }
  reply.headers["X-Revision"] = std::to_string(revision_);
  return reply;
}

Reply Session::dispatch(const Request& request, std::unique_lock<std::mutex>& lock) {
  const auto& path = request.path;
  const auto& method = request.method;
  auto view_of = [&](const std::string& id) -> ViewConfig& {
    auto it = views_.find(id.empty() ? "default" : id);
    if (it == views_.end()) throw BadRequest{"unknown view '" + id + "'"};
    return it->second;
  };
  auto query = [&](const std::string& key) {
    auto it = request.query.find(key);
    return it == request.query.end() ? std::string() : it->second;
  };

  if (method == "GET" && (path == "/render" || path == "/")) {
    const auto& view = view_of(query("view"));
    Reply r;
    r.content_type = "text/html; charset=utf-8";
    r.body = render(editor_.model(), view.stylist, view.folds).html;
    return r;
  }
  if (method == "GET" && path == "/diagnostics") {
    json list = json::array();
    for (const auto& d : editor_.model().validate_structure()) list.push_back(diagnostic_json(d));
    for (const auto& d : cpp::check_semantics(editor_.model())) list.push_back(diagnostic_json(d));
    return json_reply(200, {{"revision", revision_}, {"diagnostics", list}});
  }
  if (method == "GET" && path == "/program") {
    Reply r;
    r.body = save(editor_.model());
    return r;
  }
  if (method == "GET" && path == "/state") {
    auto s = state_json(editor_);
    s["revision"] = revision_;
    json views = json::object();
    for (const auto& [id, v] : views_) {
      json folds = json::array();
      for (const auto& p : v.folds) folds.push_back(p.to_string());
      views[id] = {{"identifier_style", std::string(identifier_style_name(v.stylist.identifier_style))},
                   {"always_parenthesize", v.stylist.always_parenthesize_operations},
                   {"folds", folds}};
    }
    s["views"] = views;
    return json_reply(200, s);
  }
  if (method == "GET" && path == "/tokens") return json_reply(200, {{"tokens", token_vocabulary()}});
  if (method == "GET" && path == "/events") {
    std::uint64_t after = 0;
    long long timeout_ms = 25000;
    try {
      if (!query("after").empty()) after = std::stoull(query("after"));
      if (!query("timeout_ms").empty()) timeout_ms = std::min(std::stoll(query("timeout_ms")), 60000LL);
    } catch (...) {
      throw BadRequest{"after and timeout_ms must be integers"};
    }
    const bool changed = changed_.wait_for(lock, std::chrono::milliseconds(std::max(0LL, timeout_ms)),
                                           [&] { return revision_ > after; });
    return json_reply(200, {{"revision", revision_}, {"changed", changed}});
  }

  if (method == "PUT" && path == "/view") {
    auto body = parse_body(request);
    auto id = string_field(body, "id");
    ViewConfig config;
    if (auto it = views_.find(id); it != views_.end()) config = it->second;
    if (body.contains("identifier_style"))
      config.stylist.identifier_style = parse_identifier_style(string_field(body, "identifier_style"));
    if (body.contains("always_parenthesize")) {
      if (!body["always_parenthesize"].is_boolean()) throw BadRequest{"always_parenthesize must be a boolean"};
      config.stylist.always_parenthesize_operations = body["always_parenthesize"].get<bool>();
    }
    auto expected = precondition(request, body);
    return mutate(request, expected, [&] {
      views_[id] = std::move(config);
      return json{{"view", id}};
    });
  }

  if (method != "POST" && method != "PUT") throw BadRequest{"no route " + method + " " + path};
  auto body = parse_body(request);
  auto expected = precondition(request, body);

  if (method == "POST" && path == "/key") {
    auto key = string_field(body, "key");
    if (!is_valid_token(key)) throw BadRequest{"'" + key + "' is not a keystroke token"};
    auto view_id = string_field(body, "view", false);
    return mutate(request, expected, [&] {
      if ((key == "{" || key == "}") && !editor_.session() && editor_.pending_keys().empty()) {
        if (auto target = fold_target(editor_.model())) {
          auto& view = view_of(view_id);
          const bool folded = view.folds.contains(*target);
          if (folded != (key == "}")) view.folds = toggle_fold(editor_.model(), view.folds, *target);
          return json{{"outcome", "Applied"}, {"action", key == "}" ? "fold" : "unfold"}, {"undone", ""}};
        }
      }
      auto outcome = editor_.key_event(key);
      return json{{"outcome", std::string(outcome_name(outcome.kind))}, {"action", outcome.action}, {"undone", outcome.undone}};
    });
  }
  if (method == "POST" && path == "/flush") {
    return mutate(request, expected, [&] {
      editor_.flush();
      return json::object();
    });
  }
  if (method == "POST" && path == "/edit") {
    auto op = string_field(body, "op");
    return mutate(request, expected, [&] {
      if (op == "enter") {
        auto at = body.contains("path") ? NodePath::parse(string_field(body, "path")) : editor_.model().focus();
        editor_.enter_edit(at);
      } else if (op == "draft") {
        editor_.set_draft(string_field(body, "draft"));
      } else if (op == "commit") {
        editor_.commit_edit();
      } else if (op == "cancel") {
        editor_.cancel_edit();
      } else {
        throw BadRequest{"op must be enter, draft, commit or cancel"};
      }
      return json{{"op", op}};
    });
  }
  if (method == "POST" && path == "/fold") {
    auto at = NodePath::parse(string_field(body, "path"));
    auto view_id = string_field(body, "view", false);
    auto& view = view_of(view_id);
    return mutate(request, expected, [&] {
      view.folds = toggle_fold(editor_.model(), view.folds, at);
      return json{{"folded", view.folds.contains(at)}};
    });
  }
  if (method == "POST" && (path == "/undo" || path == "/redo")) {
    return mutate(request, expected, [&] {
      auto r = path == "/undo" ? editor_.undo() : editor_.redo();
      return json{{"applied", r.has_value()}, {"action", r ? r->action_id : ""}};
    });
  }
  if (method == "POST" && path == "/focus") {
    auto at = NodePath::parse(string_field(body, "path"));
    return mutate(request, expected, [&] {
      editor_.flush();
      editor_.move_focus(at);
      return json::object();
    });
  }
  if (method == "POST" && path == "/fix") {
    auto id = string_field(body, "diagnostic");
    auto fix = string_field(body, "fix");
    return mutate(request, expected, [&] {
      for (const auto& d : cpp::check_semantics(editor_.model())) {
        if (cpp::diagnostic_id(d) != id) continue;
        if (std::find(d.fixes.begin(), d.fixes.end(), fix) == d.fixes.end()) break;
        cpp::apply_fix(editor_, d, fix);
        return json{{"diagnostic", id}, {"fix", fix}};
      }
      fail(ErrorCode::FixNotApplicable, "no diagnostic '" + id + "' offering '" + fix + "'");
    });
  }
  if (method == "PUT" && path == "/program") {
    return mutate(request, expected, [&] {
      auto loaded = load(request.body, workbench_.registry());
      editor_.reset(std::move(loaded.model));
      for (auto& [id, view] : views_) view.folds.clear();
      return json{{"warnings", loaded.warnings}};
    });
  }
  throw BadRequest{"no route " + method + " " + path};
}

// ---------------------------------------------------------------------------
// http

struct HttpServer::Impl {
  explicit Impl(Session& s) : session(s) {}
  Session& session;
  httplib::Server server;
};

HttpServer::HttpServer(Session& session) : impl_(std::make_unique<Impl>(session)) {
  auto handler = [this](const httplib::Request& in, httplib::Response& out) {
    Request request;
    request.method = in.method;
    request.path = in.path;
    for (const auto& [k, v] : in.params) request.query[k] = v;
    for (const auto& [k, v] : in.headers) request.headers[k] = v;
    request.body = in.body;
    auto reply = impl_->session.handle(request);
    out.status = reply.status;
    for (const auto& [k, v] : reply.headers) out.set_header(k, v);
    out.set_content(reply.body, reply.content_type);
  };
  auto& s = impl_->server;
  s.Get(".*", handler);
  s.Post(".*", handler);
  s.Put(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const ServeOptions& options, const std::function<void(int)>& on_ready) {
  auto& s = impl_->server;
  int port = options.port;
  if (port == 0) {
    port = s.bind_to_any_port(options.host);
  } else if (!s.bind_to_port(options.host, port)) {
    return false;
  }
  if (port < 0) return false;
  if (on_ready) on_ready(port);
  return s.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace martta
