#include "martta/cli.hpp"

#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "martta/codegen.hpp"
#include "martta/error.hpp"
#include "martta/lang.hpp"
#include "martta/persistence.hpp"
#include "martta/render.hpp"
#include "martta/service.hpp"
#include "martta/transform.hpp"
#include "martta/workbench.hpp"

namespace martta {

namespace {

void write_or_print(const std::string& path, std::string_view text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_file(path, text);
}

Model load_file(const std::string& path, const Workbench& wb, std::ostream& err) {
  auto loaded = load(read_file(path), wb.registry());
  for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
  return std::move(loaded.model);
}

void print_diagnostic(std::ostream& out, const Diagnostic& d) {
  out << d.node_path.to_string() << ": " << severity_name(d.severity) << " " << d.code << ": " << d.message;
  if (!d.fixes.empty()) {
    out << " [fix:";
    for (const auto& f : d.fixes) out << " " << f;
    out << "]";
  }
  out << "\n";
}

int default_port() {
  if (const char* env = std::getenv("MARTTA_PORT")) {
    try {
      return std::stoi(env);
    } catch (...) {
      fail(ErrorCode::InvalidArgument, std::string("MARTTA_PORT is not a port number: ") + env);
    }
  }
  return 0;
}

}  // namespace

int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Workbench::Extension& extend) {
  CLI::App app{"martta: projectional editing workbench"};
  app.require_subcommand(1);

  std::string in, out_path, root = "CppProgram", script, view = "default", style, command;
  std::vector<std::string> folds;
  bool atomic = false;
  int port = -1;
  std::string host = "127.0.0.1";

  auto* new_cmd = app.add_subcommand("new", "create an empty program document");
  new_cmd->add_option("--root", root, "root concept");
  new_cmd->add_option("--out", out_path, "output document")->required();

  auto* edit_cmd = app.add_subcommand("edit", "replay a keystroke script");
  edit_cmd->add_option("--in", in, "input document")->required();
  edit_cmd->add_option("--script", script, "keystroke script file")->required();
  edit_cmd->add_option("--out", out_path, "output document")->required();
  edit_cmd->add_flag("--atomic", atomic, "all or nothing");

  auto* check_cmd = app.add_subcommand("check", "list diagnostics; exit 0 when there are none");
  check_cmd->add_option("--in", in, "input document")->required();

  auto* transform_cmd = app.add_subcommand("transform", "lower Composite concepts");
  transform_cmd->add_option("--in", in, "input document")->required();
  transform_cmd->add_option("--out", out_path, "output document")->required();

  auto* generate_cmd = app.add_subcommand("generate", "emit C++ source");
  generate_cmd->add_option("--in", in, "input document")->required();
  generate_cmd->add_option("--out", out_path, "output source file, '-' for stdout");

  auto* render_cmd = app.add_subcommand("render", "render a view to HTML");
  render_cmd->add_option("--in", in, "input document")->required();
  render_cmd->add_option("--view", view, "view id: default, camel or underscore");
  render_cmd->add_option("--style", style, "identifier style: camel or underscore");
  render_cmd->add_option("--fold", folds, "node path to fold (repeatable)");
  render_cmd->add_option("--out", out_path, "output html, '-' for stdout");

  auto* run_cmd = app.add_subcommand("run", "generate, then build and run with an external command");
  run_cmd->add_option("--in", in, "input document")->required();
  run_cmd->add_option("--command", command, "command template using {in} and {out}");

  auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP API over one session");
  serve_cmd->add_option("--in", in, "input document");
  serve_cmd->add_option("--port", port, "port; MARTTA_PORT or 0 (any) by default");
  serve_cmd->add_option("--host", host, "bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    Workbench wb(extend);
    if (*new_cmd) {
      write_file(out_path, save(wb.new_model(ConceptId(root))));
      return 0;
    }
    if (*edit_cmd) {
      auto keys = parse_script(read_file(script));
      auto editor = wb.editor(load_file(in, wb, err));
      if (atomic)
        editor.feed_atomic(keys);
      else
        editor.feed(keys);
      write_file(out_path, save(editor.model()));
      return 0;
    }
    auto model = in.empty() ? wb.new_model() : load_file(in, wb, err);
    if (*check_cmd) {
      auto structural = model.validate_structure();
      auto semantic = cpp::check_semantics(model);
      for (const auto& d : structural) print_diagnostic(out, d);
      for (const auto& d : semantic) print_diagnostic(out, d);
      return structural.empty() && semantic.empty() ? 0 : 1;
    }
    if (*transform_cmd) {
      auto report = transform_composites(model);
      err << report.transformed.size() << " transformed in " << report.iterations << " passes\n";
      write_file(out_path, save(model));
      return 0;
    }
    if (*generate_cmd) {
      write_or_print(out_path, emit_source(model).text, out);
      return 0;
    }
    if (*render_cmd) {
      Stylist stylist;
      if (view == "underscore")
        stylist.identifier_style = IdentifierStyle::Underscore;
      else if (view != "default" && view != "camel")
        fail(ErrorCode::InvalidArgument, "unknown view '" + view + "'");
      if (!style.empty()) stylist.identifier_style = parse_identifier_style(style);
      FoldState state;
      for (const auto& f : folds) state = toggle_fold(model, state, NodePath::parse(f));
      write_or_print(out_path, render(model, stylist, state).html, out);
      return 0;
    }
    if (*run_cmd) {
      if (command.empty())
        if (const char* env = std::getenv("MARTTA_COMMAND")) command = env;
      if (command.empty()) fail(ErrorCode::CommandUnavailable, "no --command given and MARTTA_COMMAND is unset");
      auto result = execute_external(emit_source(model), command);
      out << result.out;
      err << result.err;
      return result.exit_code;
    }
    if (*serve_cmd) {
      Session session(wb, std::move(model));
      HttpServer server(session);
      ServeOptions options;
      options.host = host;
      options.port = port >= 0 ? port : default_port();
      bool ok = server.listen(options, [&](int bound) {
        out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
      });
      if (!ok) {
        err << "error: could not bind " << host << ":" << options.port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace martta
