#include "martta/codegen.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "martta/error.hpp"
#include "martta/lang.hpp"
#include "martta/transform.hpp"

namespace martta {

const SourceSpan* EmittedSource::span_of(const NodePath& path) const {
  for (const auto& span : source_map)
    if (span.path == path) return &span;
  return nullptr;
}

std::string_view EmittedSource::text_of(const NodePath& path) const {
  const auto* span = span_of(path);
  if (!span) return {};
  return std::string_view(text).substr(span->begin, span->end - span->begin);
}

namespace {

namespace ids = cpp::ids;

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  return out + "\"";
}

class Emitter {
 public:
  explicit Emitter(const Model& model) : m_(model) {}

  std::string program() {
    std::string body;
    auto root = m_.resolve({});
    items(root, 0);
    std::string prelude;
    if (uses_.contains("string")) prelude += "#include <string>\n";
    if (uses_.contains("uint")) prelude += "using uint = unsigned int;\n";
    if (!prelude.empty()) {
      prelude += "\n";
      for (auto& span : spans_) {
        span.begin += prelude.size();
        span.end += prelude.size();
      }
    }
    return prelude + out_;
  }

  void expression(const NodePath& raw) {
    const auto p = m_.resolve(raw);
    const auto& c = m_.concept_at(p);
    const auto b = out_.size();
    if (c == ids::IntegerLiteral) {
      auto v = m_.property(p, "value");
      out_ += v && std::holds_alternative<std::int64_t>(*v) ? std::to_string(std::get<std::int64_t>(*v)) : "0";
    } else if (c == ids::BoolLiteral) {
      auto v = m_.property(p, "value");
      out_ += v && std::holds_alternative<bool>(*v) && std::get<bool>(*v) ? "true" : "false";
    } else if (c == ids::StringLiteral) {
      uses_.insert("string");
      out_ += "std::string(" + quote(m_.text_property(p, "text")) + ")";
    } else if (c == ids::VariableReference) {
      auto v = m_.property(p, "target");
      const auto* target = v ? std::get_if<NodePath>(&*v) : nullptr;
      if (!target || !m_.exists(*target)) fail(ErrorCode::ModelIncomplete, "dangling reference at '" + p.to_string() + "'");
      out_ += cpp::declaration_name(m_, m_.resolve(*target));
    } else if (c == ids::Invocation) {
      operand(p.child("Callee"));
      out_ += "(";
      for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
        if (i) out_ += ", ";
        expression(p.child(i));
      }
      out_ += ")";
    } else if (auto op = cpp::operator_at(m_, p)) {
      if (op->arity == cpp::Arity::Binary) {
        operand(p.child("Left"));
        out_ += " " + op->symbol + " ";
        operand(p.child("Right"));
      } else if (op->arity == cpp::Arity::UnaryPrefix) {
        out_ += op->symbol;
        operand(p.child("Operand"));
      } else {
        operand(p.child("Operand"));
        out_ += op->symbol;
      }
    } else if (m_.is_placeholder(p)) {
      fail(ErrorCode::ModelIncomplete, "placeholder at '" + p.to_string() + "'");
    } else {
      fail(ErrorCode::ModelIncomplete, "no emitter for " + c.str() + " at '" + p.to_string() + "'");
    }
    mark(p, b);
  }

  std::string take() { return std::move(out_); }
  std::vector<SourceSpan> spans() { return std::move(spans_); }

 private:
  void mark(const NodePath& p, std::size_t b) { spans_.push_back({p, b, out_.size()}); }
  void indent(int depth) { out_.append(static_cast<std::size_t>(depth) * 2, ' '); }

  void operand(const NodePath& raw) {
    if (cpp::needs_parentheses(m_, raw)) {
      out_ += "(";
      expression(raw);
      out_ += ")";
    } else {
      expression(raw);
    }
  }

  void type(const NodePath& raw) {
    const auto p = m_.resolve(raw);
    const auto b = out_.size();
    auto name = m_.text_property(p, "type");
    uses_.insert(name);
    out_ += name == "string" ? "std::string" : name;
    mark(p, b);
  }

  /// "T name" or "T name = init"
  void variable(const NodePath& p) {
    const auto b = out_.size();
    type(p.child("Type"));
    out_ += " " + cpp::declaration_name(m_, p);
    if (m_.has_child(p, ChildIndex::named("Initializer"))) {
      out_ += " = ";
      expression(p.child("Initializer"));
    }
    mark(p, b);
  }

  void items(const NodePath& parent, int depth) {
    const auto n = m_.cardinal_count(parent);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out_ += "\n";
      declaration(m_.resolve(parent.child(i)), depth);
    }
  }

  void declaration(const NodePath& p, int depth) {
    const auto& c = m_.concept_at(p);
    indent(depth);
    const auto b = out_.size();
    const auto name = cpp::declaration_name(m_, p);
    if (c == ids::Function) {
      type(p.child("Returned"));
      out_ += " " + name + "(";
      for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
        if (i) out_ += ", ";
        auto arg = m_.resolve(p.child(i));
        const auto ab = out_.size();
        type(arg.child("Type"));
        out_ += " " + cpp::declaration_name(m_, arg);
        mark(arg, ab);
      }
      out_ += ") ";
      block(p.child("Body"), depth);
    } else if (m_.kind_of_at(p, ids::Variable)) {
      variable(p);
      out_ += ";";
    } else if (m_.kind_of_at(p, ids::Enumeration)) {
      out_ += "enum " + name + " {";
      for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
        auto e = m_.resolve(p.child(i));
        out_ += i ? ", " : " ";
        const auto eb = out_.size();
        out_ += cpp::declaration_name(m_, e);
        mark(e, eb);
      }
      out_ += m_.cardinal_count(p) ? " };" : "};";
    } else if (c == ids::Class) {
      out_ += "class " + name + " {\n";
      if (m_.cardinal_count(p)) {
        indent(depth);
        out_ += "public:\n";
      }
      for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
        declaration(m_.resolve(p.child(i)), depth + 1);
        out_ += "\n";
      }
      indent(depth);
      out_ += "};";
    } else if (c == ids::Namespace) {
      out_ += "namespace " + name + " {\n";
      if (m_.cardinal_count(p)) {
        out_ += "\n";
        items(p, depth);
        out_ += "\n";
      }
      indent(depth);
      out_ += "}";
    } else {
      fail(ErrorCode::ModelIncomplete, "no emitter for " + c.str() + " at '" + p.to_string() + "'");
    }
    mark(p, b);
    out_ += "\n";
  }

  void block(const NodePath& raw, int depth) {
    const auto p = m_.resolve(raw);
    const auto b = out_.size();
    out_ += "{\n";
    for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) statement(p.child(i), depth + 1);
    indent(depth);
    out_ += "}";
    mark(p, b);
  }

  void statement(const NodePath& raw, int depth) {
    indent(depth);
    inline_statement(raw, depth);
    out_ += "\n";
  }

  /// Statement text without leading indentation or trailing newline.
  void inline_statement(const NodePath& raw, int depth) {
    const auto p = m_.resolve(raw);
    const auto& c = m_.concept_at(p);
    if (c == ids::CompoundStatement) {
      block(p, depth);
      return;
    }
    const auto b = out_.size();
    if (c == ids::ReturnStatement) {
      out_ += "return ";
      expression(p.child("Value"));
      out_ += ";";
    } else if (c == ids::VariableDeclarationStatement) {
      variable(m_.resolve(p.child("Variable")));
      out_ += ";";
    } else if (c == ids::IfStatement) {
      out_ += "if (";
      expression(p.child("Condition"));
      out_ += ") ";
      inline_statement(p.child("Body"), depth);
    } else if (c == ids::ForStatement) {
      out_ += "for (";
      inline_statement(p.child("Init"), depth);
      out_ += " ";
      expression(p.child("Condition"));
      out_ += "; ";
      expression(p.child("Update"));
      out_ += ") ";
      block(p.child("Body"), depth);
    } else if (m_.strong_kind_at(p, ids::Expression)) {
      expression(p);
      out_ += ";";
    } else if (m_.is_placeholder(p)) {
      fail(ErrorCode::ModelIncomplete, "placeholder at '" + p.to_string() + "'");
    } else {
      fail(ErrorCode::ModelIncomplete, "no emitter for " + c.str() + " at '" + p.to_string() + "'");
    }
    mark(p, b);
  }

  const Model& m_;
  std::string out_;
  std::vector<SourceSpan> spans_;
  std::set<std::string> uses_;
};

}  // namespace

const std::vector<ConceptId>& non_emitting_concepts() {
  // FragmentParameter is transparent: its surrogate is emitted in its place.
  static const std::vector<ConceptId> list{ids::FragmentParameter};
  return list;
}

bool has_emitter(const ConceptId& id) {
  static const std::set<ConceptId> emitting{
      ids::Namespace,         ids::Class,          ids::MemberEnumeration,
      ids::Enumeration,       ids::Enumerator,     ids::Variable,
      ids::MemberVariable,    ids::Function,       ids::Argument,
      ids::TypeReference,     ids::CompoundStatement, ids::ForStatement,
      ids::IfStatement,       ids::ReturnStatement, ids::VariableDeclarationStatement,
      ids::IntegerLiteral,    ids::BoolLiteral,    ids::StringLiteral,
      ids::BinaryOperation,   ids::UnaryOperation, ids::Invocation,
      ids::VariableReference, ids::CppProgram,
  };
  return emitting.contains(id);
}

EmittedSource emit_source(const Model& model) {
  auto composites = composite_paths(model);
  if (!composites.empty())
    fail(ErrorCode::UntransformedComposite,
         model.concept_at(composites.front()).str() + " at '" + composites.front().to_string() + "'");
  for (const auto& p : model.preorder())
    if (model.is_placeholder(p)) fail(ErrorCode::ModelIncomplete, "placeholder at '" + p.to_string() + "'");
  for (const auto& d : cpp::check_semantics(model))
    fail(ErrorCode::ModelIncomplete, d.code + " at '" + d.node_path.to_string() + "': " + d.message);
  Emitter emitter(model);
  EmittedSource out;
  out.text = emitter.program();
  out.source_map = emitter.spans();
  out.source_map.push_back({model.resolve({}), 0, out.text.size()});
  return out;
}

std::string emit_expression(const Model& model, const NodePath& path) {
  Emitter emitter(model);
  emitter.expression(path);
  return emitter.take();
}

// ---------------------------------------------------------------------------
// external commands

std::vector<std::vector<std::string>> parse_command_template(std::string_view command_template) {
  std::vector<std::vector<std::string>> commands(1);
  std::istringstream in{std::string(command_template)};
  for (std::string token; in >> token;) {
    if (token == "&&") {
      if (commands.back().empty()) fail(ErrorCode::CommandUnavailable, "empty command before '&&'");
      commands.emplace_back();
      continue;
    }
    std::string rest = token;
    for (const char* known : {"{in}", "{out}"})
      for (auto at = rest.find(known); at != std::string::npos; at = rest.find(known)) rest.erase(at, std::strlen(known));
    if (rest.find_first_of("{}") != std::string::npos)
      fail(ErrorCode::CommandUnavailable, "unknown substitution in '" + token + "'");
    commands.back().push_back(token);
  }
  if (commands.back().empty()) fail(ErrorCode::CommandUnavailable, "no command configured");
  return commands;
}

namespace {

std::string substitute(std::string token, const std::string& in, const std::string& out) {
  for (auto [key, value] : {std::pair<std::string, const std::string*>{"{in}", &in}, {"{out}", &out}})
    for (auto at = token.find(key); at != std::string::npos; at = token.find(key, at + value->size()))
      token.replace(at, key.size(), *value);
  return token;
}

struct Child {
  int status = 0;
  bool timed_out = false;
};

Child run_one(const std::vector<std::string>& argv, RunResult& result, std::chrono::milliseconds timeout) {
  int out_pipe[2], err_pipe[2], exec_pipe[2];
  if (pipe(out_pipe) || pipe(err_pipe) || pipe2(exec_pipe, O_CLOEXEC))
    fail(ErrorCode::CommandUnavailable, std::string("pipe: ") + std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0) fail(ErrorCode::CommandUnavailable, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(out_pipe[1], 1);
    dup2(err_pipe[1], 2);
    close(out_pipe[0]);
    close(err_pipe[0]);
    close(exec_pipe[0]);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    int e = errno;
    (void)!write(exec_pipe[1], &e, sizeof e);
    _exit(127);
  }
  close(out_pipe[1]);
  close(err_pipe[1]);
  close(exec_pipe[1]);
  int exec_errno = 0;
  const bool exec_failed = read(exec_pipe[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno;
  close(exec_pipe[0]);

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* sinks[2] = {&result.out, &result.err};
  int open_fds = 2;
  Child child;
  char buffer[4096];
  while (open_fds > 0) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      kill(pid, SIGKILL);
      child.timed_out = true;
      break;
    }
    if (poll(fds, 2, static_cast<int>(std::min<long long>(left.count(), 1000))) < 0 && errno != EINTR) break;
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      auto n = read(fds[i].fd, buffer, sizeof buffer);
      if (n > 0) {
        sinks[i]->append(buffer, static_cast<std::size_t>(n));
      } else {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  for (auto& f : fds)
    if (f.fd >= 0) close(f.fd);
  waitpid(pid, &child.status, 0);
  if (exec_failed)
    fail(ErrorCode::CommandUnavailable, "cannot run '" + argv.front() + "': " + std::strerror(exec_errno));
  return child;
}

}  // namespace

RunResult execute_external(const EmittedSource& source, std::string_view command_template, ExternalOptions options) {
  auto commands = parse_command_template(command_template);
  namespace fs = std::filesystem;
  std::string dir_template = (fs::temp_directory_path() / "martta-XXXXXX").string();
  if (!mkdtemp(dir_template.data())) fail(ErrorCode::CommandUnavailable, "cannot create a temporary directory");
  const fs::path dir = dir_template;
  const std::string in = (dir / "main.cpp").string();
  const std::string out = (dir / "main").string();
  {
    std::ofstream file(in, std::ios::binary);
    file << source.text;
  }
  RunResult result;
  try {
    for (const auto& command : commands) {
      std::vector<std::string> argv;
      for (const auto& token : command) argv.push_back(substitute(token, in, out));
      auto child = run_one(argv, result, options.timeout);
      if (child.timed_out) fail(ErrorCode::NonZeroExit, "'" + argv.front() + "' timed out");
      result.exit_code = WIFEXITED(child.status) ? WEXITSTATUS(child.status) : 128 + WTERMSIG(child.status);
      if (result.exit_code != 0) {
        auto tail = result.err.size() > 2000 ? result.err.substr(result.err.size() - 2000) : result.err;
        fail(ErrorCode::NonZeroExit, "'" + argv.front() + "' exited with " + std::to_string(result.exit_code) + "\n" + tail);
      }
    }
  } catch (...) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    throw;
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return result;
}

}  // namespace martta
