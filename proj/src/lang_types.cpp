#include <algorithm>
#include <cctype>
#include <set>

#include "martta/error.hpp"
#include "martta/lang.hpp"

namespace martta::cpp {

namespace {

using Kind = ValueType::Kind;

bool is(const Model& model, const NodePath& path, const ConceptId& concept_id) {
  return model.strong_kind_at(path, concept_id);
}

const std::vector<std::string> kBuiltinTypes{"bool", "int", "string", "uint", "void"};

std::optional<NodePath> child(const Model& model, const NodePath& parent, const std::string& slot) {
  auto index = ChildIndex::named(slot);
  if (!model.has_child(parent, index)) return std::nullopt;
  return model.resolve_child(parent, index);
}

std::optional<NodePath> reference_target(const Model& model, const NodePath& reference) {
  auto value = model.property(reference, "target");
  if (!value) return std::nullopt;
  const auto* target = std::get_if<NodePath>(&*value);
  if (!target || !model.exists(*target)) return std::nullopt;
  auto resolved = model.resolve(*target);
  if (!is(model, resolved, ids::Function) && !model.kind_of_at(resolved, ids::Variable)) return std::nullopt;
  return resolved;
}

/// apparent_type without the dangling-reference error.
ValueType type_of(const Model& model, const NodePath& raw) {
  auto path = model.resolve(raw);
  if (model.is_placeholder(path) || !is(model, path, ids::Expression)) return {};
  const auto& c = model.concept_at(path);
  if (c == ids::IntegerLiteral) return ValueType::of(Kind::Int);
  if (c == ids::BoolLiteral) return ValueType::of(Kind::Bool);
  if (c == ids::StringLiteral) return ValueType::of(Kind::String);
  if (c == ids::VariableReference) {
    auto target = reference_target(model, path);
    return target ? declared_type(model, *target) : ValueType{};
  }
  if (c == ids::Invocation) {
    auto callee = type_of(model, path.child("Callee"));
    return callee.kind == Kind::FunctionOf ? callee.result.front() : ValueType{};
  }
  auto op = operator_at(model, path);
  if (!op) return {};
  const auto& s = op->symbol;
  if (op->arity == Arity::Binary) {
    auto left = type_of(model, path.child("Left"));
    auto right = type_of(model, path.child("Right"));
    if (s == "=" || s == "+=" || s == "-=") return left;
    if (s == "==" || s == "!=" || s == "<" || s == "<=" || s == ">" || s == ">=" || s == "&&" || s == "||")
      return ValueType::of(Kind::Bool);
    if (left.numeric() && right.numeric())
      return ValueType::of(left.kind == Kind::UInt || right.kind == Kind::UInt ? Kind::UInt : Kind::Int);
    if (s == "+" && left.kind == Kind::String && right.kind == Kind::String) return left;
    return {};
  }
  if (s == "!") return ValueType::of(Kind::Bool);
  auto operand = type_of(model, path.child("Operand"));
  return operand.numeric() ? operand : ValueType{};
}

bool compatible(const ValueType& expected, const ValueType& actual) {
  return expected == actual || (expected.numeric() && actual.numeric());
}

std::optional<NodePath> enclosing_function(const Model& model, NodePath path) {
  while (!path.is_root()) {
    path = path.parent();
    if (is(model, path, ids::Function)) return path;
  }
  return std::nullopt;
}

class Checker {
 public:
  explicit Checker(const Model& model) : model_(model) {}

  std::vector<Diagnostic> run() {
    visit(model_.resolve({}));
    return std::move(out_);
  }

 private:
  void add(const NodePath& path, Severity severity, std::string code, std::string message,
           std::vector<std::string> fixes = {}) {
    out_.push_back(Diagnostic{path, severity, std::move(code), std::move(message), std::move(fixes)});
  }

  void error(const NodePath& path, std::string code, std::string message, std::vector<std::string> fixes = {}) {
    add(path, Severity::SemanticError, std::move(code), std::move(message), std::move(fixes));
  }

  void visit(const NodePath& path) {
    check(path);
    for (const auto& kid : model_.normal_children(path)) visit(kid);
  }

  /// Reports `operand` when its known type fails `ok`. A function value
  /// whose result would pass is offered the invocation fix.
  template <typename Ok>
  void expect(const NodePath& operand, const std::string& what, Ok ok) {
    auto t = type_of(model_, operand);
    if (!t.known() || ok(t)) return;
    auto at = model_.resolve(operand);
    std::vector<std::string> fixes;
    if (t.kind == Kind::FunctionOf && ok(t.result.front())) fixes.push_back("wrap-invocation");
    error(at, "type-mismatch", "expected " + what + " but found " + t.to_string() + " value", std::move(fixes));
  }

  void expect_type(const NodePath& operand, const ValueType& expected) {
    if (!expected.known()) return;
    expect(operand, expected.to_string(), [&](const ValueType& t) { return compatible(expected, t); });
  }

  void expect_assignable(const NodePath& operand) {
    auto at = model_.resolve(operand);
    if (model_.is_placeholder(at)) return;
    if (model_.concept_at(at) != ids::VariableReference || type_of(model_, at).kind == Kind::FunctionOf)
      error(at, "not-assignable", "the left side must name a variable");
  }

  void check(const NodePath& path) {
    const auto& c = model_.concept_at(path);
    if (model_.is_placeholder(path)) {
      add(path, Severity::Incomplete, "incomplete", c.str() + " placeholder needs a value");
      return;
    }
    if (is(model_, path, ids::Declaration)) {
      auto name = model_.text_property(path, "name");
      if (name.empty())
        error(path, "unnamed", c.str() + " has no name");
      else if (!is_identifier(name))
        error(path, "invalid-name", "'" + name + "' is not an identifier");
    }
    if (c == ids::TypeReference) {
      auto text = model_.text_property(path, "type");
      auto t = type_from_name(model_, text);
      if (text.empty())
        error(path, "unknown-type", "missing type");
      else if (!t.known())
        error(path, "unknown-type", "unknown type '" + text + "'");
      else if (t.kind == Kind::Void && !path.is_root() && path.back() == ChildIndex::named("Type"))
        error(path, "void-variable", "variables cannot have type void");
      return;
    }
    if (c == ids::VariableReference) {
      if (!reference_target(model_, path)) error(path, "dangling-reference", "reference does not name a declaration");
      return;
    }
    if (c == ids::BinaryOperation) {
      check_binary(path);
      return;
    }
    if (c == ids::UnaryOperation) {
      const auto s = model_.text_property(path, "operator");
      auto operand = path.child("Operand");
      if (s == "!") {
        expect(operand, "bool", [](const ValueType& t) { return t.kind == Kind::Bool || t.numeric(); });
      } else {
        expect(operand, "a number", [](const ValueType& t) { return t.numeric(); });
        if (s == "++" || s == "--") expect_assignable(operand);
      }
      return;
    }
    if (c == ids::Invocation) {
      auto callee = type_of(model_, path.child("Callee"));
      if (!callee.known()) return;
      if (callee.kind != Kind::FunctionOf) {
        error(model_.resolve(path.child("Callee")), "not-callable", callee.to_string() + " value is not callable");
        return;
      }
      const auto count = model_.cardinal_count(path);
      if (count != callee.params.size()) {
        error(path, "arity-mismatch",
              "expected " + std::to_string(callee.params.size()) + " arguments, found " + std::to_string(count));
        return;
      }
      for (std::size_t i = 0; i < count; ++i) expect_type(path.child(i), callee.params[i]);
      return;
    }
    if (c == ids::ReturnStatement) {
      auto function = enclosing_function(model_, path);
      if (!function) return;
      auto returned = type_from_name(model_, model_.text_property(model_.resolve(function->child("Returned")), "type"));
      if (returned.kind == Kind::Void) {
        if (type_of(model_, path.child("Value")).known())
          error(path, "return-value", "a void function cannot return a value");
        return;
      }
      expect_type(path.child("Value"), returned);
      return;
    }
    if (c == ids::IfStatement || c == ids::ForStatement) {
      expect(path.child("Condition"), "a condition", [](const ValueType& t) { return t.kind == Kind::Bool || t.numeric(); });
      return;
    }
    if (model_.kind_of_at(path, ids::Variable)) {
      if (auto init = child(model_, path, "Initializer")) expect_type(*init, declared_type(model_, path));
    }
  }

  void check_binary(const NodePath& path) {
    const auto s = model_.text_property(path, "operator");
    auto left = path.child("Left");
    auto right = path.child("Right");
    auto numeric = [](const ValueType& t) { return t.numeric(); };
    if (s == "=" || s == "+=" || s == "-=") {
      expect_assignable(left);
      auto target = type_of(model_, left);
      if (!target.known() || target.kind == Kind::FunctionOf) return;
      if (s == "=") {
        expect_type(right, target);
      } else if (target.kind == Kind::String && s == "+=") {
        expect_type(right, target);
      } else if (!target.numeric()) {
        error(model_.resolve(left), "type-mismatch", target.to_string() + " value does not support " + s);
      } else {
        expect_type(right, target);
      }
      return;
    }
    if (s == "&&" || s == "||") {
      auto cond = [](const ValueType& t) { return t.kind == Kind::Bool || t.numeric(); };
      expect(left, "bool", cond);
      expect(right, "bool", cond);
      return;
    }
    if (s == "==" || s == "!=" || s == "<" || s == "<=" || s == ">" || s == ">=") {
      auto l = type_of(model_, left);
      auto r = type_of(model_, right);
      if (l.numeric() || r.numeric()) {
        expect(left, "a number", numeric);
        expect(right, "a number", numeric);
      } else if (l.known() && r.known() && !(l == r)) {
        error(model_.resolve(right), "type-mismatch", "cannot compare " + l.to_string() + " with " + r.to_string());
      }
      return;
    }
    auto l = type_of(model_, left);
    auto r = type_of(model_, right);
    if (s == "+" && (l.kind == Kind::String || r.kind == Kind::String)) {
      auto text = [](const ValueType& t) { return t.kind == Kind::String; };
      expect(left, "string", text);
      expect(right, "string", text);
      return;
    }
    expect(left, "a number", numeric);
    expect(right, "a number", numeric);
  }

  const Model& model_;
  std::vector<Diagnostic> out_;
};

}  // namespace

ValueType ValueType::function(std::vector<ValueType> params, ValueType result) {
  ValueType t;
  t.kind = Kind::FunctionOf;
  t.params = std::move(params);
  t.result.push_back(std::move(result));
  return t;
}

std::string ValueType::to_string() const {
  switch (kind) {
    case Kind::Unknown:
      return "?";
    case Kind::Int:
      return "int";
    case Kind::UInt:
      return "uint";
    case Kind::Bool:
      return "bool";
    case Kind::String:
      return "string";
    case Kind::Void:
      return "void";
    case Kind::Named:
      return name;
    case Kind::FunctionOf: {
      std::string out = result.front().to_string() + "(";
      for (std::size_t i = 0; i < params.size(); ++i) out += (i ? ", " : "") + params[i].to_string();
      return out + ")";
    }
  }
  return "?";
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  if (std::isdigit(static_cast<unsigned char>(text.front()))) return false;
  return std::all_of(text.begin(), text.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string declaration_name(const Model& model, const NodePath& path) { return model.text_property(path, "name"); }

std::vector<std::string> type_names(const Model& model) {
  std::set<std::string> names(kBuiltinTypes.begin(), kBuiltinTypes.end());
  for (const auto& p : model.preorder())
    if (model.concept_at(p) == ids::Class && !declaration_name(model, p).empty()) names.insert(declaration_name(model, p));
  return {names.begin(), names.end()};
}

ValueType type_from_name(const Model& model, std::string_view name) {
  if (name == "int") return ValueType::of(Kind::Int);
  if (name == "uint") return ValueType::of(Kind::UInt);
  if (name == "bool") return ValueType::of(Kind::Bool);
  if (name == "string") return ValueType::of(Kind::String);
  if (name == "void") return ValueType::of(Kind::Void);
  if (name.empty()) return {};
  for (const auto& p : model.preorder())
    if (model.concept_at(p) == ids::Class && declaration_name(model, p) == name) return ValueType::named(std::string(name));
  return {};
}

ValueType declared_type(const Model& model, const NodePath& raw) {
  auto path = model.resolve(raw);
  auto type_at = [&](const std::string& slot) {
    auto t = child(model, path, slot);
    return t ? type_from_name(model, model.text_property(*t, "type")) : ValueType{};
  };
  if (is(model, path, ids::Function)) {
    std::vector<ValueType> params;
    for (std::size_t i = 0; i < model.cardinal_count(path); ++i) {
      auto arg = model.resolve_child(path, ChildIndex::cardinal(i));
      params.push_back(declared_type(model, arg));
    }
    return ValueType::function(std::move(params), type_at("Returned"));
  }
  if (model.kind_of_at(path, ids::Variable)) return type_at("Type");
  return {};
}

ValueType apparent_type(const Model& model, const NodePath& raw) {
  auto path = model.resolve(raw);
  if (!is(model, path, ids::Expression)) fail(ErrorCode::NotAnExpression, model.concept_at(path).str());
  if (model.concept_at(path) == ids::VariableReference && !reference_target(model, path))
    fail(ErrorCode::DanglingReference, "reference at '" + path.to_string() + "' does not resolve");
  return type_of(model, path);
}

std::vector<Diagnostic> check_semantics(const Model& model) { return Checker(model).run(); }

std::string diagnostic_id(const Diagnostic& diagnostic) {
  return diagnostic.code + "@" + diagnostic.node_path.to_string();
}

std::vector<Visible> visible_values(const Model& model, const NodePath& path) {
  std::vector<Visible> out;
  std::set<std::string> seen;
  auto add = [&](const NodePath& declaration) {
    auto name = declaration_name(model, declaration);
    if (!name.empty() && seen.insert(name).second) out.push_back({name, declaration});
  };
  auto declared_by = [&](const NodePath& statement) {
    auto s = model.resolve(statement);
    if (model.concept_at(s) == ids::VariableDeclarationStatement) add(model.resolve(s.child("Variable")));
  };
  NodePath current = path;
  while (!current.is_root()) {
    auto parent = current.parent();
    const auto& step = current.back();
    const auto& c = model.concept_at(parent);
    if (c == ids::CompoundStatement && step.is_cardinal()) {
      for (std::size_t j = step.position(); j-- > 0;) declared_by(parent.child(j));
    } else if (c == ids::ForStatement && step != ChildIndex::named("Init")) {
      declared_by(parent.child("Init"));
    } else if (c == ids::Function) {
      for (std::size_t i = 0; i < model.cardinal_count(parent); ++i) add(model.resolve(parent.child(i)));
    } else if (c == ids::CppProgram || c == ids::Namespace) {
      for (std::size_t i = 0; i < model.cardinal_count(parent); ++i) {
        auto d = model.resolve(parent.child(i));
        if (is(model, d, ids::Function) || is(model, d, ids::Variable)) add(d);
      }
    }
    current = parent;
  }
  return out;
}

NodePath wrap_invocation(Model& model, const NodePath& path) {
  auto t = type_of(model, path);
  if (t.kind != Kind::FunctionOf) fail(ErrorCode::FixNotApplicable, "the expression is not a function value");
  auto invocation = model.replace_node(path, ids::Invocation, {{path, ChildIndex::named("Callee")}});
  for (std::size_t i = 0; i < t.params.size(); ++i)
    model.insert_child(invocation, ChildIndex::cardinal(i), ids::Expression);
  auto focus = t.params.empty() ? invocation : invocation.child(std::size_t{0});
  model.move_focus(focus);
  return focus;
}

void apply_fix_to(Model& model, const Diagnostic& diagnostic, const std::string& fix_id) {
  if (fix_id != "wrap-invocation") fail(ErrorCode::FixNotApplicable, "unknown fix '" + fix_id + "'");
  const auto& path = diagnostic.node_path;
  if (!model.exists(path) || !is(model, model.resolve(path), ids::Expression))
    fail(ErrorCode::FixNotApplicable, "no expression at '" + path.to_string() + "'");
  auto at = model.resolve(path);
  if (!at.is_root() && at.back() == ChildIndex::named("Callee") && model.concept_at(at.parent()) == ids::Invocation)
    fail(ErrorCode::FixNotApplicable, "already invoked");
  if (type_of(model, at).kind != Kind::FunctionOf)
    fail(ErrorCode::FixNotApplicable, "'" + path.to_string() + "' is not a function value");
  wrap_invocation(model, at);
}

std::optional<ActionRecord> apply_fix(Editor& editor, const Diagnostic& diagnostic, const std::string& fix_id) {
  return editor.perform("fix:" + fix_id, [&](ActionContext& context) { apply_fix_to(context.model, diagnostic, fix_id); },
                        diagnostic.node_path);
}

}  // namespace martta::cpp
