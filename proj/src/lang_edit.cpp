#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "martta/error.hpp"
#include "martta/lang.hpp"

namespace martta::cpp {

// ---------------------------------------------------------------------------
// operators

const std::vector<OperatorInfo>& operator_table() {
  using A = Associativity;
  static const std::vector<OperatorInfo> table{
      {"++", 16, A::Left, Arity::UnaryPostfix}, {"--", 16, A::Left, Arity::UnaryPostfix},
      {"++", 15, A::Right, Arity::UnaryPrefix}, {"--", 15, A::Right, Arity::UnaryPrefix},
      {"-", 15, A::Right, Arity::UnaryPrefix},  {"!", 15, A::Right, Arity::UnaryPrefix},
      {"*", 13, A::Left, Arity::Binary},        {"/", 13, A::Left, Arity::Binary},
      {"%", 13, A::Left, Arity::Binary},        {"+", 12, A::Left, Arity::Binary},
      {"-", 12, A::Left, Arity::Binary},        {"<", 10, A::Left, Arity::Binary},
      {"<=", 10, A::Left, Arity::Binary},       {">", 10, A::Left, Arity::Binary},
      {">=", 10, A::Left, Arity::Binary},       {"==", 9, A::Left, Arity::Binary},
      {"!=", 9, A::Left, Arity::Binary},        {"&&", 5, A::Left, Arity::Binary},
      {"||", 4, A::Left, Arity::Binary},        {"=", 2, A::Right, Arity::Binary},
      {"+=", 2, A::Right, Arity::Binary},       {"-=", 2, A::Right, Arity::Binary},
  };
  return table;
}

const OperatorInfo& find_operator(std::string_view symbol, Arity arity) {
  for (const auto& op : operator_table())
    if (op.symbol == symbol && op.arity == arity) return op;
  fail(ErrorCode::InvalidDescriptor, "no operator '" + std::string(symbol) + "'");
}

std::optional<OperatorInfo> operator_at(const Model& model, const NodePath& path) {
  const auto& c = model.concept_at(path);
  Arity arity;
  if (c == ids::BinaryOperation) {
    arity = Arity::Binary;
  } else if (c == ids::UnaryOperation) {
    auto prefix = model.property(path, "prefix");
    const bool is_prefix = !prefix || !std::holds_alternative<bool>(*prefix) || std::get<bool>(*prefix);
    arity = is_prefix ? Arity::UnaryPrefix : Arity::UnaryPostfix;
  } else {
    return std::nullopt;
  }
  auto symbol = model.text_property(path, "operator");
  for (const auto& op : operator_table())
    if (op.symbol == symbol && op.arity == arity) return op;
  return std::nullopt;
}

int precedence_at(const Model& model, const NodePath& path) {
  auto op = operator_at(model, model.resolve(path));
  return op ? op->precedence : kAtomPrecedence;
}

bool needs_parentheses(const Model& model, const NodePath& child) {
  if (child.is_root()) return false;
  const auto parent = child.parent();
  const auto& step = child.back();
  const int c = precedence_at(model, child);
  if (model.concept_at(parent) == ids::Invocation) return step == ChildIndex::named("Callee") && c < kAtomPrecedence;
  auto op = operator_at(model, parent);
  if (!op) return false;
  const int p = op->precedence;
  switch (op->arity) {
    case Arity::Binary:
      if (c < p) return true;
      if (c > p) return false;
      if (step == ChildIndex::named("Left")) return op->associativity == Associativity::Right;
      return op->associativity == Associativity::Left;
    case Arity::UnaryPostfix:
      return c < p;
    case Arity::UnaryPrefix: {
      if (c < p) return true;
      // "- -x" must not print as "--x".
      auto inner = operator_at(model, model.resolve(child));
      return inner && inner->arity == Arity::UnaryPrefix && op->symbol == "-" && inner->symbol.front() == '-';
    }
  }
  return false;
}

namespace {

/// Whether `path` is the rightmost operand of an operation parent.
bool rightmost_operand(const Model& model, const NodePath& path) {
  if (path.is_root()) return false;
  auto op = operator_at(model, path.parent());
  if (!op) return false;
  if (op->arity == Arity::Binary) return path.back() == ChildIndex::named("Right");
  return op->arity == Arity::UnaryPrefix && path.back() == ChildIndex::named("Operand");
}

}  // namespace

NodePath insert_operation(Model& model, const NodePath& focus, const OperatorInfo& op) {
  // A statement placeholder can start with a prefix operator too.
  const bool open = op.arity == Arity::UnaryPrefix && !focus.is_root() && model.is_placeholder(focus) &&
                    model.admits(focus.parent(), focus.back(), ids::UnaryOperation);
  if (!open && !model.strong_kind_at(focus, ids::Expression))
    fail(ErrorCode::NotAnExpression, model.concept_at(focus).str() + " at '" + focus.to_string() + "'");
  if (op.arity == Arity::UnaryPrefix && model.is_placeholder(focus)) {
    auto at = model.replace_node(focus, ids::UnaryOperation, {}, {{"operator", op.symbol}, {"prefix", true}});
    auto operand = at.child("Operand");
    model.move_focus(operand);
    return operand;
  }
  if (model.is_placeholder(focus)) fail(ErrorCode::ActionNotApplicable, "operator needs a left operand");

  NodePath cur = focus;
  if (op.arity != Arity::UnaryPrefix) {
    while (!model.tagged(cur) && rightmost_operand(model, cur)) {
      const int p = precedence_at(model, cur.parent());
      const bool tighter = p > op.precedence || (p == op.precedence && op.associativity == Associativity::Left);
      if (!tighter) break;
      if (cur != focus && needs_parentheses(model, cur)) break;
      cur = cur.parent();
    }
  }

  if (op.arity == Arity::Binary) {
    auto at = model.replace_node(cur, ids::BinaryOperation, {{cur, ChildIndex::named("Left")}}, {{"operator", op.symbol}});
    auto right = at.child("Right");
    model.move_focus(right);
    return right;
  }
  const bool prefix = op.arity == Arity::UnaryPrefix;
  auto at = model.replace_node(cur, ids::UnaryOperation, {{cur, ChildIndex::named("Operand")}},
                               {{"operator", op.symbol}, {"prefix", prefix}});
  model.move_focus(at);
  return at;
}

void tag_position(Model& model, const NodePath& path, bool on) {
  if (!model.strong_kind_at(path, ids::Expression))
    fail(ErrorCode::NotAnExpression, model.concept_at(path).str() + " at '" + path.to_string() + "'");
  model.set_tagged(path, on);
}

// ---------------------------------------------------------------------------
// keymap

namespace {

bool placeholder_for(const Model& model, const NodePath& path, const ConceptId& concept_id) {
  return !path.is_root() && model.is_placeholder(path) && model.admits(path.parent(), path.back(), concept_id);
}

bool complete_expression(const Model& model, const NodePath& path) {
  return !model.is_placeholder(path) && model.strong_kind_at(path, ids::Expression);
}

/// Concepts the declare session may insert at the position, by keyword.
std::multimap<std::string, ConceptId> declarable(const Model& model, const NodePath& parent, std::size_t index) {
  static const std::vector<std::pair<std::string, ConceptId>> all{
      {"function", ids::Function},  {"variable", ids::Variable}, {"variable", ids::MemberVariable},
      {"class", ids::Class},        {"namespace", ids::Namespace}, {"enum", ids::Enumeration},
      {"enum", ids::MemberEnumeration},
  };
  std::multimap<std::string, ConceptId> out;
  for (const auto& [word, id] : all)
    if (model.admits(parent, ChildIndex::cardinal(index), id)) out.emplace(word, id);
  return out;
}

std::optional<std::string> type_slot(const Model& model, const NodePath& declaration) {
  const auto& desc = model.registry().descriptor(model.concept_at(declaration));
  if (desc.named_slot("Returned")) return "Returned";
  if (desc.named_slot("Type")) return "Type";
  return std::nullopt;
}

EditSession name_session(const NodePath& target, std::string purpose) {
  EditSession s;
  s.target = target;
  s.kind = EditorKind::TextEditable;
  s.purpose = std::move(purpose);
  s.property = "name";
  return s;
}

EditSession type_session(const Model& model, const NodePath& target, std::string purpose) {
  EditSession s;
  s.target = target;
  s.kind = EditorKind::CompletionListEditable;
  s.purpose = std::move(purpose);
  s.property = "type";
  s.draft = model.text_property(target, "type");
  return s;
}

/// Puts a new entry into the list at `parent`, position `index`.
void add_entry(ActionContext& context, const NodePath& parent, std::size_t index) {
  auto& model = context.model;
  auto allowed = model.effective_allowed(parent, ChildIndex::cardinal(index));
  auto filler = model.registry().common_placeholder(allowed);
  if (model.registry().kind(filler) == ConceptKind::Notional) {
    if (declarable(model, parent, index).empty())
      fail(ErrorCode::ActionNotApplicable, "nothing can be declared in " + model.concept_at(parent).str());
    EditSession s;
    s.target = parent;
    s.kind = EditorKind::CompletionListEditable;
    s.purpose = "declare";
    // The insertion position rides in the property field.
    s.property = std::to_string(index);
    model.move_focus(parent);
    context.next_session = std::move(s);
    return;
  }
  auto at = model.insert_child(parent, ChildIndex::cardinal(index), filler);
  model.move_focus(at);
  if (model.strong_kind_at(at, ids::Declaration)) context.next_session = name_session(at, "declare-name");
}

void enter(ActionContext& context) {
  auto& model = context.model;
  const auto focus = model.resolve(context.target);
  const auto& registry = model.registry();
  const auto& c = model.concept_at(focus);
  if (c != ids::Invocation && registry.descriptor(c).cardinal_slot()) {
    add_entry(context, focus, model.cardinal_count(focus));
    return;
  }
  NodePath cur = focus;
  while (!cur.is_root()) {
    const auto parent = cur.parent();
    if (cur.back().is_cardinal() && model.concept_at(parent) != ids::Invocation) {
      add_entry(context, parent, cur.back().position() + 1);
      return;
    }
    cur = parent;
  }
  fail(ErrorCode::ActionNotApplicable, "no list to extend");
}

void comma(ActionContext& context) {
  auto& model = context.model;
  NodePath cur = context.target;
  while (!cur.is_root()) {
    const auto parent = cur.parent();
    if (cur.back().is_cardinal() && model.concept_at(parent) == ids::Invocation) {
      auto at = model.insert_child(parent, ChildIndex::cardinal(cur.back().position() + 1), ids::Expression);
      model.move_focus(at);
      return;
    }
    cur = parent;
  }
  fail(ErrorCode::ActionNotApplicable, "not inside an argument list");
}

void open_paren(ActionContext& context) {
  auto& model = context.model;
  const auto& target = context.target;
  if (model.is_placeholder(target)) {
    model.set_tagged(target, true);
    return;
  }
  if (!complete_expression(model, target) || apparent_type(model, target).kind != ValueType::Kind::FunctionOf)
    fail(ErrorCode::ActionNotApplicable, "'(' needs a placeholder or a function value");
  wrap_invocation(model, target);
}

void close_paren(ActionContext& context) {
  auto& model = context.model;
  for (NodePath cur = context.target;; cur = cur.parent()) {
    if (model.tagged(cur)) {
      model.set_tagged(cur, false);
      model.move_focus(cur);
      return;
    }
    if (cur.is_root()) break;
  }
  for (NodePath cur = context.target; !cur.is_root();) {
    cur = cur.parent();
    if (model.concept_at(cur) == ids::Invocation) {
      model.move_focus(cur);
      return;
    }
  }
  fail(ErrorCode::ActionNotApplicable, "no open group");
}

void add_initializer(ActionContext& context) {
  auto& model = context.model;
  NodePath variable = context.target;
  if (model.concept_at(variable) == ids::VariableDeclarationStatement) variable = model.resolve(variable.child("Variable"));
  auto slot = ChildIndex::named("Initializer");
  if (model.has_child(variable, slot)) {
    model.move_focus(model.resolve_child(variable, slot));
    return;
  }
  auto at = model.insert_child(variable, slot, ids::Expression);
  model.move_focus(at);
}

void remove(ActionContext& context) {
  auto& model = context.model;
  const auto& target = context.target;
  if (target.is_root()) fail(ErrorCode::CannotRemoveRoot, "the root cannot be removed");
  if (target.back().is_cardinal()) {
    try {
      model.remove_node(target, RemoveMode::DeleteCardinal);
      return;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WouldViolateStructure) throw;
    }
  }
  if (model.is_placeholder(target)) fail(ErrorCode::ActionNotApplicable, "already empty");
  model.remove_node(target, RemoveMode::CollapseToPlaceholder);
}

std::vector<std::string> split(const std::string& symbol) {
  std::vector<std::string> keys;
  for (char ch : symbol) keys.emplace_back(1, ch);
  return keys;
}

}  // namespace

void install_keymap(const Registry& registry, ActionTable& actions, Keymap& keymap) {
  auto bind = [&](const ConceptId& c, std::vector<std::string> keys, const std::string& action, Applicability applies = {}) {
    keymap.bind(registry, actions, c, std::move(keys), action, std::move(applies));
  };

  for (const auto& op : operator_table()) {
    if (op.arity == Arity::Binary) {
      auto id = "binary:" + op.symbol;
      actions.add(id, [op](ActionContext& c) { insert_operation(c.model, c.target, op); });
      bind(ids::Expression, split(op.symbol), id, complete_expression);
    } else if (op.arity == Arity::UnaryPostfix) {
      auto id = "postfix:" + op.symbol;
      actions.add(id, [op](ActionContext& c) { insert_operation(c.model, c.target, op); });
      bind(ids::Expression, split(op.symbol), id, complete_expression);
    } else {
      auto id = "prefix:" + op.symbol;
      actions.add(id, [op](ActionContext& c) { insert_operation(c.model, c.target, op); });
      bind(ids::UnaryOperation, split(op.symbol), id,
           [](const Model& m, const NodePath& p) { return placeholder_for(m, p, ids::UnaryOperation); });
    }
  }

  for (char d = '0'; d <= '9'; ++d) {
    auto id = std::string("integer-literal-") + d;
    actions.add(id, [d](ActionContext& c) {
      auto at = c.model.replace_node(c.target, ids::IntegerLiteral, {}, {{"value", std::int64_t{d - '0'}}});
      c.model.move_focus(at);
      EditSession s;
      s.target = at;
      s.kind = EditorKind::IntegerEditable;
      s.draft = std::string(1, d);
      s.property = "value";
      c.next_session = std::move(s);
    });
    bind(ids::IntegerLiteral, {std::string(1, d)}, id,
         [](const Model& m, const NodePath& p) { return placeholder_for(m, p, ids::IntegerLiteral); });
  }

  actions.add("string-literal", [](ActionContext& c) {
    auto at = c.model.replace_node(c.target, ids::StringLiteral);
    c.model.move_focus(at);
    EditSession s;
    s.target = at;
    s.kind = EditorKind::TextEditable;
    s.purpose = "string";
    s.property = "text";
    c.next_session = std::move(s);
  });
  bind(ids::StringLiteral, {"\""}, "string-literal",
       [](const Model& m, const NodePath& p) { return placeholder_for(m, p, ids::StringLiteral); });

  actions.add("compound-statement", [](ActionContext& c) {
    auto at = c.model.replace_node(c.target, ids::CompoundStatement);
    c.model.move_focus(at);
  });
  bind(ids::CompoundStatement, {"{"}, "compound-statement",
       [](const Model& m, const NodePath& p) { return placeholder_for(m, p, ids::CompoundStatement); });

  actions.add("identifier", [](ActionContext& c) {
    EditSession s;
    s.target = c.target;
    s.kind = EditorKind::CompletionListEditable;
    s.purpose = "identifier";
    c.next_session = std::move(s);
  });
  bind(ids::VariableReference, {":"}, "identifier",
       [](const Model& m, const NodePath& p) { return placeholder_for(m, p, ids::VariableReference); });

  actions.add("open-paren", open_paren);
  bind(ids::Expression, {"("}, "open-paren");
  actions.add("close-paren", close_paren);
  bind(ids::Concept, {")"}, "close-paren");
  actions.add("enter", enter);
  bind(ids::Concept, {"<enter>"}, "enter");
  actions.add("next-argument", comma);
  bind(ids::Concept, {","}, "next-argument");
  actions.add("add-initializer", add_initializer);
  bind(ids::Variable, {"="}, "add-initializer");
  bind(ids::VariableDeclarationStatement, {"="}, "add-initializer");
  actions.add("delete", remove);
  bind(ids::Concept, {"<delete>"}, "delete");

  keymap.bind_descriptors(registry, actions);
}

// ---------------------------------------------------------------------------
// edit sessions

namespace {

bool word_char(std::string_view token) {
  return token.size() == 1 && (std::isalnum(static_cast<unsigned char>(token[0])) || token[0] == '_');
}

std::optional<NodePath> value_named(const Model& model, const NodePath& at, const std::string& name) {
  for (const auto& v : visible_values(model, at))
    if (v.name == name) return v.declaration;
  return std::nullopt;
}

void require_identifier(const std::string& draft) {
  if (!is_identifier(draft)) fail(ErrorCode::InvalidDraft, "'" + draft + "' is not an identifier");
}

void refer(Model& model, const NodePath& target, const NodePath& declaration) {
  NodePath at = target;
  if (model.concept_at(target) == ids::VariableReference)
    model.set_property(target, "target", declaration);
  else
    at = model.replace_node(target, ids::VariableReference, {}, {{"target", declaration}});
  model.move_focus(at);
}

}  // namespace

std::optional<EditSession> CppEditSupport::open(const Model& model, const NodePath& raw) const {
  const auto path = model.resolve(raw);
  const auto& c = model.concept_at(path);
  EditSession s;
  s.target = path;
  if (model.is_placeholder(path)) {
    if (!model.strong_kind_at(path, ids::Statement)) return EditSupport::open(model, path);
    s.kind = EditorKind::CompletionListEditable;
    return s;
  }
  if (c == ids::IntegerLiteral) {
    s.kind = EditorKind::IntegerEditable;
    s.property = "value";
    if (auto v = model.property(path, "value"); v && std::holds_alternative<std::int64_t>(*v))
      s.draft = std::to_string(std::get<std::int64_t>(*v));
    return s;
  }
  if (c == ids::StringLiteral) {
    s.kind = EditorKind::TextEditable;
    s.purpose = "string";
    s.property = "text";
    s.draft = model.text_property(path, "text");
    return s;
  }
  if (c == ids::TypeReference) return type_session(model, path, "type");
  if (c == ids::VariableReference) {
    s.kind = EditorKind::CompletionListEditable;
    s.purpose = "identifier";
    if (auto v = model.property(path, "target"); v && std::holds_alternative<NodePath>(*v)) {
      const auto& target = std::get<NodePath>(*v);
      if (model.exists(target)) s.draft = declaration_name(model, target);
    }
    return s;
  }
  if (model.strong_kind_at(path, ids::Declaration)) {
    auto n = name_session(path, "name");
    n.draft = model.text_property(path, "name");
    return n;
  }
  return std::nullopt;
}

std::vector<std::string> CppEditSupport::candidates(const Model& model, const EditSession& session) const {
  if (session.kind != EditorKind::CompletionListEditable) return {};
  const auto& p = session.purpose;
  std::vector<std::string> out;
  if (p == "type" || p == "declare-type") return type_names(model);
  if (p == "declare") {
    std::size_t index = std::stoul(session.property);
    for (const auto& [word, id] : declarable(model, session.target, index)) out.push_back(word);
    return out;
  }
  if (p == "identifier") {
    for (const auto& v : visible_values(model, session.target)) out.push_back(v.name);
    return out;
  }
  if (p.empty() && model.is_placeholder(session.target)) {
    out = keywords_at(model, session.target);
    const auto& target = session.target;
    if (model.admits(target.parent(), target.back(), ids::VariableReference))
      for (const auto& v : visible_values(model, target)) out.push_back(v.name);
    if (model.admits(target.parent(), target.back(), ids::VariableDeclarationStatement))
      for (auto& t : type_names(model)) out.push_back(std::move(t));
  }
  return out;
}

bool CppEditSupport::is_draft_char(const EditSession& session, std::string_view token) const {
  if (session.kind == EditorKind::IntegerEditable) return EditSupport::is_draft_char(session, token);
  if (session.purpose == "string") return token == " " || (is_printable_token(token) && token != "\"");
  return word_char(token);
}

void CppEditSupport::commit(ActionContext& context, const EditSession& session) const {
  auto& model = context.model;
  const auto& p = session.purpose;
  const auto& draft = session.draft;
  const auto& target = session.target;

  if (session.kind == EditorKind::IntegerEditable || p == "string") {
    EditSupport::commit(context, session);
    return;
  }
  if (p == "name" || p == "declare-name") {
    require_identifier(draft);
    model.set_property(target, "name", draft);
    model.move_focus(target);
    if (p == "declare-name") {
      if (auto slot = type_slot(model, target)) {
        auto type = model.resolve(target.child(*slot));
        if (model.text_property(type, "type").empty()) context.next_session = type_session(model, type, "declare-type");
      }
    }
    return;
  }
  if (p == "type" || p == "declare-type") {
    require_identifier(draft);
    model.set_property(target, "type", draft);
    model.move_focus(p == "declare-type" ? target.parent() : target);
    return;
  }
  if (p == "declare") {
    const std::size_t index = std::stoul(session.property);
    auto options = declarable(model, target, index);
    auto [from, to] = options.equal_range(draft);
    if (from == to) fail(ErrorCode::UnknownKeyword, "'" + draft + "'");
    if (std::next(from) != to) fail(ErrorCode::AmbiguousKeyword, "'" + draft + "'");
    auto at = model.insert_child(target, ChildIndex::cardinal(index), from->second);
    model.move_focus(at);
    context.next_session = name_session(at, "declare-name");
    return;
  }
  if (p == "identifier") {
    auto declaration = value_named(model, target, draft);
    if (!declaration) fail(ErrorCode::UnknownKeyword, "nothing named '" + draft + "' is in scope");
    refer(model, target, *declaration);
    return;
  }

  // Placeholder entry: keywords, then values in scope, then type names.
  if (!model.is_placeholder(target)) fail(ErrorCode::InvalidDraft, "nothing to commit at '" + target.to_string() + "'");
  auto keyword = keyword_concepts(model, target, draft);
  if (keyword.size() > 1) fail(ErrorCode::AmbiguousKeyword, "'" + draft + "'");
  if (keyword.size() == 1) {
    PropertyMap props;
    if (keyword.front() == ids::BoolLiteral) props["value"] = draft == "true";
    auto at = model.replace_node(target, keyword.front(), {}, props);
    model.move_focus(first_placeholder(model, at));
    return;
  }
  const auto& parent = target.parent();
  const auto& index = target.back();
  if (model.admits(parent, index, ids::VariableReference)) {
    if (auto declaration = value_named(model, target, draft)) {
      refer(model, target, *declaration);
      return;
    }
  }
  if (model.admits(parent, index, ids::VariableDeclarationStatement) && type_from_name(model, draft).known()) {
    auto at = model.replace_node(target, ids::VariableDeclarationStatement);
    auto variable = model.resolve(at.child("Variable"));
    model.set_property(model.resolve(variable.child("Type")), "type", draft);
    model.move_focus(variable);
    context.next_session = name_session(variable, "declare-name");
    return;
  }
  fail(ErrorCode::UnknownKeyword, "'" + draft + "'");
}

}  // namespace martta::cpp
