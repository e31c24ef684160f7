#include "support.hpp"

#include <cctype>

namespace testing {

namespace ids = cpp::ids;

std::vector<std::string> keys(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string k; in >> k;) out.push_back(k == "_" ? "<space>" : k);
  return out;
}

std::string shape(const Model& m, const NodePath& raw) {
  auto p = m.resolve(raw);
  const auto& c = m.concept_at(p);
  std::string out = c.str();
  std::string label;
  if (c == ids::BinaryOperation || c == ids::UnaryOperation) {
    label = m.text_property(p, "operator");
    if (c == ids::UnaryOperation) {
      auto prefix = m.property(p, "prefix");
      if (prefix && !std::get<bool>(*prefix)) label = "post" + label;
    }
  } else if (c == ids::IntegerLiteral) {
    label = std::to_string(std::get<std::int64_t>(*m.property(p, "value")));
  } else if (c == ids::VariableReference) {
    auto t = std::get<NodePath>(*m.property(p, "target"));
    label = m.exists(t) ? cpp::declaration_name(m, t) : "?";
  } else if (c == ids::TypeReference) {
    label = m.text_property(p, "type");
  } else if (m.property(p, "name")) {
    label = m.text_property(p, "name");
  }
  if (!label.empty()) out += "[" + label + "]";
  auto kids = m.normal_children(p);
  if (!kids.empty()) {
    out += "(";
    for (std::size_t i = 0; i < kids.size(); ++i) out += (i ? ", " : "") + shape(m, kids[i]);
    out += ")";
  }
  if (m.tagged(p)) out = "<" + out + ">";
  return out;
}

NodeValue node(ConceptId concept_id, PropertyMap properties, std::map<std::string, NodeValue> named,
               std::vector<NodeValue> cardinal) {
  NodeValue v;
  v.concept_id = std::move(concept_id);
  v.properties = std::move(properties);
  v.named = std::move(named);
  v.cardinal = std::move(cardinal);
  return v;
}

NodeValue type_ref(const std::string& name) { return node(ids::TypeReference, {{"type", name}}); }
NodeValue ref_to(const std::string& path) { return node(ids::VariableReference, {{"target", NodePath::parse(path)}}); }
NodeValue integer(std::int64_t v) { return node(ids::IntegerLiteral, {{"value", v}}); }

NodeValue binary(const std::string& op, NodeValue l, NodeValue r) {
  return node(ids::BinaryOperation, {{"operator", op}}, {{"Left", std::move(l)}, {"Right", std::move(r)}});
}

NodeValue call(NodeValue callee, std::vector<NodeValue> args) {
  return node(ids::Invocation, {}, {{"Callee", std::move(callee)}}, std::move(args));
}

NodeValue ret(NodeValue v) { return node(ids::ReturnStatement, {}, {{"Value", std::move(v)}}); }
NodeValue block(std::vector<NodeValue> statements) { return node(ids::CompoundStatement, {}, {}, std::move(statements)); }

NodeValue declare(const std::string& name, const std::string& type, std::optional<NodeValue> init) {
  std::map<std::string, NodeValue> slots{{"Type", type_ref(type)}};
  if (init) slots.emplace("Initializer", std::move(*init));
  return node(ids::VariableDeclarationStatement, {},
              {{"Variable", node(ids::Variable, {{"name", name}}, std::move(slots))}});
}

NodeValue fib_program(bool with_main) {
  auto n = [] { return ref_to("0.0"); };
  auto fib = [] { return ref_to("0"); };
  auto body = block({
      node(ids::IfStatement, {}, {{"Condition", binary("<=", n(), integer(1))}, {"Body", ret(n())}}),
      ret(binary("+", call(fib(), {binary("-", n(), integer(1))}), call(fib(), {binary("-", n(), integer(2))}))),
  });
  auto function = node(ids::Function, {{"name", std::string("fib")}},
                       {{"Returned", type_ref("uint")}, {"Body", std::move(body)}},
                       {node(ids::Argument, {{"name", std::string("n")}}, {{"Type", type_ref("uint")}})});
  std::vector<NodeValue> decls{std::move(function)};
  if (with_main) {
    decls.push_back(node(ids::Function, {{"name", std::string("main")}},
                         {{"Returned", type_ref("int")},
                          {"Body", block({ret(binary("-", call(fib(), {integer(10)}), integer(55)))})}}));
  }
  return node(ids::CppProgram, {}, {}, std::move(decls));
}

std::vector<std::string> c_tokens(std::string_view text) {
  static const std::vector<std::string> puncts{"<=", ">=", "==", "!=", "&&", "||", "++", "--", "+=", "-=", "::"};
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    if (std::isspace(c)) {
      ++i;
    } else if (std::isalnum(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else {
      std::string tok(1, static_cast<char>(c));
      for (const auto& p : puncts)
        if (text.substr(i, 2) == p) tok = p;
      out.push_back(tok);
      i += tok.size();
    }
  }
  return out;
}

std::vector<std::string> sample_prelude() {
  return keys(
      "<enter> f u n c t i o n <enter> a b s <enter> i n t <enter> "
      "<enter> x <enter> i n t <enter> "
      "<up> <down> <right> <enter> r e t u r n _ x <enter> "
      "<up> <up> <up> <up> <up> <enter> f u n c t i o n <enter> r u n <enter> v o i d <enter> "
      "<down> <right> <enter> i n t <enter> i <enter> <enter>");
}

std::vector<std::string> sample_entry() { return keys("i + = : a b s ( 2 * ( i + 3 ) )"); }

// ---------------------------------------------------------------------------
// fixture concepts

namespace {

bool any_of_concept(const Model& m, const ConceptId& id) {
  for (const auto& p : m.preorder())
    if (m.concept_at(p) == id) return true;
  return false;
}

ConceptDescriptor statement_like(ConceptId id, bool composite) {
  ConceptDescriptor d;
  d.id = std::move(id);
  d.superclass = ids::Statement;
  d.weak_parents = {ids::WebViewable};
  if (composite) d.weak_parents.push_back(ids::Composite);
  return d;
}

}  // namespace

NodeValue swap_lowered(const std::string& at, const std::string& a, const std::string& b) {
  return block({
      declare("temp", "int", ref_to(a)),
      binary("=", ref_to(a), ref_to(b)),
      binary("=", ref_to(b), ref_to(at + (at.empty() ? "" : ".") + "0.Variable")),
  });
}

void register_fixture_concepts(Registry& r) {
  auto swap = statement_like("SwapStatement", true);
  swap.child_slots = {SlotSpec::named_slot("A", {ids::Expression}), SlotSpec::named_slot("B", {ids::Expression})};
  swap.transform = [](Model& m, const NodePath& at) {
    auto a = m.extract(at.child("A"));
    auto b = m.extract(at.child("B"));
    auto temp = at.child(0).child("Variable").to_string();
    m.graft(at, block({
                    declare("temp", "int", a),
                    binary("=", a, b),
                    binary("=", b, ref_to(temp)),
                }));
    return TransformStep::Transformed;
  };
  r.register_concept(swap);

  auto defer_a = statement_like("DeferA", true);
  defer_a.transform = [](Model& m, const NodePath& at) {
    if (any_of_concept(m, "DeferB")) return TransformStep::Deferred;
    m.graft(at, block({}));
    return TransformStep::Transformed;
  };
  r.register_concept(defer_a);
  auto defer_b = statement_like("DeferB", true);
  defer_b.transform = [](Model& m, const NodePath& at) {
    if (any_of_concept(m, "DeferA")) return TransformStep::Deferred;
    m.graft(at, block({}));
    return TransformStep::Transformed;
  };
  r.register_concept(defer_b);

  // Lowers to a fresh copy of itself, forever.
  auto spinner = statement_like("Spinner", true);
  spinner.transform = [](Model& m, const NodePath& at) {
    m.graft(at, node("Spinner"));
    return TransformStep::Transformed;
  };
  r.register_concept(spinner);

  auto breaker = statement_like("Breaker", true);
  breaker.transform = [](Model& m, const NodePath& at) {
    m.implant(at, node(ids::BinaryOperation, {{"operator", std::string("+")}}, {{"Left", integer(1)}}));
    return TransformStep::Transformed;
  };
  r.register_concept(breaker);

  ConceptDescriptor opaque;
  opaque.id = "Opaque";
  opaque.superclass = ids::Statement;
  opaque.child_slots = {SlotSpec::named_slot("Inner", {ids::Expression})};
  opaque.default_properties = {{"note", std::string("kept")}};
  r.register_concept(opaque);
}

}  // namespace testing
