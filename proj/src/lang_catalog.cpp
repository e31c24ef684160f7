#include "martta/lang.hpp"

namespace martta::cpp {

namespace {

ConceptDescriptor notional(ConceptId id, ConceptId super, std::vector<ConceptId> weak = {}) {
  ConceptDescriptor d;
  d.id = std::move(id);
  d.kind = ConceptKind::Notional;
  d.superclass = std::move(super);
  d.weak_parents = std::move(weak);
  return d;
}

ConceptDescriptor placeholder(ConceptId id, ConceptId super, std::vector<ConceptId> weak = {}) {
  auto d = notional(std::move(id), std::move(super), std::move(weak));
  d.kind = ConceptKind::Placeholder;
  return d;
}

ConceptDescriptor proper(ConceptId id, ConceptId super, std::vector<ConceptId> weak = {}) {
  auto d = notional(std::move(id), std::move(super), std::move(weak));
  d.kind = ConceptKind::Proper;
  d.weak_parents.push_back(ids::WebViewable);
  return d;
}

SlotSpec named(std::string name, std::vector<ConceptId> allowed, bool required = true) {
  return SlotSpec::named_slot(std::move(name), std::move(allowed), required);
}

}  // namespace

void register_catalog(Registry& r) {
  using namespace ids;
  ConceptDescriptor root;
  root.id = Concept;
  root.kind = ConceptKind::Notional;
  r.register_concept(root);

  for (const auto& id : {Typed, TypedOwner, WebViewable, Editable, Composite, Program})
    r.register_concept(notional(id, Concept));
  r.register_concept(notional(Declaration, Concept));

  const PropertyMap unnamed{{"name", std::string()}};

  auto type_reference = proper(TypeReference, Concept, {Editable});
  type_reference.default_properties = {{"type", std::string()}};
  r.register_concept(type_reference);

  // Statements come first so function bodies can name them.
  r.register_concept(placeholder(Statement, Concept));
  r.register_concept(placeholder(Expression, Statement, {Typed}));

  auto compound = proper(CompoundStatement, Statement);
  compound.child_slots = {SlotSpec::cardinal_list({Statement})};
  r.register_concept(compound);

  auto variable = proper(Variable, Declaration, {Typed, Editable});
  variable.child_slots = {named("Type", {TypeReference}), named("Initializer", {Expression}, false)};
  variable.default_properties = unnamed;
  r.register_concept(variable);

  auto for_statement = proper(ForStatement, Statement);
  for_statement.child_slots = {named("Init", {Statement}), named("Condition", {Expression}),
                               named("Update", {Expression}), named("Body", {CompoundStatement})};
  for_statement.keywords = {"for"};
  r.register_concept(for_statement);

  auto if_statement = proper(IfStatement, Statement);
  if_statement.child_slots = {named("Condition", {Expression}), named("Body", {Statement})};
  if_statement.keywords = {"if"};
  r.register_concept(if_statement);

  auto return_statement = proper(ReturnStatement, Statement);
  return_statement.child_slots = {named("Value", {Expression})};
  return_statement.keywords = {"return"};
  r.register_concept(return_statement);

  auto declaration_statement = proper(VariableDeclarationStatement, Statement);
  declaration_statement.child_slots = {named("Variable", {Variable})};
  r.register_concept(declaration_statement);

  r.register_concept(notional(Literal, Expression));
  auto integer = proper(IntegerLiteral, Literal, {Editable});
  integer.default_properties = {{"value", std::int64_t{0}}};
  r.register_concept(integer);
  auto boolean = proper(BoolLiteral, Literal);
  boolean.keywords = {"true", "false"};
  boolean.default_properties = {{"value", false}};
  r.register_concept(boolean);
  auto string = proper(StringLiteral, Literal, {Editable});
  string.default_properties = {{"text", std::string()}};
  r.register_concept(string);

  r.register_concept(notional(Operation, Expression, {TypedOwner}));
  auto binary = proper(BinaryOperation, Operation);
  binary.child_slots = {named("Left", {Expression}), named("Right", {Expression})};
  binary.default_properties = {{"operator", std::string("+")}};
  r.register_concept(binary);
  auto unary = proper(UnaryOperation, Operation);
  unary.child_slots = {named("Operand", {Expression})};
  unary.default_properties = {{"operator", std::string("-")}, {"prefix", true}};
  r.register_concept(unary);

  auto invocation = proper(Invocation, Expression, {TypedOwner});
  invocation.child_slots = {named("Callee", {Expression}), SlotSpec::cardinal_list({Expression})};
  r.register_concept(invocation);

  auto reference = proper(VariableReference, Expression, {Editable});
  reference.default_properties = {{"target", NodePath{}}};
  r.register_concept(reference);

  auto argument = proper(Argument, Declaration, {Variable, Editable});
  argument.child_slots = {named("Type", {TypeReference})};
  argument.default_properties = unnamed;
  r.register_concept(argument);

  auto function = proper(Function, Declaration, {Typed, Editable});
  function.child_slots = {named("Returned", {TypeReference}), named("Body", {CompoundStatement}),
                          SlotSpec::cardinal_list({Argument})};
  function.default_properties = unnamed;
  r.register_concept(function);

  auto enumerator = proper(Enumerator, Declaration, {Editable});
  enumerator.default_properties = unnamed;
  r.register_concept(enumerator);
  auto enumeration = proper(Enumeration, Declaration, {Editable});
  enumeration.child_slots = {SlotSpec::cardinal_list({Enumerator})};
  enumeration.default_properties = unnamed;
  r.register_concept(enumeration);

  r.register_concept(notional(Member, Declaration));
  auto member_variable = proper(MemberVariable, Member, {Variable, Editable});
  member_variable.child_slots = variable.child_slots;
  member_variable.default_properties = unnamed;
  r.register_concept(member_variable);
  auto member_enumeration = proper(MemberEnumeration, Member, {Enumeration, Editable});
  member_enumeration.child_slots = enumeration.child_slots;
  member_enumeration.default_properties = unnamed;
  r.register_concept(member_enumeration);

  auto klass = proper(Class, Declaration, {Editable});
  klass.child_slots = {SlotSpec::cardinal_list({Member})};
  klass.default_properties = unnamed;
  r.register_concept(klass);

  auto ns = proper(Namespace, Declaration, {Editable});
  ns.child_slots = {SlotSpec::cardinal_list({Enumeration, Class, Function, Variable, Namespace})};
  ns.default_properties = unnamed;
  r.register_concept(ns);

  auto fragment = proper(FragmentParameter, Concept);
  fragment.child_slots = {named("Surrogate", {Concept})};
  fragment.reroute_slot = "Surrogate";
  fragment.default_properties = unnamed;
  r.register_concept(fragment);

  auto program = proper(CppProgram, Program);
  program.child_slots = {SlotSpec::cardinal_list({Function, Variable, Class, Namespace, Enumeration})};
  r.register_concept(program);
}

void register_language(Registry& registry, ActionTable& actions, Keymap& keymap) {
  register_catalog(registry);
  registry.seal();
  install_keymap(registry, actions, keymap);
}

}  // namespace martta::cpp
