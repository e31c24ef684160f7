#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "martta/persistence.hpp"
#include "support.hpp"

using namespace martta;
using namespace testing;
namespace ids = cpp::ids;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidDescriptor;
}

const ChildIndex kLeft = ChildIndex::named("Left");

/// CppProgram > Function run > Body with `statement` as its only entry.
Model with_statement(const Workbench& wb, NodeValue statement) {
  return Model::from_value(wb.registry(),
                           node(ids::CppProgram, {}, {},
                                {node(ids::Function, {{"name", std::string("run")}},
                                      {{"Returned", type_ref("void")}, {"Body", block({std::move(statement)})}})}));
}
const NodePath kStatement = NodePath::parse("0.Body.0");

}  // namespace

TEST_CASE("new models") {
  Workbench wb;
  auto m = wb.new_model();
  CHECK(m.concept_at({}) == ids::CppProgram);
  CHECK(m.validate_structure().empty());
  CHECK(code_of([&] { wb.new_model(ids::IntegerLiteral); }) == ErrorCode::NotAProgramConcept);
  Registry unsealed;
  cpp::register_catalog(unsealed);
  CHECK(code_of([&] { Model::create(unsealed, ids::CppProgram); }) == ErrorCode::RegistryNotSealed);
}

TEST_CASE("placeholder filling") {
  Workbench wb;
  auto m = with_statement(wb, node(ids::Statement));
  auto bin = m.replace_node(kStatement, ids::BinaryOperation);
  CHECK(shape(m, bin) == "BinaryOperation[+](Expression, Expression)");
  CHECK(m.fill_placeholders(bin) == 0);

  auto f = m.replace_node(kStatement, ids::ForStatement);
  CHECK(m.concept_at(f.child("Init")) == ids::Statement);
  CHECK(m.concept_at(f.child("Condition")) == ids::Expression);
  CHECK(m.concept_at(f.child("Update")) == ids::Expression);
  CHECK(m.concept_at(f.child("Body")) == ids::CompoundStatement);
  CHECK(m.validate_structure().empty());
  CHECK(code_of([&] { m.fill_placeholders(NodePath::parse("9")); }) == ErrorCode::UnknownNode);
}

TEST_CASE("insert_child honours strong ancestry") {
  Workbench wb;
  auto m = wb.new_model();
  auto cls = m.insert_child({}, ChildIndex::cardinal(0), ids::Class, {{"name", std::string("K")}});
  auto ns = m.insert_child({}, ChildIndex::cardinal(1), ids::Namespace, {{"name", std::string("N")}});
  CHECK_NOTHROW(m.insert_child(cls, ChildIndex::cardinal(0), ids::MemberEnumeration));
  CHECK(code_of([&] { m.insert_child(ns, ChildIndex::cardinal(0), ids::MemberEnumeration); }) ==
        ErrorCode::SlotRejectsConcept);
  CHECK(code_of([&] { m.insert_child(ns, ChildIndex::cardinal(0), ids::Declaration); }) == ErrorCode::NotInstantiable);
  CHECK(code_of([&] { m.insert_child(ns, ChildIndex::cardinal(7), ids::Function); }) == ErrorCode::NoSuchSlot);

  auto fn = m.insert_child(ns, ChildIndex::cardinal(0), ids::Function);
  auto fn2 = m.insert_child(ns, ChildIndex::cardinal(0), ids::Variable);
  CHECK(fn2 == ns.child(0));
  CHECK(m.concept_at(ns.child(1)) == ids::Function);
  (void)fn;

  auto s = with_statement(wb, binary("+", integer(1), integer(2)));
  CHECK(code_of([&] { s.insert_child(kStatement, kLeft, ids::IntegerLiteral); }) == ErrorCode::NoSuchSlot);
  CHECK(s.validate_structure().empty());
}

TEST_CASE("placeholders are admitted only where they are the slot's own placeholder") {
  Workbench wb;
  auto m = with_statement(wb, binary("+", integer(1), integer(2)));
  CHECK(m.admits(kStatement, kLeft, ids::Expression));
  CHECK_FALSE(m.admits(kStatement, kLeft, ids::Statement));
  CHECK_FALSE(m.admits(NodePath::parse("0"), ChildIndex::named("Body"), ids::Statement));
}

TEST_CASE("replace_node with adoption") {
  Workbench wb;
  auto m = with_statement(wb, ref_to("0"));
  auto inv = m.replace_node(kStatement, ids::Invocation, {{kStatement, ChildIndex::named("Callee")}});
  CHECK(shape(m, inv) == "Invocation(VariableReference[run])");
  CHECK(m.cardinal_count(inv) == 0);
  CHECK(m.validate_structure().empty());

  auto lit = m.replace_node(inv.child("Callee"), ids::IntegerLiteral, {}, {{"value", std::int64_t{1}}});
  CHECK(shape(m, lit) == "IntegerLiteral[1]");
  CHECK(code_of([&] { m.replace_node(lit, ids::Literal); }) == ErrorCode::NotInstantiable);
  CHECK(code_of([&] { m.replace_node(lit, ids::Function); }) == ErrorCode::SlotRejectsConcept);
  CHECK(code_of([&] { m.replace_node({}, ids::CppProgram); }) == ErrorCode::CannotRemoveRoot);

  auto before = save(m);
  CHECK(code_of([&] {
          m.replace_node(kStatement, ids::BinaryOperation,
                         {{kStatement, kLeft}, {kStatement.child("Callee"), ChildIndex::named("Right")}});
        }) == ErrorCode::PlanSlotMismatch);
  CHECK(code_of([&] { m.replace_node(kStatement, ids::BinaryOperation, {{kStatement, ChildIndex::named("Nope")}}); }) ==
        ErrorCode::PlanSlotMismatch);
  CHECK(save(m) == before);
}

TEST_CASE("remove_node") {
  Workbench wb;
  auto m = with_statement(wb, binary("+", integer(1), integer(2)));
  auto out = m.remove_node(kStatement.child("Left"), RemoveMode::CollapseToPlaceholder);
  CHECK(m.concept_at(out.path) == ids::Expression);
  CHECK(code_of([&] { m.remove_node({}, RemoveMode::DeleteCardinal); }) == ErrorCode::CannotRemoveRoot);
  CHECK(code_of([&] { m.remove_node(kStatement.child("Right"), RemoveMode::DeleteCardinal); }) ==
        ErrorCode::WouldViolateStructure);

  auto b = Model::from_value(wb.registry(),
                             node(ids::CppProgram, {}, {},
                                  {node(ids::Function, {{"name", std::string("run")}},
                                        {{"Returned", type_ref("void")},
                                         {"Body", block({ret(integer(1)), ret(integer(2)), ret(integer(3))})}})}));
  b.remove_node(NodePath::parse("0.Body.2"), RemoveMode::DeleteCardinal);
  CHECK(b.cardinal_count(NodePath::parse("0.Body")) == 2);
  CHECK(b.validate_structure().empty());
}

TEST_CASE("rerouting separates normal from actual structure") {
  Workbench wb;
  auto fragment = node(ids::FragmentParameter, {{"name", std::string("T")}}, {{"Surrogate", type_ref("int")}});
  fragment.reroute = "Surrogate";
  auto m = Model::from_value(
      wb.registry(),
      node(ids::CppProgram, {}, {},
           {node(ids::Function, {{"name", std::string("run")}}, {{"Returned", fragment}, {"Body", block({})}})}));
  const auto returned = ChildIndex::named("Returned");
  CHECK(m.concept_at(m.raw_child(NodePath::parse("0"), returned)) == ids::FragmentParameter);
  CHECK(m.concept_at(m.resolve_child(NodePath::parse("0"), returned)) == ids::TypeReference);
  CHECK(m.resolve_child(NodePath::parse("0"), ChildIndex::named("Body")) ==
        m.raw_child(NodePath::parse("0"), ChildIndex::named("Body")));
  CHECK(code_of([&] { m.raw_child(NodePath::parse("0"), ChildIndex::named("Nope")); }) == ErrorCode::NoSuchChild);
  CHECK(m.validate_structure().empty());

  auto bare = fragment;
  bare.reroute.reset();
  m.implant(NodePath::parse("0.Returned"), bare);
  CHECK_FALSE(m.validate_structure().empty());
}

TEST_CASE("dangling reroutes are reported") {
  ConceptDescriptor root;
  root.id = "Concept";
  root.kind = ConceptKind::Notional;
  Registry r;
  r.register_concept(root);
  ConceptDescriptor program;
  program.id = "Program";
  program.kind = ConceptKind::Notional;
  program.superclass = ConceptId("Concept");
  r.register_concept(program);
  ConceptDescriptor loop;
  loop.id = "Loop";
  loop.superclass = ConceptId("Concept");
  loop.child_slots = {SlotSpec::named_slot("Next", {"Concept"}, false)};
  r.register_concept(loop);
  ConceptDescriptor top;
  top.id = "Top";
  top.superclass = ConceptId("Program");
  top.child_slots = {SlotSpec::named_slot("Child", {"Loop"}, false)};
  r.register_concept(top);
  r.seal();

  auto v = node("Top", {}, {{"Child", node("Loop", {}, {{"Next", node("Loop")}})}});
  v.named.at("Child").reroute = "Next";
  v.named.at("Child").named.at("Next").reroute = "Next";
  auto m = Model::from_value(r, v, false);
  CHECK(code_of([&] { m.resolve_child({}, ChildIndex::named("Child")); }) == ErrorCode::NoSuchChild);
  CHECK_FALSE(m.validate_structure().empty());
}

TEST_CASE("raw traversal visits every node once") {
  Workbench wb;
  auto m = Model::from_value(wb.registry(), fib_program(true));
  auto all = m.preorder();
  CHECK(all.size() == m.node_count());
  CHECK(std::set<NodePath>(all.begin(), all.end()).size() == all.size());
}

TEST_CASE("focus moves") {
  Workbench wb;
  auto m = with_statement(wb, binary("+", integer(1), integer(2)));
  CHECK(code_of([&] { m.move_focus(FocusMove::Parent); }) == ErrorCode::NoSuchTarget);
  m.move_focus(kStatement);
  CHECK(m.move_focus(FocusMove::FirstChild) == kStatement.child("Left"));
  CHECK(m.move_focus(FocusMove::NextSibling) == kStatement.child("Right"));
  CHECK(m.move_focus(FocusMove::PrevSibling) == kStatement.child("Left"));
  CHECK(m.move_focus(FocusMove::Parent) == kStatement);
  CHECK(code_of([&] { m.move_focus(NodePath::parse("5.5")); }) == ErrorCode::NoSuchTarget);

  // Removing the focused node moves focus to its stand-in.
  m.move_focus(kStatement.child("Left"));
  m.remove_node(kStatement.child("Left"), RemoveMode::CollapseToPlaceholder);
  CHECK(m.exists(m.focus()));
}

TEST_CASE("hand-made documents are validated") {
  Workbench wb;
  auto bad = node(ids::CppProgram, {}, {},
                  {node(ids::Namespace, {{"name", std::string("N")}}, {},
                        {node(ids::MemberVariable, {{"name", std::string("v")}}, {{"Type", type_ref("int")}})})});
  CHECK(code_of([&] { Model::from_value(wb.registry(), bad); }) == ErrorCode::StructuralViolation);
  auto m = Model::from_value(wb.registry(), bad, false);
  auto problems = m.validate_structure();
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].node_path == NodePath::parse("0.0"));
  CHECK(problems[0].severity == Severity::StructuralError);

  auto missing = node(ids::CppProgram, {}, {}, {node(ids::Function, {{"name", std::string("f")}})});
  CHECK_FALSE(Model::from_value(wb.registry(), missing, false).validate_structure().empty());
}

TEST_CASE("references follow their targets") {
  Workbench wb;
  auto m = Model::from_value(wb.registry(), fib_program());
  auto refs_to_n = [&] {
    int count = 0;
    for (const auto& p : m.preorder()) {
      if (m.concept_at(p) != ids::VariableReference) continue;
      auto t = std::get<NodePath>(*m.property(p, "target"));
      if (m.exists(t) && m.concept_at(t) == ids::Argument) ++count;
    }
    return count;
  };
  CHECK(refs_to_n() == 4);
  // Inserting ahead of fib shifts every path; references still land.
  m.insert_child({}, ChildIndex::cardinal(0), ids::Variable, {{"name", std::string("g")}});
  CHECK(refs_to_n() == 4);
  CHECK(std::get<NodePath>(*m.property(NodePath::parse("1.Body.1.Value.Left.Callee"), "target")) == NodePath::parse("1"));
}

TEST_CASE("randomized kernel operations keep the tree valid") {
  Workbench wb;
  std::mt19937 rng(11);
  const std::vector<ConceptId> expressions{ids::IntegerLiteral, ids::BinaryOperation, ids::UnaryOperation,
                                           ids::Invocation, ids::BoolLiteral};
  const std::vector<ConceptId> statements{ids::ReturnStatement, ids::IfStatement, ids::ForStatement,
                                          ids::CompoundStatement, ids::VariableDeclarationStatement};
  auto m = Model::from_value(wb.registry(), fib_program(true));
  for (int step = 0; step < 2000; ++step) {
    auto all = m.preorder();
    auto at = all[rng() % all.size()];
    try {
      switch (rng() % 4) {
        case 0:
          m.replace_node(at, rng() % 2 ? expressions[rng() % expressions.size()] : statements[rng() % statements.size()]);
          break;
        case 1:
          m.remove_node(at, rng() % 2 ? RemoveMode::CollapseToPlaceholder : RemoveMode::DeleteCardinal);
          break;
        case 2:
          m.insert_child(at, ChildIndex::cardinal(0), statements[rng() % statements.size()]);
          break;
        default:
          m.move_focus(at);
      }
    } catch (const Error&) {
      // Rejected operations must leave no trace; validity is checked below.
    }
    auto problems = m.validate_structure();
    const std::string why = problems.empty() ? "" : "step " + std::to_string(step) + ": " + problems.front().message;
    REQUIRE_MESSAGE(problems.empty(), why);
    REQUIRE(m.exists(m.focus()));
    for (const auto& p : m.preorder()) {
      if (!m.is_placeholder(p) || p.is_root()) continue;
      CHECK(m.concept_at(p) == wb.registry().common_placeholder(m.effective_allowed(p.parent(), p.back())));
    }
  }
}
