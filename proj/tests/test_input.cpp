#include <functional>
#include <random>

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

/// An editor focused on an empty statement after `int i;` in `void run()`.
Editor with_i(const Workbench& wb) {
  auto ed = wb.editor();
  ed.feed(sample_prelude());
  return ed;
}

}  // namespace

TEST_CASE("script tokens") {
  CHECK(is_valid_token("+"));
  CHECK(is_valid_token("<enter>"));
  CHECK(is_valid_token("é"));
  CHECK_FALSE(is_valid_token("<bogus>"));
  CHECK_FALSE(is_valid_token("ab"));
  CHECK_FALSE(is_valid_token(" "));
  auto tokens = parse_script("i\n+\n<enter>\n");
  CHECK(tokens == std::vector<std::string>{"i", "+", "<enter>"});
  CHECK(format_script(tokens) == "i\n+\n<enter>\n");
  CHECK(code_of([] { parse_script("i\nnope\n"); }) == ErrorCode::InvalidToken);
  for (const auto& t : token_vocabulary()) CHECK(is_valid_token(t));
}

TEST_CASE("binding registration") {
  Workbench wb;
  ActionTable actions;
  actions.add("noop", [](ActionContext&) {});
  Keymap keymap;
  keymap.bind(wb.registry(), actions, ids::Expression, {"#"}, "noop");
  CHECK(code_of([&] { keymap.bind(wb.registry(), actions, ids::Expression, {"#"}, "noop"); }) ==
        ErrorCode::DuplicateBinding);
  CHECK_NOTHROW(keymap.bind(wb.registry(), actions, ids::Statement, {"#"}, "noop"));
  CHECK(code_of([&] { keymap.bind(wb.registry(), actions, ids::Expression, {"@"}, "missing"); }) ==
        ErrorCode::UnknownAction);
  CHECK(code_of([&] { keymap.bind(wb.registry(), actions, ids::Expression, {"<undo>"}, "noop"); }) ==
        ErrorCode::InvalidToken);
  CHECK(code_of([&] { actions.add("noop", [](ActionContext&) {}); }) == ErrorCode::DuplicateId);

  // The catalog binds both "+" and "+=" on expressions.
  bool plus = false, plus_assign = false;
  for (const auto& b : wb.keymap().bindings()) {
    if (b.concept_id != ids::Expression) continue;
    plus |= b.keys == std::vector<std::string>{"+"};
    plus_assign |= b.keys == std::vector<std::string>{"+", "="};
  }
  CHECK(plus);
  CHECK(plus_assign);
}

TEST_CASE("the same first stroke leads to different operations") {
  Workbench wb;
  SUBCASE("i + 6") {
    auto ed = with_i(wb);
    auto at = ed.model().focus();
    ed.feed(keys("i + 6"));
    CHECK(shape(ed.model(), at) == "BinaryOperation[+](VariableReference[i], IntegerLiteral[6])");
  }
  SUBCASE("i + +") {
    auto ed = with_i(wb);
    auto at = ed.model().focus();
    ed.key_event("i");
    CHECK(ed.key_event("+").kind == OutcomeKind::Provisional);
    CHECK(shape(ed.model(), at) == "BinaryOperation[+](VariableReference[i], Expression)");
    CHECK(ed.model().validate_structure().empty());
    auto second = ed.key_event("+");
    CHECK(second.kind == OutcomeKind::Replaced);
    CHECK(second.undone == "binary:+");
    CHECK(shape(ed.model(), at) == "UnaryOperation[post++](VariableReference[i])");
  }
  SUBCASE("i + =") {
    auto ed = with_i(wb);
    auto at = ed.model().focus();
    ed.feed(keys("i +"), false);
    auto outcome = ed.key_event("=");
    CHECK(outcome.kind == OutcomeKind::Replaced);
    CHECK(outcome.action == "binary:+=");
    CHECK(shape(ed.model(), at) == "BinaryOperation[+=](VariableReference[i], Expression)");
  }
}

TEST_CASE("bindings are independent of each other") {
  Registry registry;
  ActionTable actions;
  Keymap keymap;
  cpp::register_language(registry, actions, keymap);
  REQUIRE(keymap.unbind(ids::Expression, {"+", "="}));
  cpp::CppEditSupport edits;
  Workbench wb;
  auto seed = with_i(wb);
  auto doc = save(seed.model());
  auto model = load(doc, registry).model;
  model.move_focus(seed.model().focus());
  Editor ed(std::move(model), actions, keymap, edits);
  auto at = ed.model().focus();
  ed.key_event("i");
  CHECK(ed.key_event("+").kind == OutcomeKind::Provisional);
  CHECK(ed.key_event("=").kind == OutcomeKind::Ignored);
  ed.flush();
  CHECK(shape(ed.model(), at) == "BinaryOperation[+](VariableReference[i], Expression)");
}

TEST_CASE("one key at a time equals the whole sequence at once") {
  Workbench wb;
  for (const char* script : {"i + = 2 * 3", "i + + <enter>", "i < = 4 & & i > 1", "( i + 1 ) * 2", "i = i - - 2"}) {
    auto a = with_i(wb);
    auto b = with_i(wb);
    for (const auto& k : keys(script)) a.key_event(k);
    a.flush();
    b.feed_atomic(keys(script));
    CHECK_MESSAGE(shape(a.model()) == shape(b.model()), script);
  }
}

TEST_CASE("atomic and sequential feeding agree on random input") {
  Workbench wb;
  const std::vector<std::string> alphabet{"i", "x", "1", "2", "+", "-", "*", "=", "<", "&", "|", "!", "(", ")", ":",
                                          "a", "b", "s", "r", "e", "t", "u", "n", "<enter>", "<space>", "<up>",
                                          "<down>", "<left>", "<right>", "<escape>", "<backspace>", "<delete>"};
  std::mt19937 rng(5);
  auto prelude = sample_prelude();
  for (int round = 0; round < 300; ++round) {
    std::vector<std::string> script;
    const int n = 1 + static_cast<int>(rng() % 25);
    for (int k = 0; k < n; ++k) script.push_back(alphabet[rng() % alphabet.size()]);
    auto a = wb.editor();
    auto b = wb.editor();
    a.feed(prelude);
    b.feed(prelude);
    a.feed(script);
    b.feed_atomic(script);
    std::string joined;
    for (const auto& k : script) joined += k + " ";
    CHECK_MESSAGE(shape(a.model()) == shape(b.model()), joined);
  }
  auto full = sample_prelude();
  auto entry = sample_entry();
  full.insert(full.end(), entry.begin(), entry.end());
  auto a = wb.editor();
  auto b = wb.editor();
  a.feed(full);
  b.feed_atomic(full);
  CHECK(save(a.model()) == save(b.model()));
}

TEST_CASE("feed_atomic is all or nothing") {
  Workbench wb;
  auto ed = with_i(wb);
  auto before = save(ed.model());
  CHECK_THROWS_AS(ed.feed_atomic({"i", "+", "<bogus>"}), Error);
  CHECK(save(ed.model()) == before);
}

TEST_CASE("undo and redo") {
  Workbench wb;
  auto fresh = wb.editor();
  CHECK_FALSE(fresh.undo());
  CHECK_FALSE(fresh.redo());

  auto ed = with_i(wb);
  const auto start = save(ed.model());
  ed.feed(keys("i + = 2 * ( i + 3 )"));
  const auto done = save(ed.model());
  CHECK(done != start);
  std::size_t n = ed.undo_stack().size();
  CHECK(n > 0);
  for (std::size_t i = 0; i < n; ++i) CHECK(ed.undo());
  // Undo reaches back through the declaration entry too; replay forward.
  for (std::size_t i = 0; i < n; ++i) CHECK(ed.redo());
  CHECK(save(ed.model()) == done);
  while (ed.undo()) {
  }
  CHECK(save(ed.model()) == save(wb.new_model()));
  (void)start;
}

TEST_CASE("undo and redo as keystrokes") {
  Workbench wb;
  auto ed = with_i(wb);
  const auto start = save(ed.model());
  ed.feed(keys("i + 1"));
  const auto done = save(ed.model());
  ed.key_event("<undo>");
  CHECK(save(ed.model()) != done);
  ed.key_event("<redo>");
  CHECK(save(ed.model()) == done);
  (void)start;
}

TEST_CASE("provisional actions commit as one record") {
  Workbench wb;
  auto ed = with_i(wb);
  auto before = save(ed.model());
  ed.feed(keys("i"), false);
  ed.key_event("+");
  ed.key_event("+");
  ed.flush();
  auto after = save(ed.model());
  ed.undo();
  // The identifier is its own record; the increment sits on top of it.
  ed.undo();
  CHECK(save(ed.model()) == before);
  ed.redo();
  ed.redo();
  CHECK(save(ed.model()) == after);
}

TEST_CASE("edit sessions") {
  Workbench wb;
  SUBCASE("integer literal") {
    auto ed = with_i(wb);
    ed.feed(keys("4 2"));
    auto at = ed.model().focus();
    CHECK(shape(ed.model(), at) == "IntegerLiteral[42]");
    const auto& s = ed.enter_edit(at);
    CHECK(s.kind == EditorKind::IntegerEditable);
    CHECK(s.draft == "42");
    ed.set_draft("12x");
    CHECK(code_of([&] { ed.commit_edit(); }) == ErrorCode::InvalidDraft);
    ed.set_draft("7");
    ed.commit_edit();
    CHECK(shape(ed.model(), at) == "IntegerLiteral[7]");
  }
  SUBCASE("statement keywords") {
    auto ed = with_i(wb);
    auto at = ed.model().focus();
    const auto& s = ed.enter_edit(at);
    CHECK(s.kind == EditorKind::CompletionListEditable);
    ed.set_draft("for");
    ed.commit_edit();
    CHECK(shape(ed.model(), at) == "ForStatement(Statement, Expression, Expression, CompoundStatement)");
  }
  SUBCASE("bool keyword in an expression") {
    auto ed = with_i(wb);
    ed.feed(keys("i + 1"));
    auto right = ed.model().focus();
    ed.key_event("<escape>");
    ed.move_focus(right);
    ed.key_event("<delete>");
    ed.enter_edit(ed.model().focus());
    ed.set_draft("true");
    ed.commit_edit();
    CHECK(shape(ed.model(), right) == "BoolLiteral");
    CHECK(std::get<bool>(*ed.model().property(right, "value")));
  }
  SUBCASE("unknown keyword") {
    auto ed = with_i(wb);
    ed.enter_edit(ed.model().focus());
    ed.set_draft("qqq");
    CHECK(code_of([&] { ed.commit_edit(); }) == ErrorCode::UnknownKeyword);
  }
  SUBCASE("not editable") {
    auto ed = with_i(wb);
    CHECK(code_of([&] { ed.enter_edit(ed.model().focus().parent()); }) == ErrorCode::NotEditable);
    CHECK(code_of([&] { ed.commit_edit(); }) == ErrorCode::NoEditSession);
  }
  SUBCASE("keys go to the session while it is open") {
    auto ed = with_i(wb);
    ed.enter_edit(ed.model().focus());
    CHECK(ed.key_event("r").kind == OutcomeKind::EditDelegated);
    CHECK(ed.session()->draft == "r");
    ed.key_event("<escape>");
    CHECK_FALSE(ed.session());
  }
}

TEST_CASE("placeholders route keys to derived concepts") {
  Workbench wb;
  auto ed = with_i(wb);
  auto at = ed.model().focus();
  ed.feed(keys("1"), false);
  CHECK(shape(ed.model(), at) == "IntegerLiteral[1]");
  REQUIRE(ed.session());
  CHECK(ed.session()->kind == EditorKind::IntegerEditable);

  auto ed2 = with_i(wb);
  ed2.feed(keys("{"));
  CHECK(shape(ed2.model(), at) == "CompoundStatement");

  auto ed3 = with_i(wb);
  auto before = save(ed3.model());
  CHECK(ed3.key_event(")").kind == OutcomeKind::Ignored);
  CHECK(save(ed3.model()) == before);
}

TEST_CASE("deepest difference locates a change") {
  Workbench wb;
  auto m = Model::from_value(wb.registry(), fib_program());
  auto before = m.extract({});
  m.set_property(NodePath::parse("0.Body.0.Condition.Right"), "value", std::int64_t{2});
  auto diff = deepest_difference(before, m.extract({}));
  REQUIRE(diff);
  CHECK(*diff == NodePath::parse("0.Body.0.Condition.Right"));
  CHECK_FALSE(deepest_difference(before, before));
}
