#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "martta/input.hpp"
#include "martta/model.hpp"
#include "martta/registry.hpp"

namespace martta::cpp {

namespace ids {
inline const ConceptId Concept{"Concept"};
inline const ConceptId Typed{"Typed"};
inline const ConceptId TypedOwner{"TypedOwner"};
inline const ConceptId WebViewable{"WebViewable"};
inline const ConceptId Editable{"Editable"};
inline const ConceptId Composite{"Composite"};
inline const ConceptId Program{"Program"};
inline const ConceptId Declaration{"Declaration"};
inline const ConceptId Namespace{"Namespace"};
inline const ConceptId Class{"Class"};
inline const ConceptId Member{"Member"};
inline const ConceptId Enumeration{"Enumeration"};
inline const ConceptId Enumerator{"Enumerator"};
inline const ConceptId MemberEnumeration{"MemberEnumeration"};
inline const ConceptId Variable{"Variable"};
inline const ConceptId MemberVariable{"MemberVariable"};
inline const ConceptId Function{"Function"};
inline const ConceptId Argument{"Argument"};
inline const ConceptId TypeReference{"TypeReference"};
inline const ConceptId Statement{"Statement"};
inline const ConceptId Expression{"Expression"};
inline const ConceptId CompoundStatement{"CompoundStatement"};
inline const ConceptId ForStatement{"ForStatement"};
inline const ConceptId IfStatement{"IfStatement"};
inline const ConceptId ReturnStatement{"ReturnStatement"};
inline const ConceptId VariableDeclarationStatement{"VariableDeclarationStatement"};
inline const ConceptId Literal{"Literal"};
inline const ConceptId IntegerLiteral{"IntegerLiteral"};
inline const ConceptId BoolLiteral{"BoolLiteral"};
inline const ConceptId StringLiteral{"StringLiteral"};
inline const ConceptId Operation{"Operation"};
inline const ConceptId BinaryOperation{"BinaryOperation"};
inline const ConceptId UnaryOperation{"UnaryOperation"};
inline const ConceptId Invocation{"Invocation"};
inline const ConceptId VariableReference{"VariableReference"};
inline const ConceptId FragmentParameter{"FragmentParameter"};
inline const ConceptId CppProgram{"CppProgram"};
}  // namespace ids

// ---------------------------------------------------------------------------
// catalog

/// Registers every catalog concept; leaves the registry unsealed so callers
/// can add concepts of their own before sealing.
void register_catalog(Registry& registry);
/// Installs the language's actions and key bindings. Needs a sealed registry.
void install_keymap(const Registry& registry, ActionTable& actions, Keymap& keymap);
/// Catalog, seal, keymap.
void register_language(Registry& registry, ActionTable& actions, Keymap& keymap);

// ---------------------------------------------------------------------------
// operators

enum class Associativity { Left, Right };
enum class Arity { Binary, UnaryPrefix, UnaryPostfix };

struct OperatorInfo {
  std::string symbol;
  int precedence = 0;
  Associativity associativity = Associativity::Left;
  Arity arity = Arity::Binary;
};

/// Precedence of atoms (literals, references, invocations).
inline constexpr int kAtomPrecedence = 100;

const std::vector<OperatorInfo>& operator_table();
const OperatorInfo& find_operator(std::string_view symbol, Arity arity);
/// Operator of the operation node at `path`, or nullopt for non-operations.
std::optional<OperatorInfo> operator_at(const Model& model, const NodePath& path);
/// Display precedence of the expression at `path`.
int precedence_at(const Model& model, const NodePath& path);
/// Whether the child needs parentheses to keep its place under its parent.
bool needs_parentheses(const Model& model, const NodePath& child);

/// Splices a new operation at the focused expression so the tree matches a
/// precedence-climbing parse of the entered tokens. Returns the new focus.
NodePath insert_operation(Model& model, const NodePath& focus, const OperatorInfo& op);
void tag_position(Model& model, const NodePath& path, bool on);
/// Wraps a function-typed expression in an Invocation with one placeholder
/// per parameter. Returns the first argument, or the invocation.
NodePath wrap_invocation(Model& model, const NodePath& path);

// ---------------------------------------------------------------------------
// types and semantics

struct ValueType {
  enum class Kind { Unknown, Int, UInt, Bool, String, Void, FunctionOf, Named };
  Kind kind = Kind::Unknown;
  std::vector<ValueType> params;
  /// Single element holding the result when kind is FunctionOf.
  std::vector<ValueType> result;
  std::string name;

  static ValueType of(Kind kind) { return ValueType{kind, {}, {}, {}}; }
  static ValueType function(std::vector<ValueType> params, ValueType result);
  static ValueType named(std::string name) { return ValueType{Kind::Named, {}, {}, std::move(name)}; }

  bool numeric() const noexcept { return kind == Kind::Int || kind == Kind::UInt; }
  bool known() const noexcept { return kind != Kind::Unknown; }
  std::string to_string() const;
  bool operator==(const ValueType&) const = default;
};

/// Type named by a TypeReference's text within the model.
ValueType type_from_name(const Model& model, std::string_view name);
ValueType apparent_type(const Model& model, const NodePath& path);
/// Declared type of a Variable, Argument or MemberVariable, or the function
/// type of a Function.
ValueType declared_type(const Model& model, const NodePath& declaration);

std::vector<Diagnostic> check_semantics(const Model& model);
/// Stable handle for a diagnostic: "<code>@<path>".
std::string diagnostic_id(const Diagnostic& diagnostic);
/// Applies a fix as one undoable action.
std::optional<ActionRecord> apply_fix(Editor& editor, const Diagnostic& diagnostic, const std::string& fix_id);
/// The fix on its own, for callers that manage undo themselves.
void apply_fix_to(Model& model, const Diagnostic& diagnostic, const std::string& fix_id);

// ---------------------------------------------------------------------------
// scope

struct Visible {
  std::string name;
  NodePath declaration;
};

/// Value declarations visible at `path`, nearest first.
std::vector<Visible> visible_values(const Model& model, const NodePath& path);
std::vector<std::string> type_names(const Model& model);
std::string declaration_name(const Model& model, const NodePath& path);
bool is_identifier(std::string_view text);

/// Edit sessions for the catalog: literals, names, types, identifiers and
/// declaration entry.
class CppEditSupport : public EditSupport {
 public:
  std::optional<EditSession> open(const Model& model, const NodePath& path) const override;
  std::vector<std::string> candidates(const Model& model, const EditSession& session) const override;
  bool is_draft_char(const EditSession& session, std::string_view token) const override;
  void commit(ActionContext& context, const EditSession& session) const override;
};

}  // namespace martta::cpp
