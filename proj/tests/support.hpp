#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "martta/error.hpp"
#include "martta/lang.hpp"
#include "martta/workbench.hpp"

namespace testing {

using namespace martta;

/// Splits on spaces; "_" stands for a literal space token.
std::vector<std::string> keys(const std::string& text);

/// Compact form of the normal structure: Concept[label](children...).
/// Tagged nodes are wrapped in <...>.
std::string shape(const Model& m, const NodePath& raw = {});

// NodeValue construction
NodeValue node(ConceptId concept_id, PropertyMap properties = {}, std::map<std::string, NodeValue> named = {},
               std::vector<NodeValue> cardinal = {});
NodeValue type_ref(const std::string& name);
NodeValue ref_to(const std::string& path);
NodeValue integer(std::int64_t v);
NodeValue binary(const std::string& op, NodeValue l, NodeValue r);
NodeValue call(NodeValue callee, std::vector<NodeValue> args);
NodeValue ret(NodeValue v);
NodeValue block(std::vector<NodeValue> statements);
NodeValue declare(const std::string& name, const std::string& type, std::optional<NodeValue> init = std::nullopt);

/// uint fib(uint n) from the invocation-expansion listing, optionally with
/// an `int main()` that returns fib(10) - 55.
NodeValue fib_program(bool with_main = false);
/// Token form of the fib listing.
inline const char* kFibListing = "uint fib(uint n) { if (n <= 1) return n; return fib(n-1)+fib(n-2); }";
/// C-like tokens: identifiers, numbers, and punctuation by longest match.
std::vector<std::string> c_tokens(std::string_view text);

/// Keys declaring `int abs(int x) { return x; }` and `void run() { int i; }`,
/// leaving the focus on the empty statement after `int i;`.
std::vector<std::string> sample_prelude();
/// The entry sequence itself, one token per keystroke.
std::vector<std::string> sample_entry();

/// Test-only concepts: SwapStatement (Composite, A and B), DeferA/DeferB
/// (defer while the other exists), Spinner (re-creates itself), Breaker
/// (lowers to an invalid tree) and Opaque (no web view).
void register_fixture_concepts(Registry& registry);
/// The golden lowering of SwapStatement(x, y) at `at` for declarations at
/// the given paths.
NodeValue swap_lowered(const std::string& at, const std::string& a, const std::string& b);

}  // namespace testing
