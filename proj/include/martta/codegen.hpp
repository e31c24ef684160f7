#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "martta/model.hpp"

namespace martta {

struct SourceSpan {
  NodePath path;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct EmittedSource {
  std::string text;
  /// One span per emitting node, in emission order.
  std::vector<SourceSpan> source_map;

  const SourceSpan* span_of(const NodePath& path) const;
  std::string_view text_of(const NodePath& path) const;
};

/// C++ text for the normal structure. Errors: UntransformedComposite when a
/// Composite node remains; ModelIncomplete for placeholders or semantic errors.
EmittedSource emit_source(const Model& model);
/// Text of one expression with minimal parentheses; no completeness checks.
std::string emit_expression(const Model& model, const NodePath& path);
/// Catalog concepts that never produce text of their own.
const std::vector<ConceptId>& non_emitting_concepts();
bool has_emitter(const ConceptId& concept_id);

struct RunResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

struct ExternalOptions {
  std::chrono::milliseconds timeout{std::chrono::seconds(60)};
};

/// Commands from a template: whitespace-separated tokens, "&&" between
/// commands, "{in}" and "{out}" substituted. Throws CommandUnavailable.
std::vector<std::vector<std::string>> parse_command_template(std::string_view command_template);

/// Writes the source to a temporary file and runs the template's commands
/// in order without a shell. Errors: CommandUnavailable, NonZeroExit.
RunResult execute_external(const EmittedSource& source, std::string_view command_template, ExternalOptions options = {});

}  // namespace martta
