#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "martta/model.hpp"

namespace martta {

enum class IdentifierStyle { CamelCase, Underscore };

std::string_view identifier_style_name(IdentifierStyle style) noexcept;
/// "camel" or "underscore"; throws InvalidDescriptor otherwise.
IdentifierStyle parse_identifier_style(std::string_view name);
std::string style_identifier(std::string_view name, IdentifierStyle style);

struct Stylist {
  IdentifierStyle identifier_style = IdentifierStyle::CamelCase;
  bool always_parenthesize_operations = false;
  /// Role (keyword, identifier, type, literal, operator, ...) to CSS class.
  std::map<std::string, std::string> palette;
  std::string placeholder_marker = "\xE2\x80\xA6";

  std::string css_class(const std::string& role) const;
};

using FoldState = std::set<NodePath>;

struct RenderedView {
  std::string html;
  std::string focus_anchor;
  std::set<std::string> foldable_ids;
  /// Element id to diagnostic classes.
  std::map<std::string, std::vector<std::string>> diagnostics_markup;
};

std::string element_id(const NodePath& path);
/// Has a Body slot or is a CompoundStatement.
bool is_foldable(const Model& model, const NodePath& path);
/// Throws NotFoldable.
FoldState toggle_fold(const Model& model, const FoldState& state, const NodePath& path);

RenderedView render(const Model& model, const Stylist& stylist, const FoldState& folds = {});

/// The stylesheet every rendered document embeds.
const std::string& stylesheet();

}  // namespace martta
