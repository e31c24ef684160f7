#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace martta {

/// Stable, human-readable concept name such as "MemberVariable".
class ConceptId {
 public:
  ConceptId() = default;
  explicit ConceptId(std::string name) : name_(std::move(name)) {}
  ConceptId(const char* name) : name_(name) {}  // NOLINT: literal ids are the common case

  const std::string& str() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  friend auto operator<=>(const ConceptId&, const ConceptId&) = default;
  friend bool operator==(const ConceptId&, const ConceptId&) = default;

 private:
  std::string name_;
};

/// A child's position under its parent: either a place in the ordered
/// (cardinal) list or a symbolic named slot.
class ChildIndex {
 public:
  static ChildIndex cardinal(std::size_t position) { return ChildIndex(position); }
  static ChildIndex named(std::string slot) { return ChildIndex(std::move(slot)); }

  bool is_cardinal() const noexcept { return std::holds_alternative<std::size_t>(value_); }
  bool is_named() const noexcept { return !is_cardinal(); }
  std::size_t position() const { return std::get<std::size_t>(value_); }
  const std::string& slot() const { return std::get<std::string>(value_); }

  std::string to_string() const;
  /// Digits parse as cardinal positions, anything else as a slot symbol.
  static ChildIndex parse(std::string_view text);

  friend auto operator<=>(const ChildIndex&, const ChildIndex&) = default;
  friend bool operator==(const ChildIndex&, const ChildIndex&) = default;

 private:
  explicit ChildIndex(std::size_t p) : value_(p) {}
  explicit ChildIndex(std::string s) : value_(std::move(s)) {}

  std::variant<std::size_t, std::string> value_;
};

/// Root-relative sequence of child indices over the actual (stored)
/// structure. The empty path is the root.
class NodePath {
 public:
  NodePath() = default;
  explicit NodePath(std::vector<ChildIndex> steps) : steps_(std::move(steps)) {}

  bool is_root() const noexcept { return steps_.empty(); }
  std::size_t depth() const noexcept { return steps_.size(); }
  const std::vector<ChildIndex>& steps() const noexcept { return steps_; }
  const ChildIndex& back() const { return steps_.back(); }

  NodePath parent() const;
  NodePath child(ChildIndex index) const;
  NodePath child(std::size_t position) const { return child(ChildIndex::cardinal(position)); }
  NodePath child(std::string slot) const { return child(ChildIndex::named(std::move(slot))); }
  bool starts_with(const NodePath& prefix) const;

  /// Dot-joined indices, e.g. "Body.2.Left"; the root is "".
  std::string to_string() const;
  static NodePath parse(std::string_view text);

  friend auto operator<=>(const NodePath&, const NodePath&) = default;
  friend bool operator==(const NodePath&, const NodePath&) = default;

 private:
  std::vector<ChildIndex> steps_;
};

}  // namespace martta

template <>
struct std::hash<martta::ConceptId> {
  std::size_t operator()(const martta::ConceptId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
