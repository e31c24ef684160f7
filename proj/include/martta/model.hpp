#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "martta/path.hpp"
#include "martta/registry.hpp"
#include "martta/value.hpp"

namespace martta {

namespace core {
inline const ConceptId Root{"Concept"};
inline const ConceptId Program{"Program"};
inline const ConceptId Composite{"Composite"};
}  // namespace core

/// Detached copy of a subtree over the actual structure. Cross-references
/// are held as root-relative paths.
struct NodeValue {
  ConceptId concept_id;
  PropertyMap properties;
  std::map<std::string, NodeValue> named;
  std::vector<NodeValue> cardinal;
  std::optional<std::string> reroute;
  /// Entry-episode position tag; never persisted.
  bool tagged = false;

  bool operator==(const NodeValue&) const = default;
};

enum class Severity { StructuralError, SemanticError, Incomplete };

std::string_view severity_name(Severity severity) noexcept;

struct Diagnostic {
  NodePath node_path;
  Severity severity = Severity::StructuralError;
  std::string code;
  std::string message;
  std::vector<std::string> fixes;
};

/// Re-parent `source` (the replaced node itself or one of its descendants)
/// into `target` of the replacement node.
struct Adoption {
  NodePath source;
  ChildIndex target;
};
using AdoptionPlan = std::vector<Adoption>;

enum class RemoveMode { CollapseToPlaceholder, DeleteCardinal };

struct RemoveOutcome {
  RemoveMode mode;
  /// The substituted placeholder, or the parent for a deleted list entry.
  NodePath path;
};

enum class FocusMove { Parent, FirstChild, NextSibling, PrevSibling };

/// One program tree plus the focused node. Every mutating operation either
/// fails without effect or leaves the tree structurally valid.
class Model {
 public:
  using NodeId = std::uint64_t;

  /// Creates a model rooted at a Proper concept strongly derived from Program.
  static Model create(const Registry& registry, const ConceptId& root_concept);
  /// Builds a model from a detached tree. With `checked`, structural
  /// violations raise StructuralViolation naming the offending node path.
  static Model from_value(const Registry& registry, const NodeValue& root, bool checked = true);

  const Registry& registry() const noexcept { return *registry_; }

  bool exists(const NodePath& path) const;
  const ConceptId& concept_at(const NodePath& path) const;
  ConceptKind kind_at(const NodePath& path) const { return registry_->kind(concept_at(path)); }
  bool is_placeholder(const NodePath& path) const { return kind_at(path) == ConceptKind::Placeholder; }
  bool strong_kind_at(const NodePath& path, const ConceptId& base) const;
  bool kind_of_at(const NodePath& path, const ConceptId& base) const;

  std::optional<PropertyValue> property(const NodePath& path, const std::string& name) const;
  std::string text_property(const NodePath& path, const std::string& name) const;
  void set_property(const NodePath& path, const std::string& name, PropertyValue value);

  /// Occupied child indices: named slots in declaration order, then cardinal.
  std::vector<ChildIndex> children(const NodePath& path) const;
  std::size_t cardinal_count(const NodePath& path) const;
  bool has_child(const NodePath& parent, const ChildIndex& index) const;
  std::size_t node_count() const noexcept { return nodes_.size(); }
  /// Raw pre-order traversal of the subtree at `from`.
  std::vector<NodePath> preorder(const NodePath& from = {}) const;

  /// Slot spec governing the position of a non-root node.
  const SlotSpec& slot_of(const NodePath& path) const;
  /// Allowed set for a position; a rerouting parent defers to its own
  /// position so the surrogate meets the outer expectation.
  std::vector<ConceptId> effective_allowed(const NodePath& parent, const ChildIndex& index) const;
  /// Whether a node of `concept` may occupy the position. Placeholders are
  /// admitted only when they equal the position's common placeholder.
  bool admits(const NodePath& parent, const ChildIndex& index, const ConceptId& concept_id) const;

  std::size_t fill_placeholders(const NodePath& path);
  NodePath insert_child(const NodePath& parent, const ChildIndex& index, const ConceptId& concept_id,
                        const PropertyMap& properties = {});
  NodePath replace_node(const NodePath& path, const ConceptId& concept_id, const AdoptionPlan& plan = {},
                        const PropertyMap& properties = {});
  RemoveOutcome remove_node(const NodePath& path, RemoveMode mode);
  /// Replaces the subtree at `path` with a copy of `value`, checked.
  NodePath graft(const NodePath& path, const NodeValue& value);
  /// Inserts a copy of `value` as a new child, checked.
  NodePath insert_value(const NodePath& parent, const ChildIndex& index, const NodeValue& value);

  /// Normal structure: follows reroutes from the child transitively.
  NodePath resolve_child(const NodePath& parent, const ChildIndex& index) const;
  /// Actual structure: the stored child.
  NodePath raw_child(const NodePath& parent, const ChildIndex& index) const;
  /// Follows reroutes starting at the node itself.
  NodePath resolve(const NodePath& path) const;
  bool reroutes(const NodePath& path) const;
  /// Children as seen through the normal structure.
  std::vector<NodePath> normal_children(const NodePath& path) const;
  /// Nearest ancestor that is not hidden by rerouting; nullopt for the root.
  std::optional<NodePath> normal_parent(const NodePath& path) const;

  std::vector<Diagnostic> validate_structure() const;

  const NodePath focus() const;
  NodePath move_focus(FocusMove move);
  NodePath move_focus(const NodePath& target);

  bool tagged(const NodePath& path) const;
  void set_tagged(const NodePath& path, bool on);
  void clear_tags();
  std::vector<NodePath> tagged_paths() const;

  NodeValue extract(const NodePath& path) const;
  /// Unchecked subtree replacement used to apply recorded deltas.
  void implant(const NodePath& path, const NodeValue& value);

 private:
  struct Ref {
    NodeId target = 0;
    NodePath original;
  };
  using Stored = std::variant<std::string, std::int64_t, bool, Ref>;

  struct Node {
    NodeId id = 0;
    NodeId parent = 0;
    ConceptId concept_id;
    std::map<std::string, Stored> properties;
    std::vector<NodeId> cardinal;
    std::map<std::string, NodeId> named;
    std::optional<std::string> reroute;
    bool tagged = false;
  };

  explicit Model(const Registry& registry) : registry_(&registry) {}

  NodeId id_at(const NodePath& path) const;
  std::optional<NodeId> find(const NodePath& path) const;
  NodePath path_of(NodeId id) const;
  ChildIndex index_in_parent(NodeId id) const;
  const Node& node(NodeId id) const { return nodes_.at(id); }
  Node& node(NodeId id) { return nodes_.at(id); }
  std::vector<ChildIndex> child_indices(const Node& n) const;
  std::optional<NodeId> child_id(const Node& n, const ChildIndex& index) const;
  std::vector<ConceptId> allowed_for(NodeId parent, const ChildIndex& index) const;
  bool admits_concept(const std::vector<ConceptId>& allowed, const ConceptId& concept_id) const;
  void check_position(NodeId parent, const ChildIndex& index, const ConceptId& concept_id) const;

  NodeId new_node(const ConceptId& concept_id, NodeId parent, const PropertyMap& properties);
  void attach(NodeId parent, const ChildIndex& index, NodeId child, bool insert);
  void detach(NodeId child);
  void erase_subtree(NodeId id);
  std::size_t fill(NodeId id);
  NodeId build(const NodeValue& value, NodeId parent, std::vector<std::pair<NodeId, std::string>>& pending_refs);
  void resolve_refs(const std::vector<std::pair<NodeId, std::string>>& pending_refs);
  void rebind_refs(const std::vector<std::tuple<NodeId, std::string, NodePath>>& refs);
  NodeValue extract_node(NodeId id) const;
  PropertyValue to_public(const Stored& stored) const;
  Stored to_stored(const PropertyValue& value) const;
  void validate_node(NodeId id, std::vector<Diagnostic>& out) const;
  void repair_focus(NodeId fallback);

  const Registry* registry_;
  std::unordered_map<NodeId, Node> nodes_;
  NodeId root_ = 0;
  NodeId next_id_ = 1;
  NodeId focus_ = 0;
};

}  // namespace martta
