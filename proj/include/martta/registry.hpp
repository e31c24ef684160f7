#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "martta/path.hpp"
#include "martta/value.hpp"

namespace martta {

class Model;

enum class ConceptKind { Proper, Placeholder, Notional };

std::string_view kind_name(ConceptKind kind) noexcept;

/// Allowed occupants of one child slot. A slot without a name is the
/// descriptor's cardinal list.
struct SlotSpec {
  std::optional<std::string> name;
  std::vector<ConceptId> allowed;
  bool required = true;
  std::size_t cardinal_min = 0;

  bool is_cardinal() const noexcept { return !name.has_value(); }

  static SlotSpec named_slot(std::string name, std::vector<ConceptId> allowed, bool required = true) {
    return SlotSpec{std::move(name), std::move(allowed), required, 0};
  }
  static SlotSpec cardinal_list(std::vector<ConceptId> allowed, std::size_t minimum = 0) {
    return SlotSpec{std::nullopt, std::move(allowed), minimum > 0, minimum};
  }
};

struct KeyBinding {
  std::vector<std::string> keys;
  std::string action_id;
};

/// Outcome of asking a Composite node to lower itself.
enum class TransformStep { Transformed, Deferred };
using TransformHook = std::function<TransformStep(Model&, const NodePath&)>;

struct ConceptDescriptor {
  ConceptId id;
  ConceptKind kind = ConceptKind::Proper;
  std::optional<ConceptId> superclass;
  std::vector<ConceptId> weak_parents;
  std::vector<SlotSpec> child_slots;
  /// Words this concept registers with placeholders it may refine.
  std::vector<std::string> keywords;
  std::vector<KeyBinding> action_bindings;
  PropertyMap default_properties;
  /// Named slot that normal-structure dereference is redirected to.
  std::optional<std::string> reroute_slot;
  TransformHook transform;

  const SlotSpec* named_slot(std::string_view name) const;
  const SlotSpec* cardinal_slot() const;
};

/// The abstract language: concept descriptors plus every inheritance,
/// acceptance and placeholder-typing query. Registration is single-threaded;
/// once sealed the registry is immutable and may be shared freely.
class Registry {
 public:
  ConceptId register_concept(ConceptDescriptor descriptor);
  /// Validates slot references and placeholder fillability, then freezes.
  void seal();
  bool sealed() const noexcept { return sealed_; }

  bool contains(const ConceptId& id) const noexcept { return index_.contains(id); }
  const ConceptDescriptor& descriptor(const ConceptId& id) const;
  ConceptKind kind(const ConceptId& id) const { return descriptor(id).kind; }
  bool instantiable(const ConceptId& id) const { return kind(id) != ConceptKind::Notional; }
  /// Concepts in registration order.
  const std::vector<ConceptDescriptor>& concepts() const noexcept { return concepts_; }

  /// b lies on a's superclass chain (inclusive).
  bool is_strong_kind_of(const ConceptId& a, const ConceptId& b) const;
  /// b is reachable from a over superclass and weak-parent edges (inclusive).
  bool is_kind_of(const ConceptId& a, const ConceptId& b) const;
  /// Some member of `allowed` lies on the candidate's strong chain.
  bool accepts_child(const std::vector<ConceptId>& allowed, const ConceptId& candidate) const;
  /// Deepest concept on every member's strong chain.
  ConceptId common_placeholder(const std::vector<ConceptId>& allowed) const;
  /// `base` and every strong descendant, depth-first in registration order.
  std::vector<ConceptId> derived_concepts(const ConceptId& base) const;
  /// Strong chain from `id` up to the root, inclusive.
  const std::vector<ConceptId>& strong_chain(const ConceptId& id) const;
  /// Weak closure in breadth-first order, starting with the strong chain.
  const std::vector<ConceptId>& lineage(const ConceptId& id) const;
  std::size_t depth(const ConceptId& id) const { return strong_chain(id).size() - 1; }

  /// One line per concept, in registration order.
  std::string report() const;
  /// Content hash (FNV-1a, hex) of report().
  std::string fingerprint() const;

 private:
  struct Closure {
    std::vector<ConceptId> chain;
    std::vector<ConceptId> lineage;
    std::vector<std::size_t> strong_children;
  };

  std::size_t require(const ConceptId& id) const;
  bool on_lineage(std::size_t index, const ConceptId& target) const;

  std::vector<ConceptDescriptor> concepts_;
  std::vector<Closure> closures_;
  std::unordered_map<ConceptId, std::size_t> index_;
  bool sealed_ = false;
};

}  // namespace martta
