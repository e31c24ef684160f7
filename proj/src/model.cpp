#include "martta/model.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "martta/error.hpp"

namespace martta {

std::string_view severity_name(Severity severity) noexcept {
  switch (severity) {
    case Severity::StructuralError:
      return "StructuralError";
    case Severity::SemanticError:
      return "SemanticError";
    case Severity::Incomplete:
      return "Incomplete";
  }
  return "?";
}

namespace {

// Runs `body` against the model; on any exception the model is restored.
template <typename Body>
auto transact(Model& model, Body&& body) -> decltype(body()) {
  Model backup = model;
  try {
    return body();
  } catch (...) {
    model = std::move(backup);
    throw;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// construction

Model Model::create(const Registry& registry, const ConceptId& root_concept) {
  if (!registry.sealed()) fail(ErrorCode::RegistryNotSealed, "seal the registry before creating models");
  if (!registry.contains(root_concept)) fail(ErrorCode::UnknownConcept, root_concept.str());
  if (registry.kind(root_concept) != ConceptKind::Proper || !registry.contains(core::Program) ||
      !registry.is_strong_kind_of(root_concept, core::Program))
    fail(ErrorCode::NotAProgramConcept, root_concept.str());
  Model model(registry);
  model.root_ = model.new_node(root_concept, 0, {});
  model.focus_ = model.root_;
  model.fill(model.root_);
  return model;
}

Model Model::from_value(const Registry& registry, const NodeValue& root, bool checked) {
  if (!registry.sealed()) fail(ErrorCode::RegistryNotSealed, "seal the registry before loading models");
  Model model(registry);
  std::vector<std::pair<NodeId, std::string>> pending;
  model.root_ = model.build(root, 0, pending);
  model.resolve_refs(pending);
  model.focus_ = model.root_;
  if (checked) {
    auto problems = model.validate_structure();
    if (!problems.empty()) {
      const auto& first = problems.front();
      fail(ErrorCode::StructuralViolation, "at '" + first.node_path.to_string() + "': " + first.message);
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// addressing

std::optional<Model::NodeId> Model::find(const NodePath& path) const {
  NodeId current = root_;
  for (const auto& step : path.steps()) {
    auto next = child_id(node(current), step);
    if (!next) return std::nullopt;
    current = *next;
  }
  return current;
}

Model::NodeId Model::id_at(const NodePath& path) const {
  auto id = find(path);
  if (!id) fail(ErrorCode::UnknownNode, "no node at '" + path.to_string() + "'");
  return *id;
}

bool Model::exists(const NodePath& path) const { return find(path).has_value(); }

ChildIndex Model::index_in_parent(NodeId id) const {
  const Node& n = node(id);
  const Node& p = node(n.parent);
  for (const auto& [slot, child] : p.named)
    if (child == id) return ChildIndex::named(slot);
  for (std::size_t i = 0; i < p.cardinal.size(); ++i)
    if (p.cardinal[i] == id) return ChildIndex::cardinal(i);
  fail(ErrorCode::UnknownNode, "orphaned node");
}

NodePath Model::path_of(NodeId id) const {
  std::vector<ChildIndex> steps;
  while (id != root_) {
    steps.push_back(index_in_parent(id));
    id = node(id).parent;
  }
  std::reverse(steps.begin(), steps.end());
  return NodePath(std::move(steps));
}

std::optional<Model::NodeId> Model::child_id(const Node& n, const ChildIndex& index) const {
  if (index.is_named()) {
    auto it = n.named.find(index.slot());
    if (it == n.named.end()) return std::nullopt;
    return it->second;
  }
  if (index.position() >= n.cardinal.size()) return std::nullopt;
  return n.cardinal[index.position()];
}

std::vector<ChildIndex> Model::child_indices(const Node& n) const {
  std::vector<ChildIndex> out;
  std::set<std::string> listed;
  if (registry_->contains(n.concept_id)) {
    for (const auto& slot : registry_->descriptor(n.concept_id).child_slots) {
      if (slot.name && n.named.contains(*slot.name)) {
        out.push_back(ChildIndex::named(*slot.name));
        listed.insert(*slot.name);
      }
    }
  }
  for (const auto& [slot, child] : n.named)
    if (!listed.contains(slot)) out.push_back(ChildIndex::named(slot));
  for (std::size_t i = 0; i < n.cardinal.size(); ++i) out.push_back(ChildIndex::cardinal(i));
  return out;
}

const ConceptId& Model::concept_at(const NodePath& path) const { return node(id_at(path)).concept_id; }

bool Model::strong_kind_at(const NodePath& path, const ConceptId& base) const {
  return registry_->is_strong_kind_of(concept_at(path), base);
}

bool Model::kind_of_at(const NodePath& path, const ConceptId& base) const {
  return registry_->is_kind_of(concept_at(path), base);
}

std::vector<ChildIndex> Model::children(const NodePath& path) const { return child_indices(node(id_at(path))); }

std::size_t Model::cardinal_count(const NodePath& path) const { return node(id_at(path)).cardinal.size(); }

bool Model::has_child(const NodePath& parent, const ChildIndex& index) const {
  auto id = find(parent);
  return id && child_id(node(*id), index).has_value();
}

std::vector<NodePath> Model::preorder(const NodePath& from) const {
  std::vector<NodePath> out;
  std::vector<NodePath> stack{from};
  id_at(from);
  while (!stack.empty()) {
    auto current = std::move(stack.back());
    stack.pop_back();
    auto indices = child_indices(node(id_at(current)));
    for (auto it = indices.rbegin(); it != indices.rend(); ++it) stack.push_back(current.child(*it));
    out.push_back(std::move(current));
  }
  return out;
}

// ---------------------------------------------------------------------------
// properties

PropertyValue Model::to_public(const Stored& stored) const {
  if (const auto* ref = std::get_if<Ref>(&stored)) {
    if (ref->target && nodes_.contains(ref->target)) return path_of(ref->target);
    // The old path may name some other node by now; the root never is a
    // declaration, so the reference stays dangling.
    return NodePath{};
  }
  if (const auto* s = std::get_if<std::string>(&stored)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&stored)) return *i;
  return std::get<bool>(stored);
}

Model::Stored Model::to_stored(const PropertyValue& value) const {
  if (const auto* path = std::get_if<NodePath>(&value)) {
    auto target = find(*path);
    return Ref{target.value_or(0), *path};
  }
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
  return std::get<bool>(value);
}

std::optional<PropertyValue> Model::property(const NodePath& path, const std::string& name) const {
  const Node& n = node(id_at(path));
  auto it = n.properties.find(name);
  if (it == n.properties.end()) return std::nullopt;
  return to_public(it->second);
}

std::string Model::text_property(const NodePath& path, const std::string& name) const {
  auto value = property(path, name);
  if (!value) return {};
  if (const auto* s = std::get_if<std::string>(&*value)) return *s;
  return {};
}

void Model::set_property(const NodePath& path, const std::string& name, PropertyValue value) {
  Node& n = node(id_at(path));
  n.properties[name] = to_stored(value);
}

// ---------------------------------------------------------------------------
// slots and acceptance

const SlotSpec& Model::slot_of(const NodePath& path) const {
  if (path.is_root()) fail(ErrorCode::NoSuchSlot, "the root occupies no slot");
  const auto& desc = registry_->descriptor(concept_at(path.parent()));
  const SlotSpec* slot = path.back().is_named() ? desc.named_slot(path.back().slot()) : desc.cardinal_slot();
  if (!slot) fail(ErrorCode::NoSuchSlot, path.to_string());
  return *slot;
}

std::vector<ConceptId> Model::allowed_for(NodeId parent, const ChildIndex& index) const {
  const Node& p = node(parent);
  const auto& desc = registry_->descriptor(p.concept_id);
  const SlotSpec* slot = index.is_named() ? desc.named_slot(index.slot()) : desc.cardinal_slot();
  if (!slot) fail(ErrorCode::NoSuchSlot, p.concept_id.str() + " has no slot " + index.to_string());
  if (index.is_named() && p.reroute && *p.reroute == index.slot() && parent != root_)
    return allowed_for(p.parent, index_in_parent(parent));
  return slot->allowed;
}

std::vector<ConceptId> Model::effective_allowed(const NodePath& parent, const ChildIndex& index) const {
  return allowed_for(id_at(parent), index);
}

bool Model::admits_concept(const std::vector<ConceptId>& allowed, const ConceptId& concept_id) const {
  const auto& desc = registry_->descriptor(concept_id);
  if (desc.kind == ConceptKind::Notional) return false;
  if (desc.reroute_slot) {
    // The surrogate child will be filled with the position's own placeholder.
    auto filler = registry_->common_placeholder(allowed);
    auto filler_kind = registry_->kind(filler);
    return filler_kind == ConceptKind::Placeholder ||
           (filler_kind == ConceptKind::Proper && registry_->accepts_child(allowed, filler));
  }
  if (desc.kind == ConceptKind::Placeholder) return concept_id == registry_->common_placeholder(allowed);
  return registry_->accepts_child(allowed, concept_id);
}

bool Model::admits(const NodePath& parent, const ChildIndex& index, const ConceptId& concept_id) const {
  if (!registry_->contains(concept_id)) return false;
  auto id = find(parent);
  if (!id) return false;
  const auto& desc = registry_->descriptor(node(*id).concept_id);
  const SlotSpec* slot = index.is_named() ? desc.named_slot(index.slot()) : desc.cardinal_slot();
  if (!slot) return false;
  return admits_concept(allowed_for(*id, index), concept_id);
}

void Model::check_position(NodeId parent, const ChildIndex& index, const ConceptId& concept_id) const {
  if (!registry_->contains(concept_id)) fail(ErrorCode::UnknownConcept, concept_id.str());
  if (!registry_->instantiable(concept_id)) fail(ErrorCode::NotInstantiable, concept_id.str() + " is notional");
  auto allowed = allowed_for(parent, index);
  if (!admits_concept(allowed, concept_id))
    fail(ErrorCode::SlotRejectsConcept,
         node(parent).concept_id.str() + "." + index.to_string() + " rejects " + concept_id.str());
}

// ---------------------------------------------------------------------------
// raw mutation helpers

Model::NodeId Model::new_node(const ConceptId& concept_id, NodeId parent, const PropertyMap& properties) {
  const auto& desc = registry_->descriptor(concept_id);
  Node n;
  n.id = next_id_++;
  n.parent = parent;
  n.concept_id = concept_id;
  for (const auto& [name, value] : desc.default_properties) n.properties[name] = to_stored(value);
  for (const auto& [name, value] : properties) n.properties[name] = to_stored(value);
  n.reroute = desc.reroute_slot;
  auto id = n.id;
  nodes_.emplace(id, std::move(n));
  return id;
}

void Model::attach(NodeId parent, const ChildIndex& index, NodeId child, bool insert) {
  Node& p = node(parent);
  if (index.is_named()) {
    p.named[index.slot()] = child;
  } else if (insert) {
    p.cardinal.insert(p.cardinal.begin() + static_cast<std::ptrdiff_t>(index.position()), child);
  } else {
    p.cardinal[index.position()] = child;
  }
  node(child).parent = parent;
}

void Model::detach(NodeId child) {
  Node& c = node(child);
  Node& p = node(c.parent);
  for (auto it = p.named.begin(); it != p.named.end(); ++it) {
    if (it->second == child) {
      p.named.erase(it);
      c.parent = 0;
      return;
    }
  }
  p.cardinal.erase(std::remove(p.cardinal.begin(), p.cardinal.end(), child), p.cardinal.end());
  c.parent = 0;
}

void Model::erase_subtree(NodeId id) {
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    auto current = stack.back();
    stack.pop_back();
    const Node& n = node(current);
    for (const auto& [slot, child] : n.named) stack.push_back(child);
    for (auto child : n.cardinal) stack.push_back(child);
    nodes_.erase(current);
  }
}

std::size_t Model::fill(NodeId id) {
  std::size_t inserted = 0;
  const auto& desc = registry_->descriptor(node(id).concept_id);
  for (const auto& slot : desc.child_slots) {
    if (slot.is_cardinal()) {
      while (node(id).cardinal.size() < slot.cardinal_min) {
        auto position = ChildIndex::cardinal(node(id).cardinal.size());
        auto filler = registry_->common_placeholder(allowed_for(id, position));
        if (!registry_->instantiable(filler))
          fail(ErrorCode::WouldViolateStructure, "cannot fill " + desc.id.str() + " list with " + filler.str());
        auto child = new_node(filler, id, {});
        attach(id, position, child, true);
        ++inserted;
      }
    } else if (slot.required && !node(id).named.contains(*slot.name)) {
      auto index = ChildIndex::named(*slot.name);
      auto filler = registry_->common_placeholder(allowed_for(id, index));
      if (!registry_->instantiable(filler))
        fail(ErrorCode::WouldViolateStructure, "cannot fill " + desc.id.str() + "." + *slot.name + " with " + filler.str());
      auto child = new_node(filler, id, {});
      attach(id, index, child, false);
      ++inserted;
    }
  }
  std::vector<NodeId> kids;
  for (const auto& [slot, child] : node(id).named) kids.push_back(child);
  for (auto child : node(id).cardinal) kids.push_back(child);
  for (auto child : kids) inserted += fill(child);
  return inserted;
}

Model::NodeId Model::build(const NodeValue& value, NodeId parent,
                           std::vector<std::pair<NodeId, std::string>>& pending_refs) {
  if (!registry_->contains(value.concept_id))
    fail(ErrorCode::UnknownConceptInDocument, "concept_id '" + value.concept_id.str() + "' is not registered");
  Node n;
  n.id = next_id_++;
  n.parent = parent;
  n.concept_id = value.concept_id;
  n.reroute = value.reroute;
  n.tagged = value.tagged;
  for (const auto& [name, property] : value.properties) {
    if (const auto* path = std::get_if<NodePath>(&property)) {
      n.properties[name] = Ref{0, *path};
      pending_refs.emplace_back(n.id, name);
    } else {
      n.properties[name] = to_stored(property);
    }
  }
  auto id = n.id;
  nodes_.emplace(id, std::move(n));
  for (const auto& [slot, child] : value.named) {
    auto child_id = build(child, id, pending_refs);
    node(id).named[slot] = child_id;
  }
  for (const auto& child : value.cardinal) {
    auto child_id = build(child, id, pending_refs);
    node(id).cardinal.push_back(child_id);
  }
  return id;
}

void Model::resolve_refs(const std::vector<std::pair<NodeId, std::string>>& pending_refs) {
  for (const auto& [holder, name] : pending_refs) {
    auto& ref = std::get<Ref>(node(holder).properties.at(name));
    ref.target = find(ref.original).value_or(0);
  }
}

void Model::rebind_refs(const std::vector<std::tuple<NodeId, std::string, NodePath>>& refs) {
  for (const auto& [holder, name, path] : refs) {
    if (!nodes_.contains(holder)) continue;
    auto& ref = std::get<Ref>(node(holder).properties.at(name));
    ref.target = find(path).value_or(0);
    ref.original = path;
  }
}

void Model::repair_focus(NodeId fallback) {
  if (!nodes_.contains(focus_)) focus_ = nodes_.contains(fallback) ? fallback : root_;
}

// ---------------------------------------------------------------------------
// kernel operations

std::size_t Model::fill_placeholders(const NodePath& path) {
  auto id = id_at(path);
  return transact(*this, [&] { return fill(id); });
}

NodePath Model::insert_child(const NodePath& parent, const ChildIndex& index, const ConceptId& concept_id,
                             const PropertyMap& properties) {
  auto pid = id_at(parent);
  const Node& p = node(pid);
  const auto& desc = registry_->descriptor(p.concept_id);
  if (index.is_named()) {
    if (!desc.named_slot(index.slot())) fail(ErrorCode::NoSuchSlot, p.concept_id.str() + " has no slot " + index.slot());
    if (p.named.contains(index.slot()))
      fail(ErrorCode::NoSuchSlot, p.concept_id.str() + "." + index.slot() + " is occupied; replace it instead");
  } else {
    if (!desc.cardinal_slot()) fail(ErrorCode::NoSuchSlot, p.concept_id.str() + " has no cardinal list");
    if (index.position() > p.cardinal.size())
      fail(ErrorCode::NoSuchSlot, "position " + index.to_string() + " is past the end of the list");
  }
  check_position(pid, index, concept_id);
  return transact(*this, [&] {
    auto id = new_node(concept_id, pid, properties);
    attach(pid, index, id, true);
    fill(id);
    return path_of(id);
  });
}

NodePath Model::replace_node(const NodePath& path, const ConceptId& concept_id, const AdoptionPlan& plan,
                             const PropertyMap& properties) {
  auto old_id = id_at(path);
  if (old_id == root_) fail(ErrorCode::CannotRemoveRoot, "the root cannot be replaced");
  const NodeId parent = node(old_id).parent;
  const ChildIndex index = index_in_parent(old_id);
  check_position(parent, index, concept_id);

  const auto& desc = registry_->descriptor(concept_id);
  std::set<ChildIndex> targets;
  std::vector<std::size_t> positions;
  std::vector<std::pair<NodeId, ChildIndex>> adoptees;
  for (const auto& adoption : plan) {
    auto source = find(adoption.source);
    if (!source || !adoption.source.starts_with(path))
      fail(ErrorCode::PlanSlotMismatch, "adoption source '" + adoption.source.to_string() + "' is not in the replaced subtree");
    for (const auto& other : plan)
      if (&other != &adoption && adoption.source != other.source && adoption.source.starts_with(other.source))
        fail(ErrorCode::PlanSlotMismatch, "adoption sources overlap");
    if (!targets.insert(adoption.target).second) fail(ErrorCode::PlanSlotMismatch, "slot adopted twice");
    const SlotSpec* slot =
        adoption.target.is_named() ? desc.named_slot(adoption.target.slot()) : desc.cardinal_slot();
    if (!slot) fail(ErrorCode::PlanSlotMismatch, concept_id.str() + " has no slot " + adoption.target.to_string());
    if (adoption.target.is_cardinal()) positions.push_back(adoption.target.position());
    const bool outer = adoption.target.is_named() && desc.reroute_slot == adoption.target.slot();
    auto allowed = outer ? allowed_for(parent, index) : slot->allowed;
    const Node& adopted = node(*source);
    if (!adopted.reroute && !admits_concept(allowed, adopted.concept_id))
      fail(ErrorCode::PlanSlotMismatch,
           concept_id.str() + "." + adoption.target.to_string() + " rejects adopted " + adopted.concept_id.str());
    adoptees.emplace_back(*source, adoption.target);
  }
  std::sort(positions.begin(), positions.end());
  for (std::size_t i = 0; i < positions.size(); ++i)
    if (positions[i] != i) fail(ErrorCode::PlanSlotMismatch, "cardinal adoptions must be dense from 0");

  return transact(*this, [&] {
    const bool was_tagged = node(old_id).tagged;
    auto new_id = new_node(concept_id, parent, properties);
    Node& p = node(parent);
    if (index.is_named())
      p.named[index.slot()] = new_id;
    else
      p.cardinal[index.position()] = new_id;
    node(old_id).parent = 0;
    for (const auto& [id, target] : adoptees)
      if (id != old_id) detach(id);
    bool old_adopted = false;
    for (const auto& [id, target] : adoptees) old_adopted |= id == old_id;
    if (!old_adopted) erase_subtree(old_id);

    std::sort(adoptees.begin(), adoptees.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [id, target] : adoptees) {
      if (target.is_named())
        attach(new_id, target, id, false);
      else
        attach(new_id, ChildIndex::cardinal(node(new_id).cardinal.size()), id, true);
    }
    node(new_id).tagged = was_tagged;
    if (old_adopted) node(old_id).tagged = false;
    fill(new_id);
    repair_focus(new_id);
    return path_of(new_id);
  });
}

RemoveOutcome Model::remove_node(const NodePath& path, RemoveMode mode) {
  auto id = id_at(path);
  if (id == root_) fail(ErrorCode::CannotRemoveRoot, "the root cannot be removed");
  const NodeId parent = node(id).parent;
  const ChildIndex index = index_in_parent(id);

  if (mode == RemoveMode::CollapseToPlaceholder) {
    auto allowed = allowed_for(parent, index);
    auto filler = registry_->common_placeholder(allowed);
    auto kind = registry_->kind(filler);
    if (kind == ConceptKind::Notional || (kind == ConceptKind::Proper && !registry_->accepts_child(allowed, filler)))
      fail(ErrorCode::WouldViolateStructure, "no placeholder can stand in at '" + path.to_string() + "'");
    return transact(*this, [&] {
      const bool was_tagged = node(id).tagged;
      auto new_id = new_node(filler, parent, {});
      Node& p = node(parent);
      if (index.is_named())
        p.named[index.slot()] = new_id;
      else
        p.cardinal[index.position()] = new_id;
      erase_subtree(id);
      node(new_id).tagged = was_tagged;
      fill(new_id);
      repair_focus(new_id);
      return RemoveOutcome{mode, path_of(new_id)};
    });
  }

  if (!index.is_cardinal()) fail(ErrorCode::WouldViolateStructure, "'" + path.to_string() + "' is not a list entry");
  const auto& slot = slot_of(path);
  if (node(parent).cardinal.size() <= slot.cardinal_min)
    fail(ErrorCode::WouldViolateStructure, "list at '" + path.parent().to_string() + "' is at its minimum length");
  return transact(*this, [&] {
    detach(id);
    erase_subtree(id);
    repair_focus(parent);
    return RemoveOutcome{mode, path_of(parent)};
  });
}

NodePath Model::graft(const NodePath& path, const NodeValue& value) {
  auto old_id = id_at(path);
  return transact(*this, [&] {
    std::vector<std::pair<NodeId, std::string>> pending;
    NodeId new_id;
    if (old_id == root_) {
      nodes_.clear();
      root_ = new_id = build(value, 0, pending);
    } else {
      const NodeId parent = node(old_id).parent;
      const ChildIndex index = index_in_parent(old_id);
      new_id = build(value, parent, pending);
      Node& p = node(parent);
      if (index.is_named())
        p.named[index.slot()] = new_id;
      else
        p.cardinal[index.position()] = new_id;
      erase_subtree(old_id);
    }
    resolve_refs(pending);
    fill(new_id);
    auto at = path_of(new_id);
    std::vector<Diagnostic> problems;
    for (const auto& p : preorder(at)) validate_node(id_at(p), problems);
    if (!problems.empty())
      fail(ErrorCode::SlotRejectsConcept, "at '" + problems.front().node_path.to_string() + "': " + problems.front().message);
    repair_focus(new_id);
    return at;
  });
}

NodePath Model::insert_value(const NodePath& parent, const ChildIndex& index, const NodeValue& value) {
  auto pid = id_at(parent);
  const auto& desc = registry_->descriptor(node(pid).concept_id);
  if (index.is_named()) {
    if (!desc.named_slot(index.slot()) || node(pid).named.contains(index.slot()))
      fail(ErrorCode::NoSuchSlot, "cannot insert at " + index.to_string());
  } else if (!desc.cardinal_slot() || index.position() > node(pid).cardinal.size()) {
    fail(ErrorCode::NoSuchSlot, "cannot insert at " + index.to_string());
  }
  return transact(*this, [&] {
    std::vector<std::pair<NodeId, std::string>> pending;
    auto id = build(value, pid, pending);
    attach(pid, index, id, true);
    resolve_refs(pending);
    fill(id);
    auto at = path_of(id);
    std::vector<Diagnostic> problems;
    for (const auto& p : preorder(at)) validate_node(id_at(p), problems);
    if (!problems.empty())
      fail(ErrorCode::SlotRejectsConcept, "at '" + problems.front().node_path.to_string() + "': " + problems.front().message);
    return at;
  });
}

// ---------------------------------------------------------------------------
// normal structure

bool Model::reroutes(const NodePath& path) const { return node(id_at(path)).reroute.has_value(); }

NodePath Model::resolve(const NodePath& path) const {
  NodePath current = path;
  NodeId id = id_at(current);
  std::size_t hops = 0;
  while (node(id).reroute) {
    if (++hops > nodes_.size()) fail(ErrorCode::RerouteCycle, "reroute chain from '" + path.to_string() + "' loops");
    auto index = ChildIndex::named(*node(id).reroute);
    auto next = child_id(node(id), index);
    if (!next) fail(ErrorCode::NoSuchChild, "reroute target " + index.to_string() + " is missing");
    current = current.child(index);
    id = *next;
  }
  return current;
}

NodePath Model::raw_child(const NodePath& parent, const ChildIndex& index) const {
  auto pid = find(parent);
  if (!pid || !child_id(node(*pid), index))
    fail(ErrorCode::NoSuchChild, "no child " + index.to_string() + " under '" + parent.to_string() + "'");
  return parent.child(index);
}

NodePath Model::resolve_child(const NodePath& parent, const ChildIndex& index) const {
  return resolve(raw_child(parent, index));
}

std::vector<NodePath> Model::normal_children(const NodePath& path) const {
  auto base = resolve(path);
  std::vector<NodePath> out;
  for (const auto& index : child_indices(node(id_at(base)))) out.push_back(resolve(base.child(index)));
  return out;
}

std::optional<NodePath> Model::normal_parent(const NodePath& path) const {
  if (path.is_root()) return std::nullopt;
  NodePath up = path.parent();
  while (!up.is_root() && reroutes(up)) up = up.parent();
  if (up.is_root() && reroutes(up)) return std::nullopt;
  return up;
}

// ---------------------------------------------------------------------------
// validation

void Model::validate_node(NodeId id, std::vector<Diagnostic>& out) const {
  const Node& n = node(id);
  auto report = [&](std::string message) {
    out.push_back(Diagnostic{path_of(id), Severity::StructuralError, "structure", std::move(message), {}});
  };
  const auto& desc = registry_->descriptor(n.concept_id);
  if (desc.kind == ConceptKind::Notional) report(n.concept_id.str() + " is notional and cannot be instantiated");

  if (id == root_) {
    if (!registry_->contains(core::Program) || !registry_->is_strong_kind_of(n.concept_id, core::Program))
      report("root concept_id " + n.concept_id.str() + " is not a Program");
  } else {
    const Node& p = node(n.parent);
    const auto index = index_in_parent(id);
    const auto& parent_desc = registry_->descriptor(p.concept_id);
    const SlotSpec* slot = index.is_named() ? parent_desc.named_slot(index.slot()) : parent_desc.cardinal_slot();
    if (!slot) {
      report(p.concept_id.str() + " has no slot " + index.to_string());
    } else if (!n.reroute && desc.kind != ConceptKind::Notional) {
      auto allowed = allowed_for(n.parent, index);
      if (!admits_concept(allowed, n.concept_id))
        report(p.concept_id.str() + "." + index.to_string() + " does not accept " + n.concept_id.str());
    }
  }

  for (const auto& slot : desc.child_slots) {
    if (slot.is_cardinal()) {
      if (n.cardinal.size() < slot.cardinal_min)
        report(n.concept_id.str() + " list needs at least " + std::to_string(slot.cardinal_min) + " entries");
    } else if (slot.required && !n.named.contains(*slot.name)) {
      report(n.concept_id.str() + "." + *slot.name + " is required but empty");
    }
  }
  if (n.reroute != desc.reroute_slot) report(n.concept_id.str() + " reroute does not match its concept");
  if (n.reroute && !n.named.contains(*n.reroute)) report("reroute target " + *n.reroute + " is missing");
}

std::vector<Diagnostic> Model::validate_structure() const {
  std::vector<Diagnostic> out;
  std::set<NodeId> seen;
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) {
      out.push_back(Diagnostic{{}, Severity::StructuralError, "structure", "node reachable twice", {}});
      continue;
    }
    validate_node(id, out);
    const Node& n = node(id);
    for (const auto& [slot, child] : n.named) {
      if (node(child).parent != id)
        out.push_back(Diagnostic{path_of(id), Severity::StructuralError, "structure", "broken parent link", {}});
      stack.push_back(child);
    }
    for (auto child : n.cardinal) {
      if (node(child).parent != id)
        out.push_back(Diagnostic{path_of(id), Severity::StructuralError, "structure", "broken parent link", {}});
      stack.push_back(child);
    }
  }
  if (seen.size() != nodes_.size())
    out.push_back(Diagnostic{{}, Severity::StructuralError, "structure", "unreachable nodes in the model", {}});
  if (!nodes_.contains(focus_))
    out.push_back(Diagnostic{{}, Severity::StructuralError, "structure", "focus does not resolve", {}});
  return out;
}

// ---------------------------------------------------------------------------
// focus and tags

const NodePath Model::focus() const { return path_of(focus_); }

NodePath Model::move_focus(const NodePath& target) {
  if (!exists(target)) fail(ErrorCode::NoSuchTarget, "no node at '" + target.to_string() + "'");
  auto resolved = resolve(target);
  focus_ = id_at(resolved);
  return resolved;
}

NodePath Model::move_focus(FocusMove move) {
  auto current = resolve(path_of(focus_));
  std::optional<NodePath> target;
  if (move == FocusMove::FirstChild) {
    auto kids = normal_children(current);
    if (!kids.empty()) target = kids.front();
  } else if (auto parent = normal_parent(current)) {
    if (move == FocusMove::Parent) {
      target = parent;
    } else {
      auto kids = normal_children(*parent);
      auto it = std::find(kids.begin(), kids.end(), current);
      if (it != kids.end()) {
        if (move == FocusMove::NextSibling && it + 1 != kids.end()) target = *(it + 1);
        if (move == FocusMove::PrevSibling && it != kids.begin()) target = *(it - 1);
      }
    }
  }
  if (!target) fail(ErrorCode::NoSuchTarget, "no focus target from '" + current.to_string() + "'");
  focus_ = id_at(*target);
  return *target;
}

bool Model::tagged(const NodePath& path) const { return node(id_at(path)).tagged; }

void Model::set_tagged(const NodePath& path, bool on) { node(id_at(path)).tagged = on; }

void Model::clear_tags() {
  for (auto& [id, n] : nodes_) n.tagged = false;
}

std::vector<NodePath> Model::tagged_paths() const {
  std::vector<NodePath> out;
  for (const auto& p : preorder())
    if (tagged(p)) out.push_back(p);
  return out;
}

// ---------------------------------------------------------------------------
// snapshots

NodeValue Model::extract_node(NodeId id) const {
  const Node& n = node(id);
  NodeValue value;
  value.concept_id = n.concept_id;
  for (const auto& [name, stored] : n.properties) value.properties[name] = to_public(stored);
  for (const auto& [slot, child] : n.named) value.named.emplace(slot, extract_node(child));
  for (auto child : n.cardinal) value.cardinal.push_back(extract_node(child));
  value.reroute = n.reroute;
  value.tagged = n.tagged;
  return value;
}

NodeValue Model::extract(const NodePath& path) const { return extract_node(id_at(path)); }

void Model::implant(const NodePath& path, const NodeValue& value) {
  auto old_id = id_at(path);
  std::vector<std::pair<NodeId, std::string>> pending;
  if (old_id == root_) {
    nodes_.clear();
    root_ = build(value, 0, pending);
    resolve_refs(pending);
    focus_ = root_;
    return;
  }
  // References held outside the region that point into it are re-resolved by
  // path once the region has been rebuilt.
  std::set<NodeId> region;
  std::vector<NodeId> stack{old_id};
  while (!stack.empty()) {
    auto current = stack.back();
    stack.pop_back();
    region.insert(current);
    for (const auto& [slot, child] : node(current).named) stack.push_back(child);
    for (auto child : node(current).cardinal) stack.push_back(child);
  }
  std::vector<std::tuple<NodeId, std::string, NodePath>> external;
  for (const auto& [id, n] : nodes_) {
    if (region.contains(id)) continue;
    for (const auto& [name, stored] : n.properties)
      if (const auto* ref = std::get_if<Ref>(&stored); ref && region.contains(ref->target))
        external.emplace_back(id, name, path_of(ref->target));
  }
  const NodeId parent = node(old_id).parent;
  const ChildIndex index = index_in_parent(old_id);
  auto new_id = build(value, parent, pending);
  Node& p = node(parent);
  if (index.is_named())
    p.named[index.slot()] = new_id;
  else
    p.cardinal[index.position()] = new_id;
  erase_subtree(old_id);
  resolve_refs(pending);
  rebind_refs(external);
  repair_focus(new_id);
}

}  // namespace martta
