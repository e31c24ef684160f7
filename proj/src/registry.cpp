#include "martta/registry.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <set>
#include <sstream>

#include "martta/error.hpp"

namespace martta {

std::string describe(const PropertyValue& value) {
  struct {
    std::string operator()(const std::string& s) const { return '"' + s + '"'; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const NodePath& p) const { return "@" + p.to_string(); }
  } visitor;
  return std::visit(visitor, value);
}

std::string_view kind_name(ConceptKind kind) noexcept {
  switch (kind) {
    case ConceptKind::Proper:
      return "Proper";
    case ConceptKind::Placeholder:
      return "Placeholder";
    case ConceptKind::Notional:
      return "Notional";
  }
  return "?";
}

const SlotSpec* ConceptDescriptor::named_slot(std::string_view name) const {
  for (const auto& slot : child_slots)
    if (slot.name && *slot.name == name) return &slot;
  return nullptr;
}

const SlotSpec* ConceptDescriptor::cardinal_slot() const {
  for (const auto& slot : child_slots)
    if (slot.is_cardinal()) return &slot;
  return nullptr;
}

ConceptId Registry::register_concept(ConceptDescriptor descriptor) {
  const ConceptId id = descriptor.id;
  if (id.empty()) fail(ErrorCode::InvalidDescriptor, "concept id is empty");
  if (index_.contains(id)) fail(ErrorCode::DuplicateId, id.str());
  if (sealed_) fail(ErrorCode::RegistrySealed, "cannot register " + id.str());

  if (!descriptor.superclass) {
    if (!concepts_.empty())
      fail(ErrorCode::InvalidDescriptor, id.str() + " nominates no superclass but the root already exists");
  } else {
    if (*descriptor.superclass == id) fail(ErrorCode::CycleDetected, id.str() + " is its own superclass");
    if (!index_.contains(*descriptor.superclass))
      fail(ErrorCode::UnknownParent, id.str() + " superclass " + descriptor.superclass->str());
  }
  std::set<ConceptId> seen_parents;
  for (const auto& parent : descriptor.weak_parents) {
    if (parent == id) fail(ErrorCode::CycleDetected, id.str() + " inherits itself");
    if (!index_.contains(parent)) fail(ErrorCode::UnknownParent, id.str() + " weak parent " + parent.str());
    if (descriptor.superclass && parent == *descriptor.superclass)
      fail(ErrorCode::InvalidDescriptor, id.str() + " lists its superclass as a weak parent");
    if (!seen_parents.insert(parent).second)
      fail(ErrorCode::InvalidDescriptor, id.str() + " repeats weak parent " + parent.str());
  }

  std::set<std::string> slot_names;
  bool has_cardinal = false;
  for (const auto& slot : descriptor.child_slots) {
    if (slot.allowed.empty()) fail(ErrorCode::InvalidDescriptor, id.str() + " has a slot with no allowed concepts");
    if (slot.is_cardinal()) {
      if (has_cardinal) fail(ErrorCode::InvalidDescriptor, id.str() + " declares two cardinal lists");
      has_cardinal = true;
    } else if (!slot_names.insert(*slot.name).second) {
      fail(ErrorCode::InvalidDescriptor, id.str() + " repeats slot " + *slot.name);
    }
  }
  if (descriptor.reroute_slot) {
    const auto* target = descriptor.named_slot(*descriptor.reroute_slot);
    if (!target || !target->required)
      fail(ErrorCode::InvalidDescriptor, id.str() + " reroutes to a slot that is not a required named slot");
  }

  Closure closure;
  closure.chain.push_back(id);
  closure.lineage.push_back(id);
  if (descriptor.superclass) {
    const auto& parent_chain = closures_[index_.at(*descriptor.superclass)].chain;
    closure.chain.insert(closure.chain.end(), parent_chain.begin(), parent_chain.end());
    // Strong chain first, then the weak-only ancestors breadth-first.
    std::set<ConceptId> in_lineage(closure.chain.begin(), closure.chain.end());
    closure.lineage = closure.chain;
    std::deque<ConceptId> queue(closure.chain.begin(), closure.chain.end());
    for (const auto& parent : descriptor.weak_parents) queue.push_back(parent);
    while (!queue.empty()) {
      auto next = queue.front();
      queue.pop_front();
      if (in_lineage.insert(next).second) closure.lineage.push_back(next);
      const auto& desc = next == id ? descriptor : concepts_[index_.at(next)];
      for (const auto& parent : desc.weak_parents)
        if (!in_lineage.contains(parent)) queue.push_back(parent);
      if (desc.superclass && !in_lineage.contains(*desc.superclass)) queue.push_back(*desc.superclass);
    }
    closures_[index_.at(*descriptor.superclass)].strong_children.push_back(concepts_.size());
  }

  index_.emplace(id, concepts_.size());
  concepts_.push_back(std::move(descriptor));
  closures_.push_back(std::move(closure));
  return id;
}

void Registry::seal() {
  if (sealed_) return;
  for (const auto& desc : concepts_) {
    for (const auto& slot : desc.child_slots) {
      for (const auto& allowed : slot.allowed)
        if (!contains(allowed))
          fail(ErrorCode::UnknownConcept, desc.id.str() + " slot allows unknown concept " + allowed.str());
    }
  }
  for (const auto& desc : concepts_) {
    for (const auto& slot : desc.child_slots) {
      const bool needs_fill = slot.is_cardinal() ? slot.cardinal_min > 0 : slot.required;
      if (!needs_fill || (slot.name && desc.reroute_slot == slot.name)) continue;
      const auto filler = common_placeholder(slot.allowed);
      const auto filler_kind = kind(filler);
      const bool ok = filler_kind == ConceptKind::Placeholder ||
                      (filler_kind == ConceptKind::Proper && accepts_child(slot.allowed, filler));
      if (!ok)
        fail(ErrorCode::InvalidDescriptor, desc.id.str() + " has a mandatory slot that cannot be placeholder-filled (" +
                                               filler.str() + ")");
    }
  }
  sealed_ = true;
}

std::size_t Registry::require(const ConceptId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::UnknownConcept, id.str());
  return it->second;
}

const ConceptDescriptor& Registry::descriptor(const ConceptId& id) const { return concepts_[require(id)]; }

const std::vector<ConceptId>& Registry::strong_chain(const ConceptId& id) const {
  return closures_[require(id)].chain;
}

const std::vector<ConceptId>& Registry::lineage(const ConceptId& id) const {
  return closures_[require(id)].lineage;
}

bool Registry::is_strong_kind_of(const ConceptId& a, const ConceptId& b) const {
  require(b);
  const auto& chain = closures_[require(a)].chain;
  return std::find(chain.begin(), chain.end(), b) != chain.end();
}

bool Registry::on_lineage(std::size_t index, const ConceptId& target) const {
  const auto& lineage = closures_[index].lineage;
  return std::find(lineage.begin(), lineage.end(), target) != lineage.end();
}

bool Registry::is_kind_of(const ConceptId& a, const ConceptId& b) const {
  require(b);
  return on_lineage(require(a), b);
}

bool Registry::accepts_child(const std::vector<ConceptId>& allowed, const ConceptId& candidate) const {
  const auto& chain = closures_[require(candidate)].chain;
  for (const auto& a : allowed) {
    require(a);
    if (std::find(chain.begin(), chain.end(), a) != chain.end()) return true;
  }
  return false;
}

ConceptId Registry::common_placeholder(const std::vector<ConceptId>& allowed) const {
  if (allowed.empty()) fail(ErrorCode::EmptySet, "common_placeholder of an empty set");
  for (const auto& a : allowed) require(a);
  // Deepest entry of the first chain that every other chain also contains.
  for (const auto& candidate : closures_[require(allowed.front())].chain) {
    const bool shared = std::all_of(allowed.begin() + 1, allowed.end(), [&](const ConceptId& other) {
      const auto& chain = closures_[require(other)].chain;
      return std::find(chain.begin(), chain.end(), candidate) != chain.end();
    });
    if (shared) return candidate;
  }
  return concepts_.front().id;
}

std::vector<ConceptId> Registry::derived_concepts(const ConceptId& base) const {
  std::vector<ConceptId> out;
  std::vector<std::size_t> stack{require(base)};
  while (!stack.empty()) {
    auto current = stack.back();
    stack.pop_back();
    out.push_back(concepts_[current].id);
    const auto& children = closures_[current].strong_children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::string Registry::report() const {
  std::ostringstream out;
  for (const auto& desc : concepts_) {
    out << desc.id.str() << " kind=" << kind_name(desc.kind)
        << " super=" << (desc.superclass ? desc.superclass->str() : "-") << " weak=[";
    for (std::size_t i = 0; i < desc.weak_parents.size(); ++i) out << (i ? "," : "") << desc.weak_parents[i].str();
    out << "] slots=[";
    for (std::size_t i = 0; i < desc.child_slots.size(); ++i) {
      const auto& slot = desc.child_slots[i];
      out << (i ? " " : "") << (slot.name ? *slot.name : "*") << ":{";
      for (std::size_t j = 0; j < slot.allowed.size(); ++j) out << (j ? "," : "") << slot.allowed[j].str();
      out << "}";
      if (slot.is_cardinal())
        out << ">=" << slot.cardinal_min;
      else if (slot.required)
        out << "!";
    }
    out << "]";
    if (desc.reroute_slot) out << " reroute=" << *desc.reroute_slot;
    if (!desc.keywords.empty()) {
      out << " keywords=[";
      for (std::size_t i = 0; i < desc.keywords.size(); ++i) out << (i ? "," : "") << desc.keywords[i];
      out << "]";
    }
    out << "\n";
  }
  return out.str();
}

std::string Registry::fingerprint() const {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : report()) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace martta
