#pragma once

#include <functional>

#include "martta/input.hpp"
#include "martta/lang.hpp"
#include "martta/model.hpp"
#include "martta/registry.hpp"

namespace martta {

/// The sealed C++-like language with its actions, keymap and edit support.
/// Editors and models keep pointers into it, so it never moves.
class Workbench {
 public:
  /// Runs before sealing, to register extra concepts.
  using Extension = std::function<void(Registry&)>;

  explicit Workbench(const Extension& extend = {});
  Workbench(const Workbench&) = delete;
  Workbench& operator=(const Workbench&) = delete;

  const Registry& registry() const noexcept { return registry_; }
  const ActionTable& actions() const noexcept { return actions_; }
  const Keymap& keymap() const noexcept { return keymap_; }
  const EditSupport& edits() const noexcept { return edits_; }

  Model new_model(const ConceptId& root = cpp::ids::CppProgram) const;
  Editor editor(Model model) const;
  Editor editor() const { return editor(new_model()); }

 private:
  Registry registry_;
  ActionTable actions_;
  Keymap keymap_;
  cpp::CppEditSupport edits_;
};

}  // namespace martta
