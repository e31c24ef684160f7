#include "martta/workbench.hpp"

namespace martta {

Workbench::Workbench(const Extension& extend) {
  cpp::register_catalog(registry_);
  if (extend) extend(registry_);
  registry_.seal();
  cpp::install_keymap(registry_, actions_, keymap_);
}

Model Workbench::new_model(const ConceptId& root) const { return Model::create(registry_, root); }

Editor Workbench::editor(Model model) const { return Editor(std::move(model), actions_, keymap_, edits_); }

}  // namespace martta
