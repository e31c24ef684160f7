#include "martta/transform.hpp"

#include <algorithm>

#include "martta/error.hpp"

namespace martta {

bool is_composite(const Model& model, const NodePath& path) { return model.kind_of_at(path, core::Composite); }

std::vector<NodePath> composite_paths(const Model& model) {
  std::vector<NodePath> out;
  if (!model.registry().contains(core::Composite)) return out;
  for (auto& p : model.preorder())
    if (is_composite(model, p)) out.push_back(std::move(p));
  return out;
}

namespace {

const TransformHook* find_hook(const Registry& registry, const ConceptId& id) {
  for (const auto& ancestor : registry.strong_chain(id)) {
    const auto& hook = registry.descriptor(ancestor).transform;
    if (hook) return &hook;
  }
  return nullptr;
}

TransformReport run(Model& model, std::size_t cap) {
  TransformReport report;
  const auto& registry = model.registry();
  while (true) {
    if (report.iterations == cap)
      fail(ErrorCode::IterationCapExceeded, "still transforming after " + std::to_string(cap) + " passes");
    ++report.iterations;
    if (composite_paths(model).empty()) return report;

    std::size_t progress = 0;
    std::vector<NodePath> asked;
    while (true) {
      auto remaining = composite_paths(model);
      auto next = std::find_if(remaining.begin(), remaining.end(), [&](const NodePath& p) {
        return std::find(asked.begin(), asked.end(), p) == asked.end();
      });
      if (next == remaining.end()) break;
      const NodePath path = *next;
      asked.push_back(path);
      const ConceptId before = model.concept_at(path);
      const auto* hook = find_hook(registry, before);
      if (!hook || (*hook)(model, path) == TransformStep::Deferred) {
        ++report.deferred_total;
        continue;
      }
      auto problems = model.validate_structure();
      if (!problems.empty())
        fail(ErrorCode::TransformProducedInvalidStructure,
             before.str() + " at '" + path.to_string() + "': " + problems.front().message);
      ++progress;
      report.transformed.push_back({path, before, model.exists(path) ? model.concept_at(path) : ConceptId{}});
    }
    if (progress == 0) {
      auto left = composite_paths(model);
      fail(ErrorCode::TransformStalled, std::to_string(left.size()) + " Composite nodes deferred for a full pass, first at '" +
                                            left.front().to_string() + "'");
    }
  }
}

}  // namespace

TransformReport transform_composites(Model& model, std::size_t iteration_cap) {
  Model backup = model;
  try {
    return run(model, iteration_cap);
  } catch (...) {
    model = std::move(backup);
    throw;
  }
}

}  // namespace martta
