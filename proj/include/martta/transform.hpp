#pragma once

#include <cstddef>
#include <vector>

#include "martta/model.hpp"

namespace martta {

inline constexpr std::size_t kTransformIterationCap = 1000;

struct TransformedNode {
  NodePath path;
  ConceptId before;
  ConceptId after;
};

struct TransformReport {
  /// Passes run, including the final pass that found nothing left.
  std::size_t iterations = 0;
  std::vector<TransformedNode> transformed;
  std::size_t deferred_total = 0;
};

/// Weakly derived from Composite.
bool is_composite(const Model& model, const NodePath& path);
std::vector<NodePath> composite_paths(const Model& model);

/// Asks every Composite node, in pre-order, to lower itself until none
/// remain. On error the model is left as it was.
TransformReport transform_composites(Model& model, std::size_t iteration_cap = kTransformIterationCap);

}  // namespace martta
