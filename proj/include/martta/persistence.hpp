#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "martta/model.hpp"

namespace martta {

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kDocumentExtension = ".martta.json";

/// Canonical JSON over the actual structure: sorted keys, two-space
/// indent, final newline. Position tags and focus are not saved.
std::string save(const Model& model);

struct LoadResult {
  Model model;
  std::vector<std::string> warnings;
};

/// Errors: MalformedDocument, UnsupportedVersion, UnknownConceptInDocument,
/// StructuralViolation (message names the node path).
LoadResult load(std::string_view document, const Registry& registry);

std::string save_value(const NodeValue& value);
NodeValue parse_value(std::string_view node_document);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace martta
