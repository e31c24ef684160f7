#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "martta/path.hpp"

namespace martta {

/// A node datum. NodePath values are language-level cross-references (e.g.
/// a VariableReference naming its declaration).
using PropertyValue = std::variant<std::string, std::int64_t, bool, NodePath>;
using PropertyMap = std::map<std::string, PropertyValue>;

std::string describe(const PropertyValue& value);

}  // namespace martta
