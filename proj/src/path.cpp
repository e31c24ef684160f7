#include "martta/path.hpp"

#include <algorithm>
#include <cctype>

namespace martta {

std::string ChildIndex::to_string() const {
  return is_cardinal() ? std::to_string(position()) : slot();
}

ChildIndex ChildIndex::parse(std::string_view text) {
  const bool digits = !text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
  if (digits) return cardinal(std::stoul(std::string(text)));
  return named(std::string(text));
}

NodePath NodePath::parent() const {
  if (steps_.empty()) return {};
  return NodePath(std::vector<ChildIndex>(steps_.begin(), steps_.end() - 1));
}

NodePath NodePath::child(ChildIndex index) const {
  auto steps = steps_;
  steps.push_back(std::move(index));
  return NodePath(std::move(steps));
}

bool NodePath::starts_with(const NodePath& prefix) const {
  if (prefix.steps_.size() > steps_.size()) return false;
  return std::equal(prefix.steps_.begin(), prefix.steps_.end(), steps_.begin());
}

std::string NodePath::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (i) out += '.';
    out += steps_[i].to_string();
  }
  return out;
}

NodePath NodePath::parse(std::string_view text) {
  std::vector<ChildIndex> steps;
  std::size_t start = 0;
  while (start < text.size()) {
    auto dot = text.find('.', start);
    if (dot == std::string_view::npos) dot = text.size();
    if (dot > start) steps.push_back(ChildIndex::parse(text.substr(start, dot - start)));
    start = dot + 1;
  }
  return NodePath(std::move(steps));
}

}  // namespace martta
