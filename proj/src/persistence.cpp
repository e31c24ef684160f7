#include "martta/persistence.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "martta/error.hpp"

namespace martta {

namespace {

using nlohmann::json;

json encode_property(const PropertyValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
  if (const auto* b = std::get_if<bool>(&value)) return *b;
  return json{{"path", std::get<NodePath>(value).to_string()}};
}

json encode(const NodeValue& v) {
  json node = json::object();
  node["concept"] = v.concept_id.str();
  json props = json::object();
  for (const auto& [k, p] : v.properties) props[k] = encode_property(p);
  node["properties"] = std::move(props);
  json named = json::object();
  for (const auto& [slot, child] : v.named) named[slot] = encode(child);
  node["named"] = std::move(named);
  json cardinal = json::array();
  for (const auto& child : v.cardinal) cardinal.push_back(encode(child));
  node["cardinal"] = std::move(cardinal);
  if (v.reroute) node["reroute"] = *v.reroute;
  return node;
}

[[noreturn]] void malformed(const std::string& where, const std::string& what) {
  fail(ErrorCode::MalformedDocument, (where.empty() ? std::string("root") : "'" + where + "'") + ": " + what);
}

PropertyValue decode_property(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_object() && j.size() == 1 && j.contains("path") && j["path"].is_string())
    return NodePath::parse(j["path"].get<std::string>());
  malformed(where, "unsupported property value " + j.dump());
}

NodeValue decode(const json& j, const NodePath& at) {
  const auto where = at.to_string();
  if (!j.is_object()) malformed(where, "node is not an object");
  for (const auto& [key, value] : j.items())
    if (key != "concept" && key != "properties" && key != "named" && key != "cardinal" && key != "reroute")
      malformed(where, "unexpected key '" + key + "'");
  if (!j.contains("concept") || !j["concept"].is_string()) malformed(where, "missing concept");
  NodeValue v;
  v.concept_id = ConceptId(j["concept"].get<std::string>());
  if (j.contains("properties")) {
    if (!j["properties"].is_object()) malformed(where, "properties is not an object");
    for (const auto& [k, p] : j["properties"].items()) v.properties[k] = decode_property(p, where);
  }
  if (j.contains("named")) {
    if (!j["named"].is_object()) malformed(where, "named is not an object");
    for (const auto& [slot, child] : j["named"].items()) v.named.emplace(slot, decode(child, at.child(slot)));
  }
  if (j.contains("cardinal")) {
    if (!j["cardinal"].is_array()) malformed(where, "cardinal is not an array");
    std::size_t i = 0;
    for (const auto& child : j["cardinal"]) v.cardinal.push_back(decode(child, at.child(i++)));
  }
  if (j.contains("reroute")) {
    if (!j["reroute"].is_string()) malformed(where, "reroute is not a slot name");
    v.reroute = j["reroute"].get<std::string>();
  }
  return v;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedDocument, e.what());
  }
}

}  // namespace

std::string save_value(const NodeValue& value) { return encode(value).dump(2) + "\n"; }

NodeValue parse_value(std::string_view node_document) { return decode(parse_json(node_document), {}); }

std::string save(const Model& model) {
  json doc = json::object();
  doc["format_version"] = kFormatVersion;
  doc["language_fingerprint"] = model.registry().fingerprint();
  doc["root"] = encode(model.extract({}));
  return doc.dump(2) + "\n";
}

LoadResult load(std::string_view document, const Registry& registry) {
  auto doc = parse_json(document);
  if (!doc.is_object()) malformed("", "document is not an object");
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
    malformed("", "missing format_version");
  const auto version = doc["format_version"].get<std::int64_t>();
  if (version != kFormatVersion) fail(ErrorCode::UnsupportedVersion, "format_version " + std::to_string(version));
  if (!doc.contains("root")) malformed("", "missing root");
  std::vector<std::string> warnings;
  if (!doc.contains("language_fingerprint") || !doc["language_fingerprint"].is_string())
    warnings.push_back("document has no language fingerprint");
  else if (doc["language_fingerprint"].get<std::string>() != registry.fingerprint())
    warnings.push_back("language fingerprint differs: saved " + doc["language_fingerprint"].get<std::string>() +
                       ", loaded " + registry.fingerprint());
  auto root = decode(doc["root"], {});
  return LoadResult{Model::from_value(registry, root, true), std::move(warnings)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MalformedDocument, "cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::MalformedDocument, "cannot write '" + path + "'");
  out << contents;
}

}  // namespace martta
