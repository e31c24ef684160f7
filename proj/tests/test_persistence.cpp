#include <filesystem>
#include <functional>

#include "doctest.h"
#include "json.hpp"
#include "martta/persistence.hpp"
#include "support.hpp"

using namespace martta;
using namespace testing;
namespace ids = cpp::ids;
using nlohmann::json;

namespace {

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error raised");
  return Error(ErrorCode::InvalidDescriptor, "");
}

std::string edited(std::string document, const std::function<void(json&)>& change) {
  auto j = json::parse(document);
  change(j);
  return j.dump(2) + "\n";
}

}  // namespace

TEST_CASE("save and load round-trip byte for byte") {
  Workbench wb;
  auto ed = wb.editor();
  ed.feed(sample_prelude());
  ed.feed(sample_entry(), false);
  for (const auto& m : {ed.model(), Model::from_value(wb.registry(), fib_program(true)), wb.new_model()}) {
    const auto text = save(m);
    auto loaded = load(text, wb.registry());
    CHECK(loaded.warnings.empty());
    CHECK(save(loaded.model) == text);
    CHECK(loaded.model.extract({}) == [&] {
      auto v = m.extract({});
      // Tags are not saved.
      std::function<void(NodeValue&)> clear = [&](NodeValue& n) {
        n.tagged = false;
        for (auto& [k, c] : n.named) clear(c);
        for (auto& c : n.cardinal) clear(c);
      };
      clear(v);
      return v;
    }());
  }
}

TEST_CASE("the document shape") {
  Workbench wb;
  auto text = save(Model::from_value(wb.registry(), fib_program()));
  CHECK(text.back() == '\n');
  auto j = json::parse(text);
  CHECK(j["format_version"] == kFormatVersion);
  CHECK(j["language_fingerprint"] == wb.registry().fingerprint());
  CHECK(j["root"]["concept"] == "CppProgram");
  // References are stored as paths.
  CHECK(text.find("\"path\": \"0.0\"") != std::string::npos);
}

TEST_CASE("load rejects bad documents by name") {
  Workbench wb;
  const auto good = save(Model::from_value(wb.registry(), fib_program()));
  CHECK(error_of([&] { load("{ not json", wb.registry()); }).code() == ErrorCode::MalformedDocument);
  CHECK(error_of([&] { load("[]", wb.registry()); }).code() == ErrorCode::MalformedDocument);
  CHECK(error_of([&] { load(edited(good, [](json& j) { j.erase("root"); }), wb.registry()); }).code() ==
        ErrorCode::MalformedDocument);
  CHECK(error_of([&] { load(edited(good, [](json& j) { j["root"]["extra"] = 1; }), wb.registry()); }).code() ==
        ErrorCode::MalformedDocument);
  CHECK(error_of([&] { load(edited(good, [](json& j) { j["root"]["properties"]["x"] = 1.5; }), wb.registry()); }).code() ==
        ErrorCode::MalformedDocument);
  CHECK(error_of([&] { load(edited(good, [](json& j) { j["format_version"] = 2; }), wb.registry()); }).code() ==
        ErrorCode::UnsupportedVersion);
  CHECK(error_of([&] { load(edited(good, [](json& j) { j.erase("format_version"); }), wb.registry()); }).code() ==
        ErrorCode::MalformedDocument);

  auto unknown = error_of([&] {
    load(edited(good, [](json& j) { j["root"]["cardinal"][0]["named"]["Returned"]["concept"] = "Widget"; }), wb.registry());
  });
  CHECK(unknown.code() == ErrorCode::UnknownConceptInDocument);
  CHECK(std::string(unknown.what()).find("Widget") != std::string::npos);
}

TEST_CASE("structurally invalid documents name the node") {
  Workbench wb;
  auto doc = save(Model::from_value(
      wb.registry(),
      node(ids::CppProgram, {}, {},
           {node(ids::Namespace, {{"name", std::string("ns")}}, {},
                 {node(ids::Namespace, {{"name", std::string("inner")}})})})));
  auto bad = edited(doc, [](json& j) {
    auto& inner = j["root"]["cardinal"][0]["cardinal"][0];
    inner["concept"] = "MemberVariable";
    inner["named"] = json{{"Type", json{{"concept", "TypeReference"}, {"properties", {{"type", "int"}}}}}};
  });
  auto e = error_of([&] { load(bad, wb.registry()); });
  CHECK(e.code() == ErrorCode::StructuralViolation);
  CHECK(std::string(e.what()).find("'0.0'") != std::string::npos);
}

TEST_CASE("a different language only warns") {
  Workbench plain;
  Workbench extended(register_fixture_concepts);
  const auto doc = save(Model::from_value(plain.registry(), fib_program()));
  auto loaded = load(doc, extended.registry());
  REQUIRE(loaded.warnings.size() == 1);
  CHECK(loaded.warnings.front().find("fingerprint") != std::string::npos);
  auto unmarked = load(edited(doc, [](json& j) { j.erase("language_fingerprint"); }), plain.registry());
  CHECK(unmarked.warnings.size() == 1);
}

TEST_CASE("node values and files") {
  auto v = fib_program();
  CHECK(parse_value(save_value(v)) == v);
  CHECK_THROWS_AS(parse_value("{\"concept\": 3}"), Error);

  const auto dir = std::filesystem::temp_directory_path() / "martta-persistence-test";
  std::filesystem::create_directories(dir);
  const auto file = (dir / ("fib" + std::string(kDocumentExtension))).string();
  Workbench wb;
  const auto text = save(Model::from_value(wb.registry(), v));
  write_file(file, text);
  CHECK(read_file(file) == text);
  std::filesystem::remove_all(dir);
  CHECK(error_of([&] { read_file(file); }).code() == ErrorCode::MalformedDocument);
}
