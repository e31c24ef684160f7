#include "martta/render.hpp"

#include <algorithm>
#include <cctype>

#include "martta/error.hpp"
#include "martta/lang.hpp"

namespace martta {

std::string_view identifier_style_name(IdentifierStyle style) noexcept {
  return style == IdentifierStyle::CamelCase ? "camel" : "underscore";
}

IdentifierStyle parse_identifier_style(std::string_view name) {
  if (name == "camel" || name == "CamelCase") return IdentifierStyle::CamelCase;
  if (name == "underscore" || name == "Underscore") return IdentifierStyle::Underscore;
  fail(ErrorCode::InvalidDescriptor, "unknown identifier style '" + std::string(name) + "'");
}

std::string style_identifier(std::string_view name, IdentifierStyle style) {
  std::string out;
  if (style == IdentifierStyle::Underscore) {
    for (std::size_t i = 0; i < name.size(); ++i) {
      unsigned char c = name[i];
      if (std::isupper(c)) {
        if (i > 0 && name[i - 1] != '_') out += '_';
        out += static_cast<char>(std::tolower(c));
      } else {
        out += static_cast<char>(c);
      }
    }
    return out;
  }
  bool upper = false;
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (c == '_' && i > 0 && i + 1 < name.size()) {
      upper = true;
      continue;
    }
    out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    upper = false;
  }
  return out;
}

std::string Stylist::css_class(const std::string& role) const {
  auto it = palette.find(role);
  return it != palette.end() ? it->second : "r-" + role;
}

std::string element_id(const NodePath& path) { return "n-" + path.to_string(); }

bool is_foldable(const Model& model, const NodePath& path) {
  if (!model.exists(path)) return false;
  const auto& c = model.concept_at(path);
  return c == cpp::ids::CompoundStatement || model.registry().descriptor(c).named_slot("Body") != nullptr;
}

FoldState toggle_fold(const Model& model, const FoldState& state, const NodePath& path) {
  if (!is_foldable(model, path))
    fail(ErrorCode::NotFoldable, (model.exists(path) ? model.concept_at(path).str() : "nothing") + " at '" +
                                     path.to_string() + "' has no body");
  FoldState out = state;
  if (!out.erase(path)) out.insert(path);
  return out;
}

const std::string& stylesheet() {
  static const std::string css = R"(body { font-family: monospace; white-space: pre; }
.node.focus { outline: 1px solid #36c; }
.placeholder { color: #888; background: #eee; }
.sem-error { text-decoration: underline dashed red; }
.incomplete { background: #f4f4f4; }
.tagged { background: #dfd; }
.tag-paren { color: #393; }
.paren { color: #555; }
.folded { color: #888; font-style: italic; }
.fallback { border: 1px dotted #999; display: inline-block; }
.r-keyword { color: #808; font-weight: bold; }
.r-type { color: #066; }
.r-identifier { color: #000; }
.r-literal { color: #a50; }
.r-operator { color: #333; }
)";
  return css;
}

namespace {

namespace ids = cpp::ids;

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

class Renderer {
 public:
  Renderer(const Model& model, const Stylist& stylist, const FoldState& folds, RenderedView& view)
      : m_(model), s_(stylist), folds_(folds), view_(view) {
    for (const auto& d : model.validate_structure()) add_mark(d.node_path, "structural-error");
    for (const auto& d : cpp::check_semantics(model))
      add_mark(d.node_path, d.severity == Severity::SemanticError ? "sem-error" : "incomplete");
    focus_ = model.resolve(model.focus());
  }

  std::string document() {
    out_ = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Martta</title>\n<style>\n" + stylesheet() +
           "</style>\n</head>\n<body class=\"style-" + std::string(identifier_style_name(s_.identifier_style)) +
           (s_.always_parenthesize_operations ? " always-paren" : "") + "\">\n";
    any(m_.resolve({}), 0);
    out_ += "\n<script>\n" + script() + "</script>\n</body>\n</html>\n";
    return std::move(out_);
  }

 private:
  static std::string script() {
    return R"(document.addEventListener('keydown', function (e) {
  if (window.marttaKey) { window.marttaKey(e); }
});
document.addEventListener('dblclick', function (e) {
  var el = e.target.closest('[data-foldable]');
  if (el && window.marttaFold) { window.marttaFold(el.getAttribute('data-path')); }
});
)";
  }

  void add_mark(const NodePath& path, const std::string& cls) {
    auto& list = view_.diagnostics_markup[element_id(path)];
    if (std::find(list.begin(), list.end(), cls) == list.end()) list.push_back(cls);
  }

  std::string classes(const NodePath& p, const std::string& extra = {}) {
    std::string cls = "node c-" + m_.concept_at(p).str();
    if (!extra.empty()) cls += " " + extra;
    if (m_.is_placeholder(p)) cls += " placeholder";
    if (m_.tagged(p)) cls += " tagged";
    if (p == focus_) cls += " focus";
    if (auto it = view_.diagnostics_markup.find(element_id(p)); it != view_.diagnostics_markup.end())
      for (const auto& c : it->second) cls += " " + c;
    return cls;
  }

  void open(const NodePath& p, const char* tag, const std::string& extra = {}) {
    out_ += "<" + std::string(tag) + " id=\"" + element_id(p) + "\" class=\"" + classes(p, extra) + "\" data-path=\"" +
            escape(p.to_string()) + "\"";
    if (is_foldable(m_, p)) {
      out_ += " data-foldable=\"1\"";
      view_.foldable_ids.insert(element_id(p));
    }
    out_ += ">";
  }

  void role(const std::string& r, std::string_view text) {
    out_ += "<span class=\"" + s_.css_class(r) + "\">" + escape(text) + "</span>";
  }
  void keyword(std::string_view text) { role("keyword", text); }
  void punct(std::string_view text) { out_ += escape(text); }
  void name(const std::string& text) { role("identifier", style_identifier(text, s_.identifier_style)); }
  void newline(int depth) {
    out_ += "\n";
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
  }

  void placeholder(const NodePath& p) {
    out_ += "<span id=\"" + element_id(p) + "\" class=\"" + classes(p) + "\" data-path=\"" + escape(p.to_string()) +
            "\" title=\"" + m_.concept_at(p).str() + "\">" + escape(s_.placeholder_marker) + "</span>";
  }

  /// Dispatch on what the node is.
  void any(const NodePath& raw, int depth) {
    const auto p = m_.resolve(raw);
    if (!m_.kind_of_at(p, ids::WebViewable) && !m_.is_placeholder(p)) {
      fallback(p, depth);
      return;
    }
    const auto& c = m_.concept_at(p);
    if (c == ids::CppProgram || m_.strong_kind_at(p, ids::Program)) {
      open(p, "div", "program");
      for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
        if (i) out_ += "\n\n";
        any(p.child(i), depth);
      }
      out_ += "</div>";
    } else if (m_.strong_kind_at(p, ids::Declaration)) {
      declaration(p, depth);
    } else if (m_.strong_kind_at(p, ids::Statement)) {
      statement(p, depth);
    } else if (c == ids::TypeReference) {
      type(p);
    } else {
      fallback(p, depth);
    }
  }

  void fallback(const NodePath& p, int depth) {
    open(p, "div", "fallback");
    out_ += "<dl><dt>concept</dt><dd>" + escape(m_.concept_at(p).str()) + "</dd>";
    for (const auto& [key, value] : m_.extract(p).properties)
      out_ += "<dt>" + escape(key) + "</dt><dd>" + escape(describe(value)) + "</dd>";
    out_ += "</dl>";
    auto kids = m_.normal_children(p);
    if (!kids.empty()) {
      out_ += "<div class=\"children\">";
      for (const auto& k : kids) any(k, depth + 1);
      out_ += "</div>";
    }
    out_ += "</div>";
  }

  void type(const NodePath& raw) {
    const auto p = m_.resolve(raw);
    open(p, "span");
    auto text = m_.text_property(p, "type");
    if (text.empty())
      out_ += escape(s_.placeholder_marker);
    else
      role("type", text);
    out_ += "</span>";
  }

  void declaration(const NodePath& p, int depth) {
    const auto& c = m_.concept_at(p);
    const auto n = cpp::declaration_name(m_, p);
    open(p, "div", "declaration");
    if (c == ids::Function) {
      type(p.child("Returned"));
      punct(" ");
      name(n);
      punct("(");
      for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
        if (i) punct(", ");
        auto arg = m_.resolve(p.child(i));
        open(arg, "span");
        type(arg.child("Type"));
        punct(" ");
        name(cpp::declaration_name(m_, arg));
        out_ += "</span>";
      }
      punct(") ");
      if (folds_.contains(p))
        folded(m_.resolve(p.child("Body")));
      else
        block(p.child("Body"), depth);
    } else if (m_.kind_of_at(p, ids::Variable)) {
      variable(p);
      punct(";");
    } else if (m_.kind_of_at(p, ids::Enumeration)) {
      keyword("enum");
      punct(" ");
      name(n);
      punct(" {");
      for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
        punct(i ? ", " : " ");
        auto e = m_.resolve(p.child(i));
        open(e, "span");
        name(cpp::declaration_name(m_, e));
        out_ += "</span>";
      }
      punct(m_.cardinal_count(p) ? " };" : "};");
    } else if (c == ids::Class || c == ids::Namespace) {
      keyword(c == ids::Class ? "class" : "namespace");
      punct(" ");
      name(n);
      punct(" {");
      for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
        newline(depth + 1);
        any(p.child(i), depth + 1);
      }
      newline(depth);
      punct(c == ids::Class ? "};" : "}");
    } else {
      name(n);
    }
    out_ += "</div>";
  }

  void variable(const NodePath& p) {
    type(p.child("Type"));
    punct(" ");
    name(cpp::declaration_name(m_, p));
    if (m_.has_child(p, ChildIndex::named("Initializer"))) {
      punct(" = ");
      expression(p.child("Initializer"));
    }
  }

  void folded(const NodePath& p) {
    out_ += "<span id=\"" + element_id(p) + "\" class=\"" + classes(p, "folded") + "\" data-path=\"" +
            escape(p.to_string()) + "\" data-foldable=\"1\">{ \xE2\x80\xA6 }</span>";
    view_.foldable_ids.insert(element_id(p));
  }

  void block(const NodePath& raw, int depth) {
    const auto p = m_.resolve(raw);
    if (folds_.contains(p)) {
      folded(p);
      return;
    }
    open(p, "span", "block");
    punct("{");
    for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
      newline(depth + 1);
      statement(p.child(i), depth + 1);
    }
    newline(depth);
    punct("}");
    out_ += "</span>";
  }

  void statement(const NodePath& raw, int depth) {
    const auto p = m_.resolve(raw);
    const auto& c = m_.concept_at(p);
    if (m_.is_placeholder(p)) {
      placeholder(p);
      return;
    }
    if (!m_.kind_of_at(p, ids::WebViewable)) {
      fallback(p, depth);
      return;
    }
    if (c == ids::CompoundStatement) {
      block(p, depth);
      return;
    }
    if (m_.strong_kind_at(p, ids::Expression)) {
      out_ += "<span class=\"statement\">";
      expression(p);
      punct(";");
      out_ += "</span>";
      return;
    }
    open(p, "span", "statement");
    if (c == ids::ReturnStatement) {
      keyword("return");
      punct(" ");
      expression(p.child("Value"));
      punct(";");
    } else if (c == ids::VariableDeclarationStatement) {
      auto v = m_.resolve(p.child("Variable"));
      open(v, "span");
      variable(v);
      out_ += "</span>";
      punct(";");
    } else if (c == ids::IfStatement) {
      keyword("if");
      punct(" (");
      expression(p.child("Condition"));
      punct(") ");
      if (folds_.contains(p))
        folded(m_.resolve(p.child("Body")));
      else
        statement(p.child("Body"), depth);
    } else if (c == ids::ForStatement) {
      keyword("for");
      punct(" (");
      statement(p.child("Init"), depth);
      punct(" ");
      expression(p.child("Condition"));
      punct("; ");
      expression(p.child("Update"));
      punct(") ");
      if (folds_.contains(p))
        folded(m_.resolve(p.child("Body")));
      else
        block(p.child("Body"), depth);
    }
    out_ += "</span>";
  }

  void operand(const NodePath& raw) {
    const auto p = m_.resolve(raw);
    bool parens = cpp::needs_parentheses(m_, raw);
    if (s_.always_parenthesize_operations && cpp::operator_at(m_, p)) parens = true;
    if (parens) out_ += "<span class=\"paren\">(</span>";
    expression(raw);
    if (parens) out_ += "<span class=\"paren\">)</span>";
  }

  void expression(const NodePath& raw) {
    const auto p = m_.resolve(raw);
    const auto& c = m_.concept_at(p);
    if (m_.is_placeholder(p)) {
      if (m_.tagged(p)) out_ += "<span class=\"tag-paren\">(</span>";
      placeholder(p);
      if (m_.tagged(p)) out_ += "<span class=\"tag-paren\">)</span>";
      return;
    }
    if (!m_.kind_of_at(p, ids::WebViewable)) {
      fallback(p, 0);
      return;
    }
    open(p, "span");
    if (m_.tagged(p)) out_ += "<span class=\"tag-paren\">(</span>";
    if (c == ids::IntegerLiteral) {
      auto v = m_.property(p, "value");
      role("literal", v && std::holds_alternative<std::int64_t>(*v) ? std::to_string(std::get<std::int64_t>(*v)) : "0");
    } else if (c == ids::BoolLiteral) {
      auto v = m_.property(p, "value");
      role("literal", v && std::holds_alternative<bool>(*v) && std::get<bool>(*v) ? "true" : "false");
    } else if (c == ids::StringLiteral) {
      role("literal", "\"" + m_.text_property(p, "text") + "\"");
    } else if (c == ids::VariableReference) {
      auto v = m_.property(p, "target");
      const auto* target = v ? std::get_if<NodePath>(&*v) : nullptr;
      if (target && m_.exists(*target))
        name(cpp::declaration_name(m_, m_.resolve(*target)));
      else
        role("identifier", "?");
    } else if (c == ids::Invocation) {
      operand(p.child("Callee"));
      punct("(");
      for (std::size_t i = 0; i < m_.cardinal_count(p); ++i) {
        if (i) punct(", ");
        expression(p.child(i));
      }
      punct(")");
    } else if (auto op = cpp::operator_at(m_, p)) {
      if (op->arity == cpp::Arity::Binary) {
        operand(p.child("Left"));
        punct(" ");
        role("operator", op->symbol);
        punct(" ");
        operand(p.child("Right"));
      } else if (op->arity == cpp::Arity::UnaryPrefix) {
        role("operator", op->symbol);
        operand(p.child("Operand"));
      } else {
        operand(p.child("Operand"));
        role("operator", op->symbol);
      }
    }
    if (m_.tagged(p)) out_ += "<span class=\"tag-paren\">)</span>";
    out_ += "</span>";
  }

  const Model& m_;
  const Stylist& s_;
  const FoldState& folds_;
  RenderedView& view_;
  NodePath focus_;
  std::string out_;
};

}  // namespace

RenderedView render(const Model& model, const Stylist& stylist, const FoldState& folds) {
  RenderedView view;
  Renderer renderer(model, stylist, folds, view);
  view.html = renderer.document();
  view.focus_anchor = element_id(model.resolve(model.focus()));
  return view;
}

}  // namespace martta
