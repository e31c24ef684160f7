#include "martta/input.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "martta/error.hpp"

namespace martta {

// ---------------------------------------------------------------------------
// tokens

namespace {

const std::vector<std::string> kEngineTokens{"<undo>", "<redo>", "<escape>", "<edit>", "<up>",
                                             "<down>", "<left>", "<right>", "<backspace>"};

bool is_engine_token(std::string_view token) {
  return std::find(kEngineTokens.begin(), kEngineTokens.end(), token) != kEngineTokens.end();
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 0;
}

bool is_word_char(std::string_view token) {
  if (token.size() != 1) return false;
  unsigned char c = token[0];
  return std::isalnum(c) != 0 || c == '_';
}

}  // namespace

const std::vector<std::string>& control_tokens() {
  static const std::vector<std::string> tokens = [] {
    auto all = kEngineTokens;
    for (const char* t : {"<enter>", "<delete>", "<tab>", "<space>"}) all.emplace_back(t);
    return all;
  }();
  return tokens;
}

std::vector<std::string> token_vocabulary() {
  auto out = control_tokens();
  for (char c = 0x21; c < 0x7F; ++c) out.emplace_back(1, c);
  return out;
}

bool is_printable_token(std::string_view token) {
  if (token.empty()) return false;
  auto lead = static_cast<unsigned char>(token[0]);
  auto length = utf8_length(lead);
  if (length == 0 || token.size() != length) return false;
  if (length == 1) return lead > 0x20 && lead < 0x7F;
  for (std::size_t i = 1; i < length; ++i)
    if ((static_cast<unsigned char>(token[i]) & 0xC0) != 0x80) return false;
  return true;
}

bool is_valid_token(std::string_view token) {
  const auto& controls = control_tokens();
  if (std::find(controls.begin(), controls.end(), token) != controls.end()) return true;
  return is_printable_token(token);
}

std::vector<std::string> parse_script(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  std::size_t line = 1;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto token = text.substr(start, end - start);
    if (!is_valid_token(token))
      fail(ErrorCode::InvalidToken, "line " + std::to_string(line) + ": '" + std::string(token) + "'");
    tokens.emplace_back(token);
    start = end + 1;
    ++line;
  }
  return tokens;
}

std::string format_script(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += t + "\n";
  return out;
}

std::string_view editor_kind_name(EditorKind kind) noexcept {
  switch (kind) {
    case EditorKind::IntegerEditable:
      return "IntegerEditable";
    case EditorKind::CompletionListEditable:
      return "CompletionListEditable";
    case EditorKind::TextEditable:
      return "TextEditable";
  }
  return "?";
}

std::string_view outcome_name(OutcomeKind kind) noexcept {
  switch (kind) {
    case OutcomeKind::Applied:
      return "Applied";
    case OutcomeKind::Provisional:
      return "Provisional";
    case OutcomeKind::Replaced:
      return "Replaced";
    case OutcomeKind::Ignored:
      return "Ignored";
    case OutcomeKind::EditDelegated:
      return "EditDelegated";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// default edit support

std::vector<ConceptId> EditSupport::keyword_concepts(const Model& model, const NodePath& path, std::string_view word) {
  std::vector<ConceptId> out;
  if (path.is_root() || !model.is_placeholder(path)) return out;
  const auto& registry = model.registry();
  for (const auto& id : registry.derived_concepts(model.concept_at(path))) {
    const auto& desc = registry.descriptor(id);
    if (std::find(desc.keywords.begin(), desc.keywords.end(), word) == desc.keywords.end()) continue;
    if (model.admits(path.parent(), path.back(), id)) out.push_back(id);
  }
  return out;
}

std::vector<std::string> EditSupport::keywords_at(const Model& model, const NodePath& path) {
  std::set<std::string> words;
  if (path.is_root() || !model.is_placeholder(path)) return {};
  const auto& registry = model.registry();
  for (const auto& id : registry.derived_concepts(model.concept_at(path))) {
    const auto& desc = registry.descriptor(id);
    if (desc.keywords.empty() || !model.admits(path.parent(), path.back(), id)) continue;
    words.insert(desc.keywords.begin(), desc.keywords.end());
  }
  return {words.begin(), words.end()};
}

std::optional<EditSession> EditSupport::open(const Model& model, const NodePath& path) const {
  if (keywords_at(model, path).empty()) return std::nullopt;
  EditSession session;
  session.target = path;
  session.kind = EditorKind::CompletionListEditable;
  return session;
}

std::vector<std::string> EditSupport::candidates(const Model& model, const EditSession& session) const {
  if (session.kind != EditorKind::CompletionListEditable) return {};
  return keywords_at(model, session.target);
}

bool EditSupport::is_draft_char(const EditSession& session, std::string_view token) const {
  if (session.kind == EditorKind::IntegerEditable)
    return token.size() == 1 && std::isdigit(static_cast<unsigned char>(token[0]));
  return is_word_char(token);
}

void EditSupport::commit(ActionContext& context, const EditSession& session) const {
  auto& model = context.model;
  switch (session.kind) {
    case EditorKind::IntegerEditable: {
      const bool digits = !session.draft.empty() && std::all_of(session.draft.begin(), session.draft.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
      });
      if (!digits || session.draft.size() > 18) fail(ErrorCode::InvalidDraft, "'" + session.draft + "' is not an integer");
      model.set_property(session.target, session.property.empty() ? "value" : session.property,
                         static_cast<std::int64_t>(std::stoll(session.draft)));
      return;
    }
    case EditorKind::TextEditable:
      model.set_property(session.target, session.property.empty() ? "text" : session.property, session.draft);
      return;
    case EditorKind::CompletionListEditable: {
      auto matches = keyword_concepts(model, session.target, session.draft);
      if (matches.empty()) fail(ErrorCode::UnknownKeyword, "'" + session.draft + "'");
      if (matches.size() > 1) fail(ErrorCode::AmbiguousKeyword, "'" + session.draft + "'");
      auto at = model.replace_node(session.target, matches.front());
      model.move_focus(first_placeholder(model, at));
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// actions and keymap

void ActionTable::add(std::string id, ActionEffect effect) {
  if (actions_.contains(id)) fail(ErrorCode::DuplicateId, "action " + id);
  auto key = id;
  actions_.emplace(std::move(key), Action{std::move(id), std::move(effect)});
}

bool ActionTable::contains(std::string_view id) const { return actions_.find(id) != actions_.end(); }

const Action& ActionTable::get(std::string_view id) const {
  auto it = actions_.find(id);
  if (it == actions_.end()) fail(ErrorCode::UnknownAction, std::string(id));
  return it->second;
}

std::vector<std::string> ActionTable::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, action] : actions_) out.push_back(id);
  return out;
}

std::size_t Keymap::bind(const Registry& registry, const ActionTable& actions, const ConceptId& concept_id,
                         std::vector<std::string> keys, std::string action_id, Applicability applies) {
  if (!registry.sealed()) fail(ErrorCode::RegistryNotSealed, "bind after sealing the registry");
  if (!registry.contains(concept_id)) fail(ErrorCode::UnknownConcept, concept_id.str());
  if (!actions.contains(action_id)) fail(ErrorCode::UnknownAction, action_id);
  if (keys.empty()) fail(ErrorCode::InvalidToken, "empty key sequence");
  for (const auto& key : keys)
    if (!is_valid_token(key) || is_engine_token(key)) fail(ErrorCode::InvalidToken, "cannot bind '" + key + "'");
  for (const auto& existing : bindings_)
    if (existing.concept_id == concept_id && existing.keys == keys)
      fail(ErrorCode::DuplicateBinding, concept_id.str() + " already binds " + format_script(keys));
  bindings_.push_back(Binding{next_id_, concept_id, std::move(keys), std::move(action_id), std::move(applies)});
  return next_id_++;
}

void Keymap::bind_descriptors(const Registry& registry, const ActionTable& actions) {
  for (const auto& desc : registry.concepts())
    for (const auto& binding : desc.action_bindings) bind(registry, actions, desc.id, binding.keys, binding.action_id);
}

bool Keymap::unbind(const ConceptId& concept_id, const std::vector<std::string>& keys) {
  auto it = std::find_if(bindings_.begin(), bindings_.end(),
                         [&](const Binding& b) { return b.concept_id == concept_id && b.keys == keys; });
  if (it == bindings_.end()) return false;
  bindings_.erase(it);
  return true;
}

void Keymap::collect(const Model& model, const NodePath& focus, const ConceptId& concept_id,
                     std::vector<const Binding*>& out) const {
  for (const auto& binding : bindings_)
    if (binding.concept_id == concept_id && (!binding.applies || binding.applies(model, focus))) out.push_back(&binding);
}

std::vector<const Binding*> Keymap::derived_bindings(const Model& model, const NodePath& focus) const {
  std::vector<const Binding*> out;
  if (!model.is_placeholder(focus)) return out;
  const auto& concept_id = model.concept_at(focus);
  for (const auto& derived : model.registry().derived_concepts(concept_id))
    if (derived != concept_id) collect(model, focus, derived, out);
  return out;
}

std::vector<const Binding*> Keymap::applicable(const Model& model, const NodePath& focus) const {
  std::vector<const Binding*> out;
  for (const auto& ancestor : model.registry().lineage(model.concept_at(focus))) collect(model, focus, ancestor, out);
  auto derived = derived_bindings(model, focus);
  out.insert(out.end(), derived.begin(), derived.end());
  return out;
}

// ---------------------------------------------------------------------------
// deltas

NodePath first_placeholder(const Model& model, const NodePath& path) {
  std::vector<NodePath> stack{model.resolve(path)};
  while (!stack.empty()) {
    auto current = std::move(stack.back());
    stack.pop_back();
    if (model.is_placeholder(current)) return current;
    auto kids = model.normal_children(current);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return model.resolve(path);
}

namespace {

std::optional<NodePath> difference_below(const NodeValue& a, const NodeValue& b, const NodePath& path) {
  if (a == b) return std::nullopt;
  if (a.concept_id != b.concept_id || a.properties != b.properties || a.reroute != b.reroute || a.tagged != b.tagged ||
      a.cardinal.size() != b.cardinal.size() || a.named.size() != b.named.size())
    return path;
  std::optional<ChildIndex> differing;
  auto ia = a.named.begin();
  auto ib = b.named.begin();
  for (; ia != a.named.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return path;
    if (ia->second != ib->second) {
      if (differing) return path;
      differing = ChildIndex::named(ia->first);
    }
  }
  for (std::size_t i = 0; i < a.cardinal.size(); ++i) {
    if (a.cardinal[i] != b.cardinal[i]) {
      if (differing) return path;
      differing = ChildIndex::cardinal(i);
    }
  }
  if (!differing) return path;
  if (differing->is_named())
    return difference_below(a.named.at(differing->slot()), b.named.at(differing->slot()), path.child(*differing));
  return difference_below(a.cardinal[differing->position()], b.cardinal[differing->position()], path.child(*differing));
}

const NodeValue& value_at(const NodeValue& root, const NodePath& path) {
  const NodeValue* current = &root;
  for (const auto& step : path.steps())
    current = step.is_named() ? &current->named.at(step.slot()) : &current->cardinal.at(step.position());
  return *current;
}

}  // namespace

std::optional<NodePath> deepest_difference(const NodeValue& before, const NodeValue& after) {
  return difference_below(before, after, {});
}

// ---------------------------------------------------------------------------
// editor

Editor::Editor(Model model, const ActionTable& actions, const Keymap& keymap, const EditSupport& edits)
    : model_(std::move(model)), actions_(&actions), keymap_(&keymap), edits_(&edits) {}

void Editor::reset(Model model) {
  clear_buffer();
  session_.reset();
  undo_.clear();
  redo_.clear();
  model_ = std::move(model);
}

std::optional<ActionRecord> Editor::record(std::string action_id, std::vector<std::string> keys,
                                           const NodePath& target, const NodeValue& before,
                                           const NodePath& focus_before) {
  auto after = model_.extract({});
  auto path = deepest_difference(before, after);
  if (!path) return std::nullopt;
  ActionRecord r;
  r.action_id = std::move(action_id);
  r.keys = std::move(keys);
  r.target = target;
  r.forward = Delta{*path, value_at(after, *path), model_.focus()};
  r.inverse = Delta{*path, value_at(before, *path), focus_before};
  r.timestamp = ++clock_;
  undo_.push_back(r);
  redo_.clear();
  return r;
}

void Editor::begin_buffer() {
  snapshot_.clear();
  for (const auto* binding : keymap_->applicable(model_, model_.focus())) snapshot_.push_back(*binding);
  base_ = model_;
  buffer_target_ = model_.focus();
  provisional_.reset();
}

void Editor::clear_buffer() {
  pending_.clear();
  snapshot_.clear();
  base_.reset();
  provisional_.reset();
}

void Editor::commit_buffer() {
  if (provisional_ && base_) {
    std::vector<std::string> keys(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(provisional_->length));
    auto next = provisional_->next_session;
    record(provisional_->action_id, std::move(keys), buffer_target_, base_->extract({}), base_->focus());
    clear_buffer();
    if (next) open_session(std::move(*next));
    return;
  }
  clear_buffer();
}

const Binding* Editor::exact_match(const std::vector<std::string>& keys) const {
  for (const auto& binding : snapshot_)
    if (binding.keys == keys) return &binding;
  return nullptr;
}

bool Editor::has_longer(const std::vector<std::string>& keys) const {
  for (const auto& binding : snapshot_)
    if (binding.keys.size() > keys.size() && std::equal(keys.begin(), keys.end(), binding.keys.begin())) return true;
  return false;
}

Editor::Attempt Editor::attempt(const std::string& action_id) {
  Model backup = model_;
  ActionContext context{model_, buffer_target_};
  try {
    actions_->get(action_id).effect(context);
  } catch (const Error&) {
    model_ = std::move(backup);
    return {};
  }
  return {true, std::move(context.next_session)};
}

KeyOutcome Editor::key_event(const std::string& key) {
  if (!is_valid_token(key)) return {};
  if (session_) return session_key(key);
  if (is_engine_token(key)) {
    resolve_buffer();
    if (session_) return session_key(key);
    return control_key(key);
  }
  return dispatch(key);
}

KeyOutcome Editor::dispatch(const std::string& key) {
  if (pending_.empty()) begin_buffer();
  auto keys = pending_;
  keys.push_back(key);
  const Binding* exact = exact_match(keys);
  const bool longer = has_longer(keys);

  if (exact && !longer) {
    Model current = model_;
    const bool had = provisional_.has_value();
    std::string undone = had ? provisional_->action_id : "";
    if (had) model_ = *base_;
    auto result = attempt(exact->action_id);
    if (result.ok) {
      pending_ = keys;
      provisional_ = Provisional{exact->action_id, keys.size(), std::move(result.next_session)};
      std::string applied = exact->action_id;
      commit_buffer();
      if (had) return {OutcomeKind::Replaced, applied, undone};
      return {OutcomeKind::Applied, applied, {}};
    }
    model_ = std::move(current);
    // Fall through as if nothing matched, keeping any provisional.
  } else if (longer) {
    pending_ = keys;
    if (!exact) return {OutcomeKind::Provisional, provisional_ ? provisional_->action_id : "", {}};
    Model current = model_;
    const bool had = provisional_.has_value();
    std::string undone = had ? provisional_->action_id : "";
    if (had) model_ = *base_;
    auto result = attempt(exact->action_id);
    if (!result.ok) {
      model_ = std::move(current);
      return {OutcomeKind::Provisional, had ? undone : "", {}};
    }
    provisional_ = Provisional{exact->action_id, keys.size(), std::move(result.next_session)};
    return {OutcomeKind::Provisional, exact->action_id, undone};
  }

  if (pending_.empty()) {
    clear_buffer();
    return fallback(key);
  }
  std::vector<std::string> rest;
  if (provisional_) {
    rest.assign(pending_.begin() + static_cast<std::ptrdiff_t>(provisional_->length), pending_.end());
    commit_buffer();
  } else {
    auto first = pending_.front();
    rest.assign(pending_.begin() + 1, pending_.end());
    clear_buffer();
    fallback(first);
  }
  rest.push_back(key);
  KeyOutcome last;
  for (const auto& k : rest) last = key_event(k);
  return last;
}

void Editor::resolve_buffer() {
  while (!pending_.empty()) {
    std::vector<std::string> rest;
    if (provisional_) {
      rest.assign(pending_.begin() + static_cast<std::ptrdiff_t>(provisional_->length), pending_.end());
      commit_buffer();
    } else {
      auto first = pending_.front();
      rest.assign(pending_.begin() + 1, pending_.end());
      clear_buffer();
      fallback(first);
    }
    for (const auto& k : rest) key_event(k);
  }
}

KeyOutcome Editor::fallback(const std::string& key) {
  if (!is_printable_token(key)) return {};
  auto session = edits_->open(model_, model_.focus());
  if (!session || !edits_->is_draft_char(*session, key)) return {};
  open_session(std::move(*session));
  return session_key(key);
}

void Editor::open_session(EditSession session) {
  if (session.original.empty()) session.original = session.draft;
  session_ = std::move(session);
  refresh_completions();
}

void Editor::refresh_completions() {
  if (!session_) return;
  auto all = edits_->candidates(model_, *session_);
  std::vector<std::string> shown;
  for (auto& word : all)
    if (word.starts_with(session_->draft)) shown.push_back(std::move(word));
  std::sort(shown.begin(), shown.end());
  shown.erase(std::unique(shown.begin(), shown.end()), shown.end());
  session_->completions = std::move(shown);
}

KeyOutcome Editor::session_key(const std::string& key) {
  auto& session = *session_;
  if (key == "<escape>") {
    session_.reset();
    return {OutcomeKind::EditDelegated, "cancel-edit", {}};
  }
  if (key == "<undo>" || key == "<redo>") {
    session_.reset();
    return control_key(key);
  }
  if (key == "<enter>") {
    try {
      commit_edit();
    } catch (const Error&) {
      return {};
    }
    return {OutcomeKind::Applied, "commit-edit", {}};
  }
  if (key == "<backspace>") {
    auto& draft = session.draft;
    while (!draft.empty() && (static_cast<unsigned char>(draft.back()) & 0xC0) == 0x80) draft.pop_back();
    if (!draft.empty()) draft.pop_back();
    refresh_completions();
    return {OutcomeKind::EditDelegated, "draft", {}};
  }
  const std::string ch = key == "<space>" ? " " : key;
  if (edits_->is_draft_char(session, ch)) {
    session.draft += ch;
    refresh_completions();
    return {OutcomeKind::EditDelegated, "draft", {}};
  }
  try {
    commit_edit();
  } catch (const Error&) {
    return {};
  }
  return key_event(key);
}

KeyOutcome Editor::control_key(const std::string& key) {
  if (key == "<undo>") return undo() ? KeyOutcome{OutcomeKind::Applied, "undo", {}} : KeyOutcome{};
  if (key == "<redo>") return redo() ? KeyOutcome{OutcomeKind::Applied, "redo", {}} : KeyOutcome{};
  if (key == "<edit>") {
    try {
      enter_edit(model_.focus());
    } catch (const Error&) {
      return {};
    }
    return {OutcomeKind::EditDelegated, "enter-edit", {}};
  }
  static const std::map<std::string, std::pair<FocusMove, const char*>> moves{
      {"<up>", {FocusMove::Parent, "focus-parent"}},
      {"<down>", {FocusMove::FirstChild, "focus-first-child"}},
      {"<left>", {FocusMove::PrevSibling, "focus-previous"}},
      {"<right>", {FocusMove::NextSibling, "focus-next"}},
  };
  if (auto it = moves.find(key); it != moves.end()) {
    try {
      move_focus(it->second.first);
    } catch (const Error&) {
      return {};
    }
    return {OutcomeKind::Applied, it->second.second, {}};
  }
  return {};
}

void Editor::prune_tags() {
  auto focus = model_.focus();
  for (const auto& path : model_.tagged_paths())
    if (!focus.starts_with(path)) model_.set_tagged(path, false);
}

NodePath Editor::move_focus(const NodePath& path) {
  auto at = model_.move_focus(path);
  prune_tags();
  return at;
}

NodePath Editor::move_focus(FocusMove move) {
  auto at = model_.move_focus(move);
  prune_tags();
  return at;
}

void Editor::flush() {
  resolve_buffer();
  if (!session_) return;
  try {
    commit_edit();
  } catch (const Error&) {
    session_.reset();
  }
}

std::vector<KeyOutcome> Editor::feed(const std::vector<std::string>& keys, bool flush_at_end) {
  std::vector<KeyOutcome> out;
  out.reserve(keys.size());
  for (const auto& key : keys) out.push_back(key_event(key));
  if (flush_at_end) flush();
  return out;
}

void Editor::feed_atomic(const std::vector<std::string>& keys) {
  for (const auto& key : keys)
    if (!is_valid_token(key)) fail(ErrorCode::InvalidToken, "not a key token: '" + key + "'");
  resolve_buffer();
  std::size_t i = 0;
  while (i < keys.size()) {
    const auto& key = keys[i];
    if (session_ && is_printable_token(key) && !edits_->is_draft_char(*session_, key)) {
      // The key ends the session; it then starts a sequence of its own.
      try {
        commit_edit();
      } catch (const Error&) {
        ++i;
      }
      continue;
    }
    if (session_ || is_engine_token(key)) {
      key_event(key);
      ++i;
      continue;
    }
    auto candidates = keymap_->applicable(model_, model_.focus());
    std::vector<const Binding*> matching;
    for (const auto* binding : candidates) {
      const auto& bk = binding->keys;
      if (bk.size() <= keys.size() - i && std::equal(bk.begin(), bk.end(), keys.begin() + static_cast<std::ptrdiff_t>(i)))
        matching.push_back(binding);
    }
    // Longest first; among equal lengths the first applicable binding wins.
    std::stable_sort(matching.begin(), matching.end(),
                     [](const Binding* a, const Binding* b) { return a->keys.size() > b->keys.size(); });
    bool applied = false;
    std::set<std::size_t> tried;
    for (const auto* binding : matching) {
      if (!tried.insert(binding->keys.size()).second) continue;
      buffer_target_ = model_.focus();
      auto before = model_.extract({});
      auto focus_before = model_.focus();
      auto result = attempt(binding->action_id);
      if (!result.ok) continue;
      record(binding->action_id, binding->keys, buffer_target_, before, focus_before);
      if (result.next_session) open_session(std::move(*result.next_session));
      i += binding->keys.size();
      applied = true;
      break;
    }
    if (!applied) {
      fallback(key);
      ++i;
    }
  }
  flush();
}

std::optional<ActionRecord> Editor::undo() {
  resolve_buffer();
  session_.reset();
  if (undo_.empty()) return std::nullopt;
  auto r = undo_.back();
  undo_.pop_back();
  model_.implant(r.inverse.path, r.inverse.subtree);
  model_.move_focus(model_.exists(r.inverse.focus) ? r.inverse.focus : NodePath{});
  redo_.push_back(r);
  return r;
}

std::optional<ActionRecord> Editor::redo() {
  resolve_buffer();
  session_.reset();
  if (redo_.empty()) return std::nullopt;
  auto r = redo_.back();
  redo_.pop_back();
  model_.implant(r.forward.path, r.forward.subtree);
  model_.move_focus(model_.exists(r.forward.focus) ? r.forward.focus : NodePath{});
  undo_.push_back(r);
  return r;
}

const EditSession& Editor::enter_edit(const NodePath& path) {
  resolve_buffer();
  auto session = edits_->open(model_, path);
  if (!session) fail(ErrorCode::NotEditable, model_.concept_at(path).str() + " at '" + path.to_string() + "'");
  session_.reset();
  model_.move_focus(path);
  open_session(std::move(*session));
  return *session_;
}

void Editor::set_draft(std::string draft) {
  if (!session_) fail(ErrorCode::NoEditSession, "no edit session is active");
  session_->draft = std::move(draft);
  refresh_completions();
}

void Editor::cancel_edit() {
  if (!session_) fail(ErrorCode::NoEditSession, "no edit session is active");
  session_.reset();
}

std::optional<ActionRecord> Editor::commit_edit() {
  if (!session_) fail(ErrorCode::NoEditSession, "no edit session is active");
  EditSession session = *session_;
  auto before = model_.extract({});
  auto focus_before = model_.focus();
  Model backup = model_;
  ActionContext context{model_, session.target};
  try {
    edits_->commit(context, session);
  } catch (...) {
    model_ = std::move(backup);
    throw;
  }
  session_.reset();
  auto r = record("commit-edit", {}, session.target, before, focus_before);
  if (context.next_session) open_session(std::move(*context.next_session));
  return r;
}

std::optional<ActionRecord> Editor::perform(const std::string& action_id, const ActionEffect& effect,
                                            std::optional<NodePath> target) {
  flush();
  auto before = model_.extract({});
  auto focus_before = model_.focus();
  Model backup = model_;
  ActionContext context{model_, target.value_or(model_.focus())};
  try {
    effect(context);
  } catch (...) {
    model_ = std::move(backup);
    throw;
  }
  auto r = record(action_id, {}, context.target, before, focus_before);
  if (context.next_session) open_session(std::move(*context.next_session));
  return r;
}

}  // namespace martta
