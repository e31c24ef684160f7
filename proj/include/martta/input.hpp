#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "martta/model.hpp"
#include "martta/registry.hpp"

namespace martta {

// ---------------------------------------------------------------------------
// keystroke tokens

/// Angle-bracketed control tokens understood by the engine.
const std::vector<std::string>& control_tokens();
/// Control tokens followed by every printable ASCII character.
std::vector<std::string> token_vocabulary();
/// A control token, or exactly one printable (non-space) UTF-8 character.
bool is_valid_token(std::string_view token);
bool is_printable_token(std::string_view token);
/// One token per line; a trailing newline is allowed. Throws InvalidToken.
std::vector<std::string> parse_script(std::string_view text);
std::string format_script(const std::vector<std::string>& tokens);

// ---------------------------------------------------------------------------
// edit sessions

enum class EditorKind { IntegerEditable, CompletionListEditable, TextEditable };

std::string_view editor_kind_name(EditorKind kind) noexcept;

struct EditSession {
  NodePath target;
  EditorKind kind = EditorKind::CompletionListEditable;
  std::string draft;
  /// Draft at the moment the session opened; escape restores it.
  std::string original;
  std::vector<std::string> completions;
  /// Language-defined role, e.g. "name" or "type"; empty for keyword entry.
  std::string purpose;
  /// Property an Integer or Text session writes on commit.
  std::string property;
};

struct ActionContext {
  Model& model;
  /// Focus at the time the triggering key sequence started.
  NodePath target;
  /// Set by an action that wants an edit session opened once it commits.
  std::optional<EditSession> next_session = std::nullopt;
};

/// The language side of editables: which nodes open sessions, what a draft
/// may contain and what committing it does.
class EditSupport {
 public:
  virtual ~EditSupport() = default;
  /// Session for the node, or nullopt when it is not editable. The default
  /// opens keyword completion on placeholders whose derived concepts
  /// register keywords.
  virtual std::optional<EditSession> open(const Model& model, const NodePath& path) const;
  /// Every word the session can commit, before prefix filtering.
  virtual std::vector<std::string> candidates(const Model& model, const EditSession& session) const;
  virtual bool is_draft_char(const EditSession& session, std::string_view token) const;
  /// Applies the draft. Throws InvalidDraft, UnknownKeyword or AmbiguousKeyword.
  virtual void commit(ActionContext& context, const EditSession& session) const;

  /// Concepts derived from the placeholder at `path`, admitted there, that
  /// register `word` as a keyword.
  static std::vector<ConceptId> keyword_concepts(const Model& model, const NodePath& path, std::string_view word);
  static std::vector<std::string> keywords_at(const Model& model, const NodePath& path);
};

// ---------------------------------------------------------------------------
// actions and bindings

using ActionEffect = std::function<void(ActionContext&)>;
using Applicability = std::function<bool(const Model&, const NodePath&)>;

struct Action {
  std::string id;
  ActionEffect effect;
};

class ActionTable {
 public:
  void add(std::string id, ActionEffect effect);
  bool contains(std::string_view id) const;
  const Action& get(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, Action, std::less<>> actions_;
};

struct Binding {
  std::size_t id = 0;
  ConceptId concept_id;
  std::vector<std::string> keys;
  std::string action_id;
  Applicability applies;
};

class Keymap {
 public:
  /// Errors: RegistryNotSealed, UnknownConcept, UnknownAction, InvalidToken,
  /// DuplicateBinding (same concept and keys).
  std::size_t bind(const Registry& registry, const ActionTable& actions, const ConceptId& concept_id,
                   std::vector<std::string> keys, std::string action_id, Applicability applies = {});
  /// Binds every descriptor's own action_bindings without a predicate.
  void bind_descriptors(const Registry& registry, const ActionTable& actions);
  bool unbind(const ConceptId& concept_id, const std::vector<std::string>& keys);

  /// Bindings that apply with `focus` focused: the focus concept's lineage
  /// first, then (for placeholders) each derived concept in order.
  std::vector<const Binding*> applicable(const Model& model, const NodePath& focus) const;
  /// Only the bindings reached by offering the key to derived concepts.
  std::vector<const Binding*> derived_bindings(const Model& model, const NodePath& focus) const;
  const std::vector<Binding>& bindings() const noexcept { return bindings_; }

 private:
  void collect(const Model& model, const NodePath& focus, const ConceptId& concept_id,
               std::vector<const Binding*>& out) const;

  std::vector<Binding> bindings_;
  std::size_t next_id_ = 1;
};

// ---------------------------------------------------------------------------
// editor

enum class OutcomeKind { Applied, Provisional, Replaced, Ignored, EditDelegated };

std::string_view outcome_name(OutcomeKind kind) noexcept;

struct KeyOutcome {
  OutcomeKind kind = OutcomeKind::Ignored;
  std::string action;
  /// For Replaced: the provisional action that was reverted.
  std::string undone;
};

/// A subtree replacement plus the focus to restore alongside it.
struct Delta {
  NodePath path;
  NodeValue subtree;
  NodePath focus;
};

struct ActionRecord {
  std::string action_id;
  std::vector<std::string> keys;
  NodePath target;
  Delta forward;
  Delta inverse;
  std::uint64_t timestamp = 0;
};

/// First placeholder at or below `path` in normal order, else `path`.
NodePath first_placeholder(const Model& model, const NodePath& path);

/// Deepest path at which the two trees differ, or nullopt when equal.
std::optional<NodePath> deepest_difference(const NodeValue& before, const NodeValue& after);

/// Owns one model and drives it from keystrokes: buffering with longest
/// sequence priority, edit sessions, and the undo and redo stacks.
class Editor {
 public:
  Editor(Model model, const ActionTable& actions, const Keymap& keymap, const EditSupport& edits);

  const Model& model() const noexcept { return model_; }
  const Registry& registry() const noexcept { return model_.registry(); }

  KeyOutcome key_event(const std::string& key);
  /// Resolves the key buffer, then commits (or cancels) any edit session.
  void flush();
  std::vector<KeyOutcome> feed(const std::vector<std::string>& keys, bool flush_at_end = true);
  /// Feeds a whole sequence at once, taking the longest binding at each
  /// step. Used to check that one-at-a-time feeding agrees.
  void feed_atomic(const std::vector<std::string>& keys);

  std::optional<ActionRecord> undo();
  std::optional<ActionRecord> redo();
  const std::vector<ActionRecord>& undo_stack() const noexcept { return undo_; }
  const std::vector<ActionRecord>& redo_stack() const noexcept { return redo_; }

  const std::vector<std::string>& pending_keys() const noexcept { return pending_; }
  bool has_provisional() const noexcept { return provisional_.has_value(); }

  const std::optional<EditSession>& session() const noexcept { return session_; }
  const EditSession& enter_edit(const NodePath& path);
  void set_draft(std::string draft);
  /// Throws NoEditSession or the language's draft errors; the session then
  /// stays open. Returns nullopt when the commit changed nothing.
  std::optional<ActionRecord> commit_edit();
  void cancel_edit();

  /// Runs an effect as one committed, undoable action.
  std::optional<ActionRecord> perform(const std::string& action_id, const ActionEffect& effect,
                       std::optional<NodePath> target = std::nullopt);
  NodePath move_focus(const NodePath& path);
  NodePath move_focus(FocusMove move);
  /// Replaces the model wholesale and clears all stacks.
  void reset(Model model);

 private:
  struct Provisional {
    std::string action_id;
    std::size_t length = 0;
    std::optional<EditSession> next_session;
  };
  struct Attempt {
    bool ok = false;
    std::optional<EditSession> next_session;
  };

  KeyOutcome dispatch(const std::string& key);
  KeyOutcome session_key(const std::string& key);
  KeyOutcome control_key(const std::string& key);
  KeyOutcome fallback(const std::string& key);
  void resolve_buffer();
  void begin_buffer();
  void clear_buffer();
  void commit_buffer();
  Attempt attempt(const std::string& action_id);
  const Binding* exact_match(const std::vector<std::string>& keys) const;
  bool has_longer(const std::vector<std::string>& keys) const;
  void open_session(EditSession session);
  void refresh_completions();
  std::optional<ActionRecord> record(std::string action_id, std::vector<std::string> keys, const NodePath& target,
              const NodeValue& before, const NodePath& focus_before);
  void prune_tags();

  Model model_;
  const ActionTable* actions_;
  const Keymap* keymap_;
  const EditSupport* edits_;

  std::vector<std::string> pending_;
  std::vector<Binding> snapshot_;
  std::optional<Model> base_;
  NodePath buffer_target_;
  std::optional<Provisional> provisional_;
  std::optional<EditSession> session_;

  std::vector<ActionRecord> undo_;
  std::vector<ActionRecord> redo_;
  std::uint64_t clock_ = 0;
};

}  // namespace martta
