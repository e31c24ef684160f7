#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace martta {

/// Every failure a workbench operation can report. The enumerator names are
/// part of the external contract: the service returns them verbatim.
enum class ErrorCode {
  // registry
  DuplicateId,
  UnknownParent,
  CycleDetected,
  UnknownConcept,
  EmptySet,
  RegistrySealed,
  RegistryNotSealed,
  InvalidDescriptor,
  // kernel
  NotAProgramConcept,
  UnknownNode,
  SlotRejectsConcept,
  NoSuchSlot,
  NotInstantiable,
  PlanSlotMismatch,
  WouldViolateStructure,
  CannotRemoveRoot,
  NoSuchChild,
  RerouteCycle,
  NoSuchTarget,
  // input
  DuplicateBinding,
  UnknownAction,
  ActionNotApplicable,
  NotEditable,
  InvalidDraft,
  AmbiguousKeyword,
  UnknownKeyword,
  NoEditSession,
  InvalidToken,
  // language
  NotAnExpression,
  DanglingReference,
  FixNotApplicable,
  // transform / codegen
  TransformStalled,
  IterationCapExceeded,
  TransformProducedInvalidStructure,
  ModelIncomplete,
  UntransformedComposite,
  CommandUnavailable,
  NonZeroExit,
  // render
  NotFoldable,
  // persistence
  UnsupportedVersion,
  UnknownConceptInDocument,
  StructuralViolation,
  MalformedDocument,
  // harness
  InvalidArgument,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace martta
