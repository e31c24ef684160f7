#include "martta/error.hpp"

namespace martta {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
#define MARTTA_ERROR_CASE(name) \
  case ErrorCode::name:         \
    return #name;
    MARTTA_ERROR_CASE(DuplicateId)
    MARTTA_ERROR_CASE(UnknownParent)
    MARTTA_ERROR_CASE(CycleDetected)
    MARTTA_ERROR_CASE(UnknownConcept)
    MARTTA_ERROR_CASE(EmptySet)
    MARTTA_ERROR_CASE(RegistrySealed)
    MARTTA_ERROR_CASE(RegistryNotSealed)
    MARTTA_ERROR_CASE(InvalidDescriptor)
    MARTTA_ERROR_CASE(NotAProgramConcept)
    MARTTA_ERROR_CASE(UnknownNode)
    MARTTA_ERROR_CASE(SlotRejectsConcept)
    MARTTA_ERROR_CASE(NoSuchSlot)
    MARTTA_ERROR_CASE(NotInstantiable)
    MARTTA_ERROR_CASE(PlanSlotMismatch)
    MARTTA_ERROR_CASE(WouldViolateStructure)
    MARTTA_ERROR_CASE(CannotRemoveRoot)
    MARTTA_ERROR_CASE(NoSuchChild)
    MARTTA_ERROR_CASE(RerouteCycle)
    MARTTA_ERROR_CASE(NoSuchTarget)
    MARTTA_ERROR_CASE(DuplicateBinding)
    MARTTA_ERROR_CASE(UnknownAction)
    MARTTA_ERROR_CASE(ActionNotApplicable)
    MARTTA_ERROR_CASE(NotEditable)
    MARTTA_ERROR_CASE(InvalidDraft)
    MARTTA_ERROR_CASE(AmbiguousKeyword)
    MARTTA_ERROR_CASE(UnknownKeyword)
    MARTTA_ERROR_CASE(NoEditSession)
    MARTTA_ERROR_CASE(InvalidToken)
    MARTTA_ERROR_CASE(NotAnExpression)
    MARTTA_ERROR_CASE(DanglingReference)
    MARTTA_ERROR_CASE(FixNotApplicable)
    MARTTA_ERROR_CASE(TransformStalled)
    MARTTA_ERROR_CASE(IterationCapExceeded)
    MARTTA_ERROR_CASE(TransformProducedInvalidStructure)
    MARTTA_ERROR_CASE(ModelIncomplete)
    MARTTA_ERROR_CASE(UntransformedComposite)
    MARTTA_ERROR_CASE(CommandUnavailable)
    MARTTA_ERROR_CASE(NonZeroExit)
    MARTTA_ERROR_CASE(NotFoldable)
    MARTTA_ERROR_CASE(UnsupportedVersion)
    MARTTA_ERROR_CASE(UnknownConceptInDocument)
    MARTTA_ERROR_CASE(StructuralViolation)
    MARTTA_ERROR_CASE(MalformedDocument)
    MARTTA_ERROR_CASE(InvalidArgument)
#undef MARTTA_ERROR_CASE
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace martta
