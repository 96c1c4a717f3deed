#include "claimforge/lexedit/edit_action.h"

#include "claimforge/error.h"

namespace claimforge::lexedit {

int flatten_action(EditAction action) {
  const int kind = static_cast<int>(action.kind);
  if (kind < 0 || kind >= kEditKinds || action.position < 0 ||
      action.position >= kEditablePositions) {
    throw Error(ErrorCode::kOutOfRange, "action " + to_string(action) + " outside action space");
  }
  return kind * kEditablePositions + action.position;
}

EditAction unflatten_action(int flat) {
  if (flat < 0 || flat >= kActionSpaceSize) {
    throw Error(ErrorCode::kOutOfRange, "flat action " + std::to_string(flat) + " not in [0,128)");
  }
  return EditAction{static_cast<EditKind>(flat / kEditablePositions), flat % kEditablePositions};
}

std::string_view edit_kind_name(EditKind kind) noexcept {
  switch (kind) {
    case EditKind::kSwapSynonym: return "swap_synonym";
    case EditKind::kAddSynonym: return "add_synonym";
    case EditKind::kPresentTense: return "present_tense";
    case EditKind::kRemove: return "remove";
  }
  return "unknown";
}

std::optional<EditKind> parse_edit_kind(std::string_view name) noexcept {
  for (int k = 0; k < kEditKinds; ++k) {
    const auto kind = static_cast<EditKind>(k);
    if (edit_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string to_string(EditAction action) {
  return std::string(edit_kind_name(action.kind)) + "@" + std::to_string(action.position);
}

}  // namespace claimforge::lexedit
