#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace claimforge::lexedit {

inline constexpr int kEditablePositions = 32;
inline constexpr int kEditKinds = 4;
inline constexpr int kActionSpaceSize = kEditKinds * kEditablePositions;

// Underlying values are the row index in the flattened action table.
enum class EditKind : std::uint8_t {
  kSwapSynonym = 0,
  kAddSynonym = 1,
  kPresentTense = 2,
  kRemove = 3,
};

struct EditAction {
  EditKind kind = EditKind::kRemove;
  int position = 0;

  auto operator<=>(const EditAction&) const = default;
};

// flat = kind * 32 + position. Throws Error(kOutOfRange) when the position is
// outside [0, 32) or the index is outside [0, 128).
int flatten_action(EditAction action);
EditAction unflatten_action(int flat);

std::string_view edit_kind_name(EditKind kind) noexcept;
std::optional<EditKind> parse_edit_kind(std::string_view name) noexcept;

// "remove@3"
std::string to_string(EditAction action);

}  // namespace claimforge::lexedit
