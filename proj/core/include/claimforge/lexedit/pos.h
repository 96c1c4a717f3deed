#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace claimforge::lexedit {

// Declaration order is the tagging priority: a word listed under several
// categories takes the earliest one.
enum class PosCategory : std::uint8_t {
  kVerb = 0,
  kNoun = 1,
  kAdjective = 2,
  kAdverb = 3,
  kStopWord = 4,
  kOther = 5,
};

// Tag used in pos.tsv (VERB, NOUN, ADJ, ADV, STOP); "OTHER" for kOther.
std::string_view pos_tag(PosCategory pos) noexcept;
std::optional<PosCategory> parse_pos_tag(std::string_view tag) noexcept;

}  // namespace claimforge::lexedit
