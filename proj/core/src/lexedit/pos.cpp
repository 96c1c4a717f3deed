#include "claimforge/lexedit/pos.h"

namespace claimforge::lexedit {

std::string_view pos_tag(PosCategory pos) noexcept {
  switch (pos) {
    case PosCategory::kVerb: return "VERB";
    case PosCategory::kNoun: return "NOUN";
    case PosCategory::kAdjective: return "ADJ";
    case PosCategory::kAdverb: return "ADV";
    case PosCategory::kStopWord: return "STOP";
    case PosCategory::kOther: return "OTHER";
  }
  return "OTHER";
}

std::optional<PosCategory> parse_pos_tag(std::string_view tag) noexcept {
  if (tag == "VERB") return PosCategory::kVerb;
  if (tag == "NOUN") return PosCategory::kNoun;
  if (tag == "ADJ") return PosCategory::kAdjective;
  if (tag == "ADV") return PosCategory::kAdverb;
  if (tag == "STOP") return PosCategory::kStopWord;
  if (tag == "OTHER") return PosCategory::kOther;
  return std::nullopt;
}

}  // namespace claimforge::lexedit
