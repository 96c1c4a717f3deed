#include "claimforge/lexedit/editor.h"

#include <algorithm>

#include "claimforge/error.h"
#include "claimforge/lexedit/tokenizer.h"

namespace claimforge::lexedit {

namespace {

bool kind_allowed(PosCategory pos, EditKind kind) {
  switch (pos) {
    case PosCategory::kVerb:
      return true;
    case PosCategory::kNoun:
    case PosCategory::kAdjective:
    case PosCategory::kAdverb:
      return kind != EditKind::kPresentTense;
    case PosCategory::kStopWord:
    case PosCategory::kOther:
      return kind == EditKind::kRemove;
  }
  return false;
}

bool preconditions_hold(const TokenizedClaim& claim, EditAction action, const Lexicon& lexicon) {
  if (action.position < 0 || action.position >= kEditablePositions) return false;
  if (static_cast<std::size_t>(action.position) >= claim.size()) return false;
  const auto& token = claim.tokens()[action.position];
  if (!kind_allowed(claim.pos()[action.position], action.kind)) return false;
  switch (action.kind) {
    case EditKind::kSwapSynonym:
    case EditKind::kAddSynonym:
      return !lexicon.synonyms(token).empty();
    case EditKind::kPresentTense: {
      const auto base = lexicon.present_form(token);
      return base && *base != to_lower_ascii(token);
    }
    case EditKind::kRemove:
      return claim.size() > 1;
  }
  return false;
}

}  // namespace

std::vector<EditAction> legal_actions(const TokenizedClaim& claim, const Lexicon& lexicon) {
  std::vector<EditAction> out;
  const int limit = static_cast<int>(std::min<std::size_t>(claim.size(), kEditablePositions));
  for (int k = 0; k < kEditKinds; ++k) {
    for (int p = 0; p < limit; ++p) {
      const EditAction a{static_cast<EditKind>(k), p};
      if (preconditions_hold(claim, a, lexicon)) out.push_back(a);
    }
  }
  return out;
}

bool is_legal(const TokenizedClaim& claim, EditAction action, const Lexicon& lexicon) {
  return preconditions_hold(claim, action, lexicon);
}

TokenizedClaim apply_action(const TokenizedClaim& claim, EditAction action,
                            const Lexicon& lexicon) {
  if (!preconditions_hold(claim, action, lexicon)) {
    throw Error(ErrorCode::kIllegalAction,
                to_string(action) + " is not applicable to \"" + claim.text() + "\"");
  }
  auto tokens = claim.tokens();
  auto pos = claim.pos();
  const auto at = static_cast<std::size_t>(action.position);
  switch (action.kind) {
    case EditKind::kRemove:
      tokens.erase(tokens.begin() + at);
      pos.erase(pos.begin() + at);
      break;
    case EditKind::kSwapSynonym: {
      auto syn = choose_synonym(tokens[at], lexicon);
      pos[at] = lexicon.category(syn);
      tokens[at] = std::move(syn);
      break;
    }
    case EditKind::kAddSynonym: {
      auto syn = choose_synonym(tokens[at], lexicon);
      pos.insert(pos.begin() + at + 1, lexicon.category(syn));
      tokens.insert(tokens.begin() + at + 1, std::move(syn));
      break;
    }
    case EditKind::kPresentTense: {
      auto base = *lexicon.present_form(tokens[at]);
      pos[at] = lexicon.category(base);
      tokens[at] = std::move(base);
      break;
    }
  }
  auto history = claim.edit_history();
  history.push_back(action);
  return TokenizedClaim(std::move(tokens), std::move(pos), claim.claim_id(), std::move(history));
}

std::string choose_synonym(std::string_view word, const Lexicon& lexicon) {
  const auto& syns = lexicon.synonyms(word);
  if (syns.empty()) throw Error(ErrorCode::kNoSynonym, "no synonym for '" + std::string(word) + "'");
  return syns.front();
}

}  // namespace claimforge::lexedit
