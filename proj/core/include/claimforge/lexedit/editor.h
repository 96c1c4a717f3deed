#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "claimforge/lexedit/edit_action.h"
#include "claimforge/lexedit/lexicon.h"
#include "claimforge/lexedit/tokenized_claim.h"

namespace claimforge::lexedit {

// Actions permitted by POS gating, in ascending flat-index order:
//   Verb                     swap, add, present, remove
//   Noun / Adjective / Adverb swap, add, remove
//   StopWord / Other         remove
// Swap/Add need a synonym, Present needs a base form different from the
// surface, Remove needs at least two tokens. Positions >= 32 are never legal.
std::vector<EditAction> legal_actions(const TokenizedClaim& claim, const Lexicon& lexicon);

bool is_legal(const TokenizedClaim& claim, EditAction action, const Lexicon& lexicon);

// Positions index the current token list. Throws Error(kIllegalAction).
TokenizedClaim apply_action(const TokenizedClaim& claim, EditAction action,
                            const Lexicon& lexicon);

// First synonym in stored order; Error(kNoSynonym) if none.
std::string choose_synonym(std::string_view word, const Lexicon& lexicon);

}  // namespace claimforge::lexedit
