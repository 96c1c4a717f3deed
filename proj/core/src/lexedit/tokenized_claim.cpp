#include "claimforge/lexedit/tokenized_claim.h"

#include "claimforge/error.h"
#include "claimforge/lexedit/tokenizer.h"

namespace claimforge::lexedit {

TokenizedClaim::TokenizedClaim(std::vector<std::string> tokens, std::vector<PosCategory> pos,
                               std::string claim_id, std::vector<EditAction> edit_history)
    : tokens_(std::move(tokens)),
      pos_(std::move(pos)),
      claim_id_(std::move(claim_id)),
      edit_history_(std::move(edit_history)) {
  if (tokens_.empty()) throw Error(ErrorCode::kEmptyClaim, "claim has no tokens");
  if (tokens_.size() != pos_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "token and POS sequences differ in length");
  }
}

std::string TokenizedClaim::text() const { return detokenize(tokens_); }

TokenizedClaim tokenize(std::string_view text, const Lexicon& lexicon, std::string claim_id) {
  auto tokens = split_tokens(text);
  if (tokens.empty()) throw Error(ErrorCode::kEmptyClaim, "claim text is blank");
  return from_tokens(std::move(tokens), lexicon, std::move(claim_id));
}

TokenizedClaim from_tokens(std::vector<std::string> tokens, const Lexicon& lexicon,
                           std::string claim_id) {
  std::vector<PosCategory> pos;
  pos.reserve(tokens.size());
  for (const auto& t : tokens) pos.push_back(lexicon.category(t));
  return TokenizedClaim(std::move(tokens), std::move(pos), std::move(claim_id));
}

}  // namespace claimforge::lexedit
