#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "claimforge/lexedit/edit_action.h"
#include "claimforge/lexedit/lexicon.h"
#include "claimforge/lexedit/pos.h"

namespace claimforge::lexedit {

// Immutable query state. Invariants: at least one token; one POS per token.
class TokenizedClaim {
 public:
  // Throws Error(kEmptyClaim) for an empty token list and
  // Error(kInvalidArgument) when tokens and pos differ in length.
  TokenizedClaim(std::vector<std::string> tokens, std::vector<PosCategory> pos,
                 std::string claim_id = {}, std::vector<EditAction> edit_history = {});

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<PosCategory>& pos() const noexcept { return pos_; }
  const std::string& claim_id() const noexcept { return claim_id_; }
  const std::vector<EditAction>& edit_history() const noexcept { return edit_history_; }
  std::size_t size() const noexcept { return tokens_.size(); }

  std::string text() const;

  bool operator==(const TokenizedClaim&) const = default;

 private:
  std::vector<std::string> tokens_;
  std::vector<PosCategory> pos_;
  std::string claim_id_;
  std::vector<EditAction> edit_history_;
};

// Throws Error(kEmptyClaim) when `text` has no tokens.
TokenizedClaim tokenize(std::string_view text, const Lexicon& lexicon,
                        std::string claim_id = {});

// Tags an existing token list (used when a client sends tokens back).
TokenizedClaim from_tokens(std::vector<std::string> tokens, const Lexicon& lexicon,
                           std::string claim_id = {});

}  // namespace claimforge::lexedit
