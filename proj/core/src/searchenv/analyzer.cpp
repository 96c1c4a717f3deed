#include "claimforge/searchenv/analyzer.h"

#include <algorithm>

#include "claimforge/lexedit/tokenizer.h"

namespace claimforge::searchenv {

std::vector<std::string> analyze(std::string_view text) {
  auto tokens = lexedit::split_tokens(text);
  std::vector<std::string> terms;
  terms.reserve(tokens.size());
  for (auto& t : tokens) {
    const bool has_word = std::any_of(t.begin(), t.end(), [](char c) {
      return lexedit::is_word_byte(static_cast<unsigned char>(c));
    });
    if (has_word) terms.push_back(lexedit::to_lower_ascii(t));
  }
  return terms;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace claimforge::searchenv
