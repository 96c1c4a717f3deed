#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace claimforge::lexedit {

// Whitespace split with punctuation detached into single-character tokens.
// Apostrophes and hyphens between two word characters stay inside the word
// ("don't", "well-known"). Bytes >= 0x80 count as word characters.
std::vector<std::string> split_tokens(std::string_view text);

// Space-joined; split_tokens(detokenize(t)) == t for any t produced by
// split_tokens.
std::string detokenize(const std::vector<std::string>& tokens);

std::string to_lower_ascii(std::string_view text);

bool is_word_byte(unsigned char c) noexcept;

}  // namespace claimforge::lexedit
