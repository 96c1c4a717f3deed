#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace claimforge::searchenv {

// Index/query analyzer shared by both backends: the edit tokenizer,
// lowercased, with punctuation-only tokens dropped. No stemming.
std::vector<std::string> analyze(std::string_view text);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace claimforge::searchenv
