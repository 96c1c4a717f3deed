#include "claimforge/lexedit/tokenizer.h"

#include <cctype>

namespace claimforge::lexedit {

bool is_word_byte(unsigned char c) noexcept { return c >= 0x80 || std::isalnum(c) != 0; }

namespace {

bool is_space(unsigned char c) noexcept { return std::isspace(c) != 0; }

// Joiners stay inside a word only when flanked by word bytes.
bool is_joiner(char c) noexcept { return c == '\'' || c == '-'; }

}  // namespace

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      flush();
    } else if (is_word_byte(c)) {
      current.push_back(static_cast<char>(c));
    } else if (is_joiner(text[i]) && !current.empty() && i + 1 < text.size() &&
               is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
      current.push_back(static_cast<char>(c));
    } else {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    }
  }
  flush();
  return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (auto& ch : out) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80) ch = static_cast<char>(std::tolower(c));
  }
  return out;
}

}  // namespace claimforge::lexedit
