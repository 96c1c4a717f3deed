#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "claimforge/lexedit/pos.h"

namespace claimforge::lexedit {

// Word tables backing POS tagging and the synonym/tense edits. All keys are
// stored lowercase and lookups are case-insensitive.
//
// On disk a lexicon is a directory with three UTF-8 TSV files:
//   synonyms.tsv  word<TAB>syn1,syn2,...
//   pos.tsv       word<TAB>VERB|NOUN|ADJ|ADV|STOP   (a word may repeat)
//   verbs.tsv     inflected<TAB>base
// Lines starting with '#' are comments. A word listed in verbs.tsv is also a
// Verb candidate for tagging.
class Lexicon {
 public:
  static Lexicon load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;

  // The headword and repeated entries are dropped from `synonyms`; order of
  // first occurrence is kept and defines synonym choice.
  void add_synonyms(std::string_view word, const std::vector<std::string>& synonyms);
  void add_pos(std::string_view word, PosCategory pos);
  void add_verb_form(std::string_view inflected, std::string_view base);

  const std::vector<std::string>& synonyms(std::string_view word) const;
  PosCategory category(std::string_view word) const;
  std::optional<std::string> present_form(std::string_view word) const;
  bool is_stopword(std::string_view word) const;

  std::size_t synonym_entries() const noexcept { return synonyms_.size(); }
  std::size_t pos_entries() const noexcept { return pos_masks_.size(); }
  std::size_t verb_entries() const noexcept { return verb_forms_.size(); }

  bool operator==(const Lexicon&) const = default;

 private:
  // std::map keeps save() output sorted and byte-stable.
  std::map<std::string, std::vector<std::string>, std::less<>> synonyms_;
  std::map<std::string, std::uint8_t, std::less<>> pos_masks_;
  std::map<std::string, std::string, std::less<>> verb_forms_;
};

}  // namespace claimforge::lexedit
