#include "claimforge/lexedit/lexicon.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "claimforge/error.h"
#include "claimforge/lexedit/tokenizer.h"

namespace claimforge::lexedit {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Calls `row(fields, line_no)` for every non-comment, non-blank line.
void read_tsv(const std::filesystem::path& path,
              const std::function<void(const std::vector<std::string>&, std::size_t)>& row) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(trim(std::string_view(line).substr(start, tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 2 || fields[0].empty()) {
      throw Error(ErrorCode::kParseError,
                  path.filename().string() + ": expected two tab-separated fields", line_no);
    }
    row(fields, line_no);
  }
}

std::uint8_t bit(PosCategory pos) { return static_cast<std::uint8_t>(1u << static_cast<int>(pos)); }

}  // namespace

Lexicon Lexicon::load(const std::filesystem::path& dir) {
  Lexicon lex;
  read_tsv(dir / "synonyms.tsv", [&](const std::vector<std::string>& f, std::size_t) {
    std::vector<std::string> syns;
    std::stringstream ss(f[1]);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) syns.push_back(item);
    }
    lex.add_synonyms(f[0], syns);
  });
  read_tsv(dir / "pos.tsv", [&](const std::vector<std::string>& f, std::size_t line_no) {
    const auto pos = parse_pos_tag(f[1]);
    if (!pos || *pos == PosCategory::kOther) {
      throw Error(ErrorCode::kParseError, "pos.tsv: unknown tag '" + f[1] + "'", line_no);
    }
    lex.add_pos(f[0], *pos);
  });
  read_tsv(dir / "verbs.tsv", [&](const std::vector<std::string>& f, std::size_t line_no) {
    if (f[1].empty()) throw Error(ErrorCode::kParseError, "verbs.tsv: empty base form", line_no);
    lex.add_verb_form(f[0], f[1]);
  });
  return lex;
}

void Lexicon::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("synonyms.tsv");
    out << "# word\tsynonyms (comma-separated, first is preferred)\n";
    for (const auto& [word, syns] : synonyms_) {
      if (syns.empty()) continue;
      out << word << '\t';
      for (std::size_t i = 0; i < syns.size(); ++i) out << (i ? "," : "") << syns[i];
      out << '\n';
    }
  }
  {
    auto out = open("pos.tsv");
    out << "# word\tVERB|NOUN|ADJ|ADV|STOP\n";
    for (const auto& [word, mask] : pos_masks_) {
      for (int p = 0; p < 5; ++p) {
        if (mask & (1u << p)) out << word << '\t' << pos_tag(static_cast<PosCategory>(p)) << '\n';
      }
    }
  }
  {
    auto out = open("verbs.tsv");
    out << "# inflected\tpresent-simple base\n";
    for (const auto& [inflected, base] : verb_forms_) out << inflected << '\t' << base << '\n';
  }
}

void Lexicon::add_synonyms(std::string_view word, const std::vector<std::string>& synonyms) {
  const auto head = to_lower_ascii(word);
  auto& list = synonyms_[head];
  for (const auto& s : synonyms) {
    auto syn = to_lower_ascii(s);
    if (syn.empty() || syn == head) continue;
    // Multi-word phrases are not representable as a single token.
    if (syn.find_first_of(" \t") != std::string::npos) continue;
    if (std::find(list.begin(), list.end(), syn) == list.end()) list.push_back(std::move(syn));
  }
}

void Lexicon::add_pos(std::string_view word, PosCategory pos) {
  if (pos == PosCategory::kOther) return;
  pos_masks_[to_lower_ascii(word)] |= bit(pos);
}

void Lexicon::add_verb_form(std::string_view inflected, std::string_view base) {
  if (base.empty()) throw Error(ErrorCode::kInvalidArgument, "empty base form");
  verb_forms_[to_lower_ascii(inflected)] = to_lower_ascii(base);
}

const std::vector<std::string>& Lexicon::synonyms(std::string_view word) const {
  static const std::vector<std::string> kNone;
  const auto it = synonyms_.find(to_lower_ascii(word));
  return it == synonyms_.end() ? kNone : it->second;
}

PosCategory Lexicon::category(std::string_view word) const {
  const auto key = to_lower_ascii(word);
  std::uint8_t mask = 0;
  if (const auto it = pos_masks_.find(key); it != pos_masks_.end()) mask = it->second;
  if (verb_forms_.count(key) != 0) mask |= bit(PosCategory::kVerb);
  for (int p = 0; p < 5; ++p) {
    if (mask & (1u << p)) return static_cast<PosCategory>(p);
  }
  return PosCategory::kOther;
}

std::optional<std::string> Lexicon::present_form(std::string_view word) const {
  const auto it = verb_forms_.find(to_lower_ascii(word));
  if (it == verb_forms_.end()) return std::nullopt;
  return it->second;
}

bool Lexicon::is_stopword(std::string_view word) const {
  const auto it = pos_masks_.find(to_lower_ascii(word));
  return it != pos_masks_.end() && (it->second & bit(PosCategory::kStopWord));
}

}  // namespace claimforge::lexedit
