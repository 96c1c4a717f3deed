#include "claimforge/ingest/dataset.h"

#include <fstream>
#include <json.hpp>
#include <set>
#include <spdlog/spdlog.h>

#include "claimforge/error.h"
#include "claimforge/lexedit/tokenizer.h"

namespace claimforge::ingest {

using nlohmann::json;

namespace {

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

json parse_line(const std::string& line, std::size_t n, std::string_view what) {
  try {
    auto j = json::parse(line);
    if (!j.is_object()) {
      throw Error(ErrorCode::kParseError,
                  std::string(what) + " line " + std::to_string(n) + ": expected a JSON object", n);
    }
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError,
                std::string(what) + " line " + std::to_string(n) + ": " + e.what(), n);
  }
}

std::string string_field(const json& j, const char* key, std::size_t n, std::string_view what) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kParseError,
                std::string(what) + " line " + std::to_string(n) + ": missing string field '" +
                    key + "'",
                n);
  }
  return it->get<std::string>();
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

}  // namespace

bool is_not_enough_info(std::string_view label) {
  std::string norm;
  for (char c : label) {
    if (c == ' ' || c == '_' || c == '-') continue;
    norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return norm == "notenoughinfo";
}

searchenv::Corpus read_corpus(std::istream& in) {
  searchenv::Corpus corpus;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (blank(line)) continue;
    const auto j = parse_line(line, n, "corpus");
    auto id = string_field(j, "doc_id", n, "corpus");
    auto text = string_field(j, "text", n, "corpus");
    try {
      corpus.add_document(std::move(id), std::move(text));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, "corpus line " + std::to_string(n) + ": " + e.what(), n);
    }
  }
  return corpus;
}

searchenv::Corpus load_corpus(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_corpus(in);
}

std::vector<ClaimRecord> read_claims(std::istream& in, searchenv::Corpus& corpus,
                                     std::size_t* dropped) {
  std::vector<ClaimRecord> out;
  std::set<std::string> seen;
  std::size_t nei = 0;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (blank(line)) continue;
    const auto j = parse_line(line, n, "claims");
    ClaimRecord r;
    r.claim_id = string_field(j, "claim_id", n, "claims");
    r.claim = string_field(j, "claim", n, "claims");
    r.label = string_field(j, "label", n, "claims");
    if (is_not_enough_info(r.label)) {
      ++nei;
      continue;
    }
    const auto lower = lexedit::to_lower_ascii(r.label);
    if (lower != "supports" && lower != "refutes") {
      throw Error(ErrorCode::kParseError,
                  "claims line " + std::to_string(n) + ": unknown label '" + r.label + "'", n);
    }
    r.label = lower;
    const auto ids = j.find("relevant_doc_ids");
    if (ids == j.end() || !ids->is_array() || ids->empty()) {
      throw Error(ErrorCode::kParseError,
                  "claims line " + std::to_string(n) + ": relevant_doc_ids must be a non-empty array", n);
    }
    for (const auto& id : *ids) {
      if (!id.is_string()) {
        throw Error(ErrorCode::kParseError,
                    "claims line " + std::to_string(n) + ": doc ids must be strings", n);
      }
      r.relevant_doc_ids.push_back(id.get<std::string>());
    }
    if (!seen.insert(r.claim_id).second) {
      throw Error(ErrorCode::kParseError,
                  "claims line " + std::to_string(n) + ": duplicate claim_id '" + r.claim_id + "'", n);
    }
    for (const auto& id : r.relevant_doc_ids) {
      if (!corpus.contains(id)) {
        throw Error(ErrorCode::kDanglingReference,
                    "claims line " + std::to_string(n) + ": claim '" + r.claim_id +
                        "' references unknown doc '" + id + "'",
                    n);
      }
    }
    corpus.set_relevant(r.claim_id, r.relevant_doc_ids);
    out.push_back(std::move(r));
  }
  if (dropped) *dropped = nei;
  return out;
}

Dataset load_dataset(const std::filesystem::path& claims_path,
                     const std::filesystem::path& corpus_path) {
  Dataset d;
  d.corpus = load_corpus(corpus_path);
  auto in = open_in(claims_path);
  d.claims = read_claims(in, d.corpus, &d.dropped_not_enough_info);
  spdlog::info("loaded {} documents, {} claims ({} NotEnoughInfo dropped)", d.corpus.size(),
               d.claims.size(), d.dropped_not_enough_info);
  return d;
}

void write_corpus(std::ostream& out, const searchenv::Corpus& corpus) {
  for (const auto& d : corpus.documents()) {
    out << nlohmann::ordered_json{{"doc_id", d.doc_id}, {"text", d.text}}.dump() << '\n';
  }
}

void write_claims(std::ostream& out, std::span<const ClaimRecord> claims) {
  for (const auto& c : claims) {
    out << nlohmann::ordered_json{{"claim_id", c.claim_id},
                {"claim", c.claim},
                {"relevant_doc_ids", c.relevant_doc_ids},
                {"label", c.label}}
               .dump()
        << '\n';
  }
}

void save_corpus(const std::filesystem::path& path, const searchenv::Corpus& corpus) {
  auto out = open_out(path);
  write_corpus(out, corpus);
}

void save_claims(const std::filesystem::path& path, std::span<const ClaimRecord> claims) {
  auto out = open_out(path);
  write_claims(out, claims);
}

std::vector<lexedit::TokenizedClaim> tokenize_claims(std::span<const ClaimRecord> claims,
                                                     const lexedit::Lexicon& lexicon) {
  std::vector<lexedit::TokenizedClaim> out;
  out.reserve(claims.size());
  for (const auto& c : claims) out.push_back(lexedit::tokenize(c.claim, lexicon, c.claim_id));
  return out;
}

}  // namespace claimforge::ingest
