#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "claimforge/lexedit/lexicon.h"
#include "claimforge/lexedit/tokenized_claim.h"
#include "claimforge/searchenv/corpus.h"

namespace claimforge::ingest {

struct ClaimRecord {
  std::string claim_id;
  std::string claim;
  std::vector<std::string> relevant_doc_ids;
  std::string label;  // "supports" | "refutes"

  bool operator==(const ClaimRecord&) const = default;
};

struct Dataset {
  std::vector<ClaimRecord> claims;
  searchenv::Corpus corpus;  // carries the claims' relevance judgments
  std::size_t dropped_not_enough_info = 0;

  bool operator==(const Dataset& other) const {
    return claims == other.claims && corpus == other.corpus;
  }
};

// True for "NotEnoughInfo" in any case, with or without spaces/underscores.
bool is_not_enough_info(std::string_view label);

// Corpus JSONL: {"doc_id": str, "text": str}. Throws Error(kParseError)
// with the 1-based line number, including for duplicate ids.
searchenv::Corpus read_corpus(std::istream& in);
searchenv::Corpus load_corpus(const std::filesystem::path& path);

// Claims JSONL: {"claim_id", "claim", "relevant_doc_ids", "label"}.
// NotEnoughInfo claims are dropped and counted; the others get their
// judgments registered in `corpus`. Throws Error(kParseError) for malformed
// lines and Error(kDanglingReference) for unknown doc ids.
std::vector<ClaimRecord> read_claims(std::istream& in, searchenv::Corpus& corpus,
                                     std::size_t* dropped = nullptr);

Dataset load_dataset(const std::filesystem::path& claims_path,
                     const std::filesystem::path& corpus_path);

void write_corpus(std::ostream& out, const searchenv::Corpus& corpus);
void write_claims(std::ostream& out, std::span<const ClaimRecord> claims);
void save_corpus(const std::filesystem::path& path, const searchenv::Corpus& corpus);
void save_claims(const std::filesystem::path& path, std::span<const ClaimRecord> claims);

std::vector<lexedit::TokenizedClaim> tokenize_claims(std::span<const ClaimRecord> claims,
                                                     const lexedit::Lexicon& lexicon);

}  // namespace claimforge::ingest
