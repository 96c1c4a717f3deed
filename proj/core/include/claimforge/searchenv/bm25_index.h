#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "claimforge/searchenv/endpoint.h"

namespace claimforge::searchenv {

// Okapi BM25 over an in-memory inverted index:
//   score(q, d) = sum_{t in q} idf(t) * tf(t,d) * (k1 + 1)
//                              / (tf(t,d) + k1 * (1 - b + b * |d| / avgdl))
//   idf(t)     = ln(1 + (N - df(t) + 0.5) / (df(t) + 0.5))
// Repeated query terms contribute once per occurrence.
class Bm25Index final : public SearchEndpoint {
 public:
  Bm25Index(const Corpus& corpus, Bm25Params params, std::size_t top_k);

  BackendKind backend() const noexcept override { return BackendKind::kBm25; }
  std::vector<ScoredDoc> query(std::string_view text, std::size_t k) const override;
  using SearchEndpoint::query;
  std::size_t size() const noexcept override { return doc_ids_.size(); }
  void save(const std::filesystem::path& path) const override;

  const Bm25Params& params() const noexcept { return params_; }
  double avg_doc_length() const noexcept { return avgdl_; }

  static std::unique_ptr<Bm25Index> read_payload(std::istream& in, std::size_t top_k);

 private:
  struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
  };
  Bm25Index(Bm25Params params, std::size_t top_k);
  void finalize();

  Bm25Params params_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::vector<std::uint32_t> id_rank_;  // position of each doc in doc_id order
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<double> length_norm_;  // k1 * (1 - b + b * |d| / avgdl)
  double avgdl_ = 0.0;
};

}  // namespace claimforge::searchenv
