#include "claimforge/searchenv/bm25_index.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "../common/binary_io.h"
#include "claimforge/error.h"
#include "claimforge/searchenv/analyzer.h"

namespace claimforge::searchenv {

namespace {

std::vector<std::uint32_t> rank_by_id(const std::vector<std::string>& ids) {
  std::vector<std::uint32_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return ids[a] < ids[b]; });
  std::vector<std::uint32_t> rank(ids.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

}  // namespace

Bm25Index::Bm25Index(Bm25Params params, std::size_t top_k)
    : SearchEndpoint(top_k), params_(params) {}

Bm25Index::Bm25Index(const Corpus& corpus, Bm25Params params, std::size_t top_k)
    : Bm25Index(params, top_k) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot index an empty corpus");
  doc_ids_.reserve(corpus.size());
  doc_lengths_.reserve(corpus.size());
  for (const auto& doc : corpus.documents()) {
    const auto doc_no = static_cast<std::uint32_t>(doc_ids_.size());
    doc_ids_.push_back(doc.doc_id);
    const auto terms = analyze(doc.text);
    doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    for (const auto& t : terms) {
      auto& list = postings_[t];
      if (!list.empty() && list.back().doc == doc_no) {
        ++list.back().tf;
      } else {
        list.push_back(Posting{doc_no, 1});
      }
    }
  }
  finalize();
}

void Bm25Index::finalize() {
  const double total = std::accumulate(doc_lengths_.begin(), doc_lengths_.end(), 0.0);
  avgdl_ = doc_lengths_.empty() ? 0.0 : total / static_cast<double>(doc_lengths_.size());
  length_norm_.resize(doc_lengths_.size());
  for (std::size_t d = 0; d < doc_lengths_.size(); ++d) {
    const double rel = avgdl_ > 0.0 ? doc_lengths_[d] / avgdl_ : 0.0;
    length_norm_[d] = params_.k1 * (1.0 - params_.b + params_.b * rel);
  }
  id_rank_ = rank_by_id(doc_ids_);
}

std::vector<ScoredDoc> Bm25Index::query(std::string_view text, std::size_t k) const {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::kEmptyQuery, "query text is blank");
  }
  const auto terms = analyze(text);
  const double n_docs = static_cast<double>(doc_ids_.size());

  // Dense per-thread accumulator; only touched slots are read and reset.
  thread_local std::vector<double> acc;
  thread_local std::vector<std::uint8_t> seen;
  if (acc.size() < doc_ids_.size()) {
    acc.assign(doc_ids_.size(), 0.0);
    seen.assign(doc_ids_.size(), 0);
  }
  std::vector<std::uint32_t> touched;
  for (const auto& t : terms) {
    const auto it = postings_.find(t);
    if (it == postings_.end()) continue;
    const double df = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (const auto& p : it->second) {
      const double tf = p.tf;
      const double s = idf * tf * (params_.k1 + 1.0) / (tf + length_norm_[p.doc]);
      if (!seen[p.doc]) {
        seen[p.doc] = 1;
        touched.push_back(p.doc);
      }
      acc[p.doc] += s;
    }
  }

  std::vector<std::pair<double, std::uint32_t>> scored;
  scored.reserve(touched.size());
  for (const auto d : touched) {
    scored.emplace_back(acc[d], d);
    acc[d] = 0.0;
    seen[d] = 0;
  }
  const auto better = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return id_rank_[a.second] < id_rank_[b.second];
  };
  const auto n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    better);
  std::vector<ScoredDoc> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({doc_ids_[scored[i].second], scored[i].first});
  return out;
}

void Bm25Index::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  detail::write_magic(out, "CFIX");
  detail::write_pod<std::uint32_t>(out, kSnapshotVersion);
  detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(BackendKind::kBm25));
  detail::write_pod<std::uint64_t>(out, top_k());
  detail::write_pod<double>(out, params_.k1);
  detail::write_pod<double>(out, params_.b);
  detail::write_pod<std::uint64_t>(out, doc_ids_.size());
  for (const auto& id : doc_ids_) detail::write_string(out, id);
  detail::write_vector(out, doc_lengths_);
  // Terms sorted so snapshots are byte-stable.
  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, _] : postings_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
  detail::write_pod<std::uint64_t>(out, terms.size());
  for (const auto* term : terms) {
    detail::write_string(out, *term);
    const auto& list = postings_.at(*term);
    detail::write_pod<std::uint64_t>(out, list.size());
    for (const auto& p : list) {
      detail::write_pod(out, p.doc);
      detail::write_pod(out, p.tf);
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::unique_ptr<Bm25Index> Bm25Index::read_payload(std::istream& in, std::size_t) {
  const auto top_k = detail::read_pod<std::uint64_t>(in);
  Bm25Params params;
  params.k1 = detail::read_pod<double>(in);
  params.b = detail::read_pod<double>(in);
  std::unique_ptr<Bm25Index> index(new Bm25Index(params, top_k));
  const auto n_docs = detail::read_pod<std::uint64_t>(in);
  index->doc_ids_.reserve(n_docs);
  for (std::uint64_t i = 0; i < n_docs; ++i) index->doc_ids_.push_back(detail::read_string(in));
  index->doc_lengths_ = detail::read_vector<std::uint32_t>(in);
  if (index->doc_lengths_.size() != n_docs) {
    throw Error(ErrorCode::kFormatError, "doc length table size mismatch");
  }
  const auto n_terms = detail::read_pod<std::uint64_t>(in);
  for (std::uint64_t t = 0; t < n_terms; ++t) {
    auto term = detail::read_string(in);
    const auto n = detail::read_pod<std::uint64_t>(in);
    std::vector<Posting> list;
    list.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      Posting p{};
      p.doc = detail::read_pod<std::uint32_t>(in);
      p.tf = detail::read_pod<std::uint32_t>(in);
      if (p.doc >= n_docs) throw Error(ErrorCode::kFormatError, "posting references unknown doc");
      list.push_back(p);
    }
    index->postings_.emplace(std::move(term), std::move(list));
  }
  index->finalize();
  return index;
}

}  // namespace claimforge::searchenv
