#include "claimforge/searchenv/corpus.h"

#include "claimforge/error.h"

namespace claimforge::searchenv {

void Corpus::add_document(std::string doc_id, std::string text) {
  if (doc_id.empty()) throw Error(ErrorCode::kInvalidArgument, "empty doc_id");
  if (index_.count(doc_id) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate doc_id '" + doc_id + "'");
  }
  index_.emplace(doc_id, docs_.size());
  docs_.push_back(Document{std::move(doc_id), std::move(text)});
}

void Corpus::set_relevant(const std::string& claim_id, const std::vector<std::string>& doc_ids) {
  if (doc_ids.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "claim '" + claim_id + "' has no relevant documents");
  }
  std::set<std::string> ids;
  for (const auto& id : doc_ids) {
    if (!contains(id)) {
      throw Error(ErrorCode::kDanglingReference,
                  "claim '" + claim_id + "' references unknown doc '" + id + "'");
    }
    ids.insert(id);
  }
  relevance_[claim_id] = std::move(ids);
}

const Document* Corpus::find(std::string_view doc_id) const {
  const auto it = index_.find(std::string(doc_id));
  return it == index_.end() ? nullptr : &docs_[it->second];
}

const std::set<std::string>* Corpus::relevant(std::string_view claim_id) const {
  const auto it = relevance_.find(claim_id);
  return it == relevance_.end() ? nullptr : &it->second;
}

}  // namespace claimforge::searchenv
