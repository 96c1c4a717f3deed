#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace claimforge::searchenv {

struct Document {
  std::string doc_id;
  std::string text;

  bool operator==(const Document&) const = default;
};

// Documents plus relevance judgments (claim_id -> relevant doc_ids).
// Every judged doc_id exists in the collection.
class Corpus {
 public:
  // Throws Error(kInvalidArgument) on a duplicate or empty doc_id.
  void add_document(std::string doc_id, std::string text);

  // Throws Error(kDanglingReference) when a doc_id is unknown and
  // Error(kInvalidArgument) when the set is empty.
  void set_relevant(const std::string& claim_id, const std::vector<std::string>& doc_ids);

  const std::vector<Document>& documents() const noexcept { return docs_; }
  const Document* find(std::string_view doc_id) const;
  bool contains(std::string_view doc_id) const { return find(doc_id) != nullptr; }

  // nullptr when the claim has no judgments.
  const std::set<std::string>* relevant(std::string_view claim_id) const;
  const std::map<std::string, std::set<std::string>, std::less<>>& relevance() const noexcept {
    return relevance_;
  }

  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }

  bool operator==(const Corpus& other) const {
    return docs_ == other.docs_ && relevance_ == other.relevance_;
  }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, std::set<std::string>, std::less<>> relevance_;
};

}  // namespace claimforge::searchenv
