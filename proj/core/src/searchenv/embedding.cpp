#include "claimforge/searchenv/embedding.h"

#include <cmath>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "claimforge/error.h"
#include "claimforge/searchenv/analyzer.h"

namespace claimforge::searchenv {

namespace {

void normalize(std::vector<float>& v) {
  double norm = 0.0;
  for (const float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw Error(ErrorCode::kEmptyQuery, "cannot normalize a zero embedding");
  for (auto& x : v) x = static_cast<float>(x / norm);
}

}  // namespace

HashedBowEmbedder::HashedBowEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dim must be positive");
}

std::size_t HashedBowEmbedder::bucket(std::string_view term) const noexcept {
  return static_cast<std::size_t>(fnv1a64(term) % dim_);
}

std::vector<float> HashedBowEmbedder::embed(std::string_view text) const {
  const auto terms = analyze(text);
  if (terms.empty()) throw Error(ErrorCode::kEmptyQuery, "text has no indexable terms");
  std::vector<float> v(dim_, 0.0f);
  for (const auto& t : terms) v[bucket(t)] += 1.0f;
  normalize(v);
  return v;
}

ExternalEmbedder::ExternalEmbedder(std::string base_url, std::size_t dim, double timeout_seconds)
    : base_url_(std::move(base_url)), dim_(dim), timeout_seconds_(timeout_seconds) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dim must be positive");
}

std::size_t ExternalEmbedder::cache_size() const {
  std::shared_lock lock(cache_mutex_);
  return cache_.size();
}

std::vector<float> ExternalEmbedder::embed(std::string_view text) const {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::kEmptyQuery, "cannot embed blank text");
  }
  const auto key = fnv1a64(text);
  {
    std::shared_lock lock(cache_mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end() && it->second.text == text) return it->second.vector;
  }

  httplib::Client client(base_url_);
  const auto secs = static_cast<time_t>(timeout_seconds_);
  const auto usecs = static_cast<time_t>((timeout_seconds_ - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  const nlohmann::json body = {{"texts", {std::string(text)}}};
  const auto res = client.Post("/embed", body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kEmbeddingServiceUnavailable,
                base_url_ + "/embed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kEmbeddingServiceUnavailable,
                base_url_ + "/embed returned HTTP " + std::to_string(res->status));
  }
  std::vector<float> v;
  try {
    const auto parsed = nlohmann::json::parse(res->body);
    v = parsed.at("vectors").at(0).get<std::vector<float>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kEmbeddingServiceUnavailable,
                std::string("malformed /embed response: ") + e.what());
  }
  if (v.size() != dim_) {
    throw Error(ErrorCode::kEmbeddingServiceUnavailable,
                "embedding service returned dim " + std::to_string(v.size()) + ", expected " +
                    std::to_string(dim_));
  }
  normalize(v);

  std::unique_lock lock(cache_mutex_);
  cache_[key] = Entry{std::string(text), v};
  return v;
}

}  // namespace claimforge::searchenv
