#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "claimforge/ingest/dataset.h"
#include "claimforge/lexedit/lexicon.h"
#include "claimforge/searchenv/endpoint.h"
#include "claimforge/searchenv/reward.h"

namespace claimforge::cli {

struct DataOptions {
  std::string corpus;
  std::string claims;
  std::string lexicon;  // defaults to <corpus dir>/lexicon, then the bundled one
  std::string index;    // snapshot; built in memory when empty
  std::string backend;  // defaults to the snapshot's backend, else bm25
  std::string metric = "ap";
  int k = 50;
  std::string embed_url;  // knn only; an external embedding service
  std::size_t embed_dim = 256;
};

void add_data_options(CLI::App* app, DataOptions& opts, bool claims_required);

struct LoadedData {
  ingest::Dataset data;
  lexedit::Lexicon lexicon;
  std::unique_ptr<searchenv::SearchEndpoint> index;
  searchenv::RewardSpec spec;
};

LoadedData load_data(const DataOptions& opts);

lexedit::Lexicon load_lexicon(const std::string& explicit_dir, const std::string& corpus_path);
searchenv::BackendKind backend_or_throw(const std::string& name);
searchenv::Metric metric_or_throw(const std::string& name);
std::shared_ptr<const searchenv::Embedder> make_embedder(const std::string& url, std::size_t dim);

}  // namespace claimforge::cli
