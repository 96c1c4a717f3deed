#include "common.h"

#include <spdlog/spdlog.h>

#include "claimforge/error.h"
#include "claimforge/searchenv/embedding.h"

namespace claimforge::cli {

namespace fs = std::filesystem;

void add_data_options(CLI::App* app, DataOptions& opts, bool claims_required) {
  app->add_option("--corpus", opts.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  auto* claims = app->add_option("--claims", opts.claims, "Claims JSONL")->check(CLI::ExistingFile);
  if (claims_required) claims->required();
  app->add_option("--lexicon", opts.lexicon, "Lexicon directory")->check(CLI::ExistingDirectory);
  app->add_option("--index", opts.index, "Index snapshot")->check(CLI::ExistingFile);
  app->add_option("--backend", opts.backend, "bm25 | knn");
  app->add_option("--metric", opts.metric, "ap | recall | rr");
  app->add_option("--k", opts.k, "Metric cutoff")->check(CLI::PositiveNumber);
  app->add_option("--embed-url", opts.embed_url, "External embedding service base URL (knn)");
  app->add_option("--embed-dim", opts.embed_dim, "Embedding dimension");
}

searchenv::BackendKind backend_or_throw(const std::string& name) {
  const auto b = searchenv::parse_backend(name);
  if (!b) throw Error(ErrorCode::kInvalidArgument, "unknown backend '" + name + "'");
  return *b;
}

searchenv::Metric metric_or_throw(const std::string& name) {
  const auto m = searchenv::parse_metric(name);
  if (!m) throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + name + "'");
  return *m;
}

std::shared_ptr<const searchenv::Embedder> make_embedder(const std::string& url, std::size_t dim) {
  if (url.empty()) return std::make_shared<searchenv::HashedBowEmbedder>(dim);
  return std::make_shared<searchenv::ExternalEmbedder>(url, dim);
}

lexedit::Lexicon load_lexicon(const std::string& explicit_dir, const std::string& corpus_path) {
  if (!explicit_dir.empty()) return lexedit::Lexicon::load(explicit_dir);
  if (!corpus_path.empty()) {
    const auto sibling = fs::path(corpus_path).parent_path() / "lexicon";
    if (fs::is_directory(sibling)) return lexedit::Lexicon::load(sibling);
  }
  return lexedit::Lexicon::load(CLAIMFORGE_DEFAULT_LEXICON);
}

LoadedData load_data(const DataOptions& opts) {
  LoadedData out;
  if (opts.claims.empty()) {
    out.data.corpus = ingest::load_corpus(opts.corpus);
  } else {
    out.data = ingest::load_dataset(opts.claims, opts.corpus);
    if (out.data.dropped_not_enough_info > 0) {
      spdlog::info("dropped {} NotEnoughInfo claims", out.data.dropped_not_enough_info);
    }
  }
  out.lexicon = load_lexicon(opts.lexicon, opts.corpus);
  out.spec.metric = metric_or_throw(opts.metric);
  out.spec.k = opts.k;

  const auto embedder = opts.embed_url.empty() ? nullptr : make_embedder(opts.embed_url, opts.embed_dim);
  if (!opts.index.empty()) {
    out.index = searchenv::load_index(opts.index, embedder);
    if (!opts.backend.empty() && backend_or_throw(opts.backend) != out.index->backend()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "snapshot " + opts.index + " holds a " +
                      std::string(searchenv::backend_name(out.index->backend())) + " index");
    }
  } else {
    searchenv::IndexOptions io;
    io.embedder = embedder ? embedder : make_embedder("", opts.embed_dim);
    const auto backend = opts.backend.empty() ? searchenv::BackendKind::kBm25 : backend_or_throw(opts.backend);
    out.index = searchenv::build_index(out.data.corpus, backend, io);
  }
  return out;
}

}  // namespace claimforge::cli
