#include <filesystem>
#include <fstream>
#include <iostream>

#include <spdlog/spdlog.h>

#include "claimforge/error.h"
#include "claimforge/ingest/planted.h"
#include "claimforge/searchenv/embedding.h"
#include "commands.h"
#include "common.h"

namespace claimforge::cli {

namespace fs = std::filesystem;

namespace {

struct FixtureOptions {
  bool planted = false;
  std::size_t n = 500;
  std::uint64_t seed = 7;
  std::size_t background = 2000;
  std::size_t dev = 0;
  int answer_depth = 4;
  bool no_answer_key = false;
  bool evidence = false;
  unsigned threads = 1;
  std::string out;
};

// A handful of hand-written documents over the bundled lexicon, for demos.
void write_demo_fixture(const fs::path& dir) {
  ingest::Dataset d;
  const std::pair<const char*, const char*> docs[] = {
      {"d1", "The earth is round and orbits the sun."},
      {"d2", "Flat earth believers claim the planet is a disc."},
      {"d3", "Vaccines do not cause autism according to large studies."},
      {"d4", "The government said the vaccine program was expanded."},
      {"d5", "The band released a famous album in the city."},
      {"d6", "The company was founded in a small town."},
      {"d7", "The actor starred in a film that won an award."},
      {"d8", "The president died in the capital city."},
  };
  for (const auto& [id, text] : docs) d.corpus.add_document(id, text);
  d.claims = {
      {"c1", "The world is flat really", {"d2"}, "refutes"},
      {"c2", "Vaccines caused autism", {"d3"}, "refutes"},
      {"c3", "The actor starred in a movie that won a prize", {"d7"}, "supports"},
  };
  fs::create_directories(dir);
  ingest::save_corpus(dir / "corpus.jsonl", d.corpus);
  ingest::save_claims(dir / "claims.jsonl", d.claims);
  lexedit::Lexicon::load(CLAIMFORGE_DEFAULT_LEXICON).save(dir / "lexicon");
}

}  // namespace

void register_fixtures(CLI::App& app) {
  auto opts = std::make_shared<FixtureOptions>();
  auto* sub = app.add_subcommand("fixtures", "Write a synthetic benchmark or a small demo fixture");
  sub->add_flag("--planted", opts->planted, "Planted benchmark with an exhaustive answer key");
  sub->add_option("--n", opts->n, "Number of claims")->check(CLI::PositiveNumber);
  sub->add_option("--seed", opts->seed, "Generator seed");
  sub->add_option("--background", opts->background, "Background documents");
  sub->add_flag("--evidence", opts->evidence, "Second relevant document per planted claim");
  sub->add_option("--dev", opts->dev, "Also write claims_train/claims_dev with this many dev claims");
  sub->add_option("--answer-depth", opts->answer_depth, "Exhaustive search depth")->check(CLI::PositiveNumber);
  sub->add_flag("--no-answer-key", opts->no_answer_key, "Skip the exhaustive answer key");
  sub->add_option("--threads", opts->threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", opts->out, "Output directory")->required();
  sub->callback([opts] {
    if (!opts->planted) {
      write_demo_fixture(opts->out);
      std::cout << "wrote demo fixture to " << opts->out << '\n';
      return;
    }
    ingest::PlantedConfig cfg;
    cfg.n_claims = opts->n;
    cfg.seed = opts->seed;
    cfg.background_docs = opts->background;
    cfg.answer_key = !opts->no_answer_key;
    cfg.evidence_docs = opts->evidence;
    cfg.answer_depth = opts->answer_depth;
    cfg.threads = opts->threads;
    const auto bench = ingest::make_planted_benchmark(cfg);
    ingest::write_planted_benchmark(opts->out, bench, opts->dev);
    std::cout << "wrote " << bench.data.claims.size() << " claims and " << bench.data.corpus.size()
              << " documents to " << opts->out << '\n';
  });
}

void register_index(CLI::App& app) {
  struct Options {
    std::string corpus;
    std::string backend = "bm25";
    std::string out;
    std::string embed_url;
    std::size_t embed_dim = 256;
    std::size_t top_k = 50;
  };
  auto opts = std::make_shared<Options>();
  auto* sub = app.add_subcommand("index", "Build and save a search index snapshot");
  sub->add_option("--corpus", opts->corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  sub->add_option("--backend", opts->backend, "bm25 | knn");
  sub->add_option("--embed-url", opts->embed_url, "External embedding service base URL (knn)");
  sub->add_option("--embed-dim", opts->embed_dim, "Embedding dimension");
  sub->add_option("--top-k", opts->top_k, "Default result depth")->check(CLI::PositiveNumber);
  sub->add_option("--out", opts->out, "Snapshot path")->required();
  sub->callback([opts] {
    const auto corpus = ingest::load_corpus(opts->corpus);
    searchenv::IndexOptions io;
    io.top_k = opts->top_k;
    io.embedder = make_embedder(opts->embed_url, opts->embed_dim);
    const auto index = searchenv::build_index(corpus, backend_or_throw(opts->backend), io);
    index->save(opts->out);
    std::cout << "indexed " << index->size() << " documents (" << opts->backend << ") into "
              << opts->out << '\n';
  });
}

}  // namespace claimforge::cli
