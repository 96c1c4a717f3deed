#include "fixtures.h"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

namespace claimforge::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return CLAIMFORGE_DATA_DIR; }
fs::path source_dir() { return CLAIMFORGE_SOURCE_DIR; }

const lexedit::Lexicon& bundled_lexicon() {
  static const auto lexicon = lexedit::Lexicon::load(data_dir() / "lexicon");
  return lexicon;
}

searchenv::Corpus make_corpus(std::initializer_list<std::pair<const char*, const char*>> docs) {
  searchenv::Corpus c;
  for (const auto& [id, text] : docs) c.add_document(id, text);
  return c;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("claimforge-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
           std::to_string(rd()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

const ingest::PlantedBenchmark& small_planted() {
  static const auto bench = [] {
    ingest::PlantedConfig cfg;
    cfg.n_claims = 60;
    cfg.background_docs = 300;
    return ingest::make_planted_benchmark(cfg);
  }();
  return bench;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream(path, std::ios::binary) << content;
}

}  // namespace claimforge::testing
