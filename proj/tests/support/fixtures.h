#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <utility>

#include "claimforge/ingest/planted.h"
#include "claimforge/lexedit/lexicon.h"
#include "claimforge/searchenv/corpus.h"

namespace claimforge::testing {

std::filesystem::path data_dir();
std::filesystem::path source_dir();
const lexedit::Lexicon& bundled_lexicon();

searchenv::Corpus make_corpus(std::initializer_list<std::pair<const char*, const char*>> docs);

// A scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// 60 claims over 300 background documents, with answer key. Built once.
const ingest::PlantedBenchmark& small_planted();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace claimforge::testing
