#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "claimforge/searchenv/analyzer.h"
#include "claimforge/searchenv/bm25_index.h"
#include "claimforge/searchenv/embedding.h"
#include "claimforge/searchenv/endpoint.h"
#include "claimforge/searchenv/hnsw_index.h"
#include "claimforge/searchenv/metrics.h"
#include "claimforge/searchenv/reward.h"
#include "claimforge/lexedit/tokenized_claim.h"
#include "expect_error.h"
#include "fixtures.h"
#include "oracles.h"
#include "prop.h"

namespace claimforge::searchenv {
namespace {

using testing::thrown_code;
using Ids = std::vector<std::string>;

Ids ids_of(const std::vector<ScoredDoc>& hits) {
  Ids out;
  for (const auto& h : hits) out.push_back(h.doc_id);
  return out;
}

TEST(Metrics, Examples) {
  const Ids ranking{"d1", "d2", "d3"};
  EXPECT_NEAR(ap_at_k(ranking, {"d1", "d3"}, 3), (1.0 + 2.0 / 3.0) / 2.0, 1e-12);
  EXPECT_EQ(ap_at_k(ranking, {"d9"}, 3), 0.0);
  EXPECT_EQ(ap_at_k(ranking, {"d1", "d2"}, 3), 1.0);
  EXPECT_EQ(recall_at_k(Ids{"d2", "d1"}, {"d1"}, 2), 1.0);
  EXPECT_EQ(reciprocal_rank(Ids{"d2", "d1"}, {"d1"}, 2), 0.5);
  EXPECT_EQ(recall_at_k(Ids{"d2", "d1"}, {"d1"}, 1), 0.0);
  EXPECT_EQ(reciprocal_rank(Ids{"d2", "d1"}, {"d1"}, 1), 0.0);
  EXPECT_EQ(reciprocal_rank(Ids{"d1"}, {"d1"}, 5), 1.0);
  EXPECT_EQ(ap_at_k(ranking, {}, 3), 0.0);
  EXPECT_EQ(thrown_code([&] { ap_at_k(ranking, {"d1"}, 0); }), ErrorCode::kInvalidArgument);
}

TEST(Metrics, ApNormalizesByMinOfRelevantAndK) {
  EXPECT_EQ(ap_at_k(Ids{"a", "b"}, {"a", "b", "c", "d"}, 2), 1.0);
}

TEST(MetricsProperty, MatchOracleAndStayBounded) {
  testing::Gen g(101);
  for (int i = 0; i < 1000; ++i) {
    const int pool = g.integer(1, 30);
    Ids ranking;
    for (int d = 0; d < pool; ++d) {
      if (g.coin(0.7)) ranking.push_back("d" + std::to_string(d));
    }
    std::set<std::string> relevant;
    for (int d = 0; d < pool; ++d) {
      if (g.coin(0.2)) relevant.insert("d" + std::to_string(d));
    }
    const int k = g.integer(1, 35);
    const double ap = ap_at_k(ranking, relevant, k);
    const double rc = recall_at_k(ranking, relevant, k);
    const double rr = reciprocal_rank(ranking, relevant, k);
    ASSERT_NEAR(ap, testing::oracle_ap(ranking, relevant, k), 1e-9);
    ASSERT_NEAR(rc, testing::oracle_recall(ranking, relevant, k), 1e-9);
    ASSERT_NEAR(rr, testing::oracle_rr(ranking, relevant, k), 1e-9);
    for (double v : {ap, rc, rr}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
    Ids longer = ranking;
    longer.push_back("extra" + std::to_string(i));
    if (k >= static_cast<int>(longer.size())) ASSERT_GE(recall_at_k(longer, relevant, k), rc);
  }
}

TEST(Bm25, HandComputedExample) {
  const auto corpus = testing::make_corpus({{"d1", "cat sat"}, {"d2", "dog sat"}, {"d3", "cat cat"}});
  const auto index = build_index(corpus, BackendKind::kBm25);
  const auto hits = index->query("cat");
  ASSERT_EQ(ids_of(hits), (Ids{"d3", "d1"}));
  // idf = ln(1 + 1.5/2.5); avgdl = 2, every doc has length 2.
  const double idf = std::log(1.0 + 1.5 / 2.5);
  EXPECT_NEAR(hits[0].score, idf * 2 * 2.2 / (2 + 1.2), 1e-12);
  EXPECT_NEAR(hits[1].score, idf * 1 * 2.2 / (1 + 1.2), 1e-12);
}

TEST(Bm25, EdgeCases) {
  const auto corpus = testing::make_corpus({{"b", "same words"}, {"a", "same words"}, {"c", "other"}});
  const auto index = build_index(corpus, BackendKind::kBm25);
  EXPECT_TRUE(index->query("absent").empty());
  EXPECT_EQ(ids_of(index->query("same")), (Ids{"a", "b"}));
  EXPECT_EQ(index->query("same", 1).size(), 1u);
  EXPECT_EQ(thrown_code([&] { index->query("   "); }), ErrorCode::kEmptyQuery);
  EXPECT_EQ(thrown_code([] { build_index(Corpus{}, BackendKind::kBm25); }), ErrorCode::kEmptyCorpus);
  EXPECT_EQ(thrown_code([] { build_index(Corpus{}, BackendKind::kKnn); }), ErrorCode::kEmptyCorpus);
}

TEST(Bm25Property, MatchesDirectOkapi) {
  testing::Gen g(7);
  std::vector<std::string> vocab;
  for (int i = 0; i < 25; ++i) vocab.push_back(g.word(5));
  for (int round = 0; round < 50; ++round) {
    Corpus corpus;
    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    const int n = g.integer(1, 20);
    for (int d = 0; d < n; ++d) {
      std::string text;
      const int len = g.integer(1, 12);
      for (int w = 0; w < len; ++w) text += g.pick(vocab) + " ";
      const auto id = "doc" + std::to_string(d);
      corpus.add_document(id, text);
      docs.emplace_back(id, analyze(text));
    }
    const auto index = build_index(corpus, BackendKind::kBm25);
    for (int q = 0; q < 10; ++q) {
      std::string query;
      for (int w = g.integer(1, 4); w > 0; --w) query += g.pick(vocab) + " ";
      auto expected = testing::oracle_bm25(docs, analyze(query));
      const auto hits = index->query(query, 100);
      ASSERT_EQ(hits.size(), expected.size());
      for (const auto& h : hits) {
        const auto it = std::find_if(expected.begin(), expected.end(),
                                     [&](const auto& e) { return e.first == h.doc_id; });
        ASSERT_NE(it, expected.end());
        ASSERT_NEAR(h.score, it->second, 1e-9);
      }
      for (std::size_t i = 1; i < hits.size(); ++i) {
        ASSERT_TRUE(hits[i - 1].score > hits[i].score ||
                    (hits[i - 1].score == hits[i].score && hits[i - 1].doc_id < hits[i].doc_id));
      }
    }
  }
}

TEST(Embedding, UnitNormAndIdentity) {
  const HashedBowEmbedder e(256);
  for (const char* text : {"cat", "the earth is flat", "a b c d e f g"}) {
    const auto v = e.embed(text);
    double n = 0.0;
    for (float x : v) n += static_cast<double>(x) * x;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
    EXPECT_EQ(v, e.embed(text));
  }
  EXPECT_EQ(thrown_code([&] { e.embed(" "); }), ErrorCode::kEmptyQuery);
}

TEST(Embedding, RepeatedTermKeepsDirection) {
  const HashedBowEmbedder e(256);
  EXPECT_NEAR(testing::cosine(e.embed("cat cat"), e.embed("cat")), 1.0, 1e-6);
}

Corpus random_corpus(testing::Gen& g, int n, int vocab_size) {
  std::vector<std::string> vocab;
  for (int i = 0; i < vocab_size; ++i) vocab.push_back(g.word(7));
  Corpus corpus;
  for (int d = 0; d < n; ++d) {
    std::string text;
    for (int w = g.integer(3, 12); w > 0; --w) text += g.pick(vocab) + " ";
    corpus.add_document("doc" + std::to_string(d), text);
  }
  return corpus;
}

TEST(Knn, SelfQueryRanksDocumentFirst) {
  testing::Gen g(3);
  const auto corpus = random_corpus(g, 300, 400);
  const auto index = build_index(corpus, BackendKind::kKnn);
  for (int i = 0; i < 20; ++i) {
    const auto& doc = corpus.documents()[g.index(corpus.size())];
    const auto hits = index->query(doc.text, 5);
    ASSERT_FALSE(hits.empty());
    EXPECT_NEAR(hits[0].score, 1.0, 1e-5);
    // A duplicate text could tie; the winner must have the same embedding.
    EXPECT_EQ(corpus.find(hits[0].doc_id)->text == doc.text || hits[0].doc_id == doc.doc_id, true);
  }
}

TEST(Knn, DeterministicGraph) {
  testing::Gen g1(9);
  testing::Gen g2(9);
  const auto c1 = random_corpus(g1, 400, 300);
  const auto c2 = random_corpus(g2, 400, 300);
  const auto a = build_index(c1, BackendKind::kKnn);
  const auto b = build_index(c2, BackendKind::kKnn);
  const auto& ga = dynamic_cast<const KnnIndex&>(*a).graph();
  const auto& gb = dynamic_cast<const KnnIndex&>(*b).graph();
  EXPECT_TRUE(ga == gb);
  EXPECT_EQ(ids_of(a->query("alpha beta " + c1.documents()[0].text)),
            ids_of(b->query("alpha beta " + c2.documents()[0].text)));
}

TEST(Knn, RecallAgainstExactScan) {
  testing::Gen g(21);
  const std::size_t dim = 64;
  HnswGraph graph(dim, HnswParams{});
  std::vector<std::vector<float>> vectors;
  std::normal_distribution<float> n(0.0F, 1.0F);
  auto unit = [&] {
    std::vector<float> v(dim);
    double s = 0.0;
    for (auto& x : v) {
      x = n(g.engine());
      s += static_cast<double>(x) * x;
    }
    for (auto& x : v) x = static_cast<float>(x / std::sqrt(s));
    return v;
  };
  for (int i = 0; i < 2000; ++i) {
    vectors.push_back(unit());
    graph.add(vectors.back());
  }
  double overlap = 0.0;
  const int queries = 100;
  for (int q = 0; q < queries; ++q) {
    const auto query = unit();
    const auto exact = testing::oracle_knn(vectors, query, 10);
    const auto approx = graph.search(query, 10, 100);
    std::set<std::size_t> got;
    for (const auto& nb : approx) got.insert(nb.id);
    for (auto id : exact) overlap += got.count(id);
  }
  EXPECT_GE(overlap / (10.0 * queries), 0.9);
}

TEST(Snapshot, RoundTripBothBackends) {
  testing::Gen g(4);
  const auto corpus = random_corpus(g, 200, 150);
  testing::TempDir dir;
  for (const auto backend : {BackendKind::kBm25, BackendKind::kKnn}) {
    const auto index = build_index(corpus, backend);
    const auto path = dir / (std::string(backend_name(backend)) + ".idx");
    index->save(path);
    const auto loaded = load_index(path);
    EXPECT_EQ(loaded->backend(), backend);
    EXPECT_EQ(loaded->size(), index->size());
    for (int q = 0; q < 20; ++q) {
      const auto& text = corpus.documents()[g.index(corpus.size())].text;
      const auto a = index->query(text);
      const auto b = loaded->query(text);
      ASSERT_EQ(ids_of(a), ids_of(b));
      for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i].score, b[i].score);
    }
  }
}

TEST(Snapshot, RejectsBadMagicAndTruncation) {
  testing::TempDir dir;
  testing::write_file(dir / "bad.idx", "NOPE and more bytes");
  EXPECT_EQ(thrown_code([&] { load_index(dir / "bad.idx"); }), ErrorCode::kFormatError);
  const auto corpus = testing::make_corpus({{"a", "one two"}, {"b", "two three"}});
  build_index(corpus, BackendKind::kBm25)->save(dir / "ok.idx");
  const auto bytes = testing::read_file(dir / "ok.idx");
  testing::write_file(dir / "cut.idx", bytes.substr(0, bytes.size() / 2));
  EXPECT_EQ(thrown_code([&] { load_index(dir / "cut.idx"); }), ErrorCode::kFormatError);
  auto wrong_version = bytes;
  wrong_version[4] = 99;
  testing::write_file(dir / "ver.idx", wrong_version);
  EXPECT_EQ(thrown_code([&] { load_index(dir / "ver.idx"); }), ErrorCode::kFormatError);
}

TEST(Reward, ExamplesAndErrors) {
  auto corpus = testing::make_corpus({{"d1", "the earth is round"},
                                      {"d2", "vaccines are safe"},
                                      {"d3", "cats sleep a lot"}});
  corpus.set_relevant("c1", {"d1"});
  const auto knn = build_index(corpus, BackendKind::kKnn);
  const auto bm25 = build_index(corpus, BackendKind::kBm25);
  const auto& lx = testing::bundled_lexicon();
  EXPECT_EQ(reward(*knn, lexedit::tokenize("the earth is round", lx, "c1"), {Metric::kRr, 50}, corpus), 1.0);
  EXPECT_EQ(reward(*bm25, lexedit::tokenize("dogs bark", lx, "c1"), {}, corpus), 0.0);
  EXPECT_EQ(thrown_code([&] { reward(*bm25, lexedit::tokenize("earth", lx, "nope"), {}, corpus); }),
            ErrorCode::kUnknownClaim);
}

TEST(Reward, MatchesMetricOracleOnFixture) {
  testing::Gen g(12);
  auto corpus = random_corpus(g, 10, 20);
  corpus.set_relevant("c", {"doc1", "doc4", "doc7"});
  const auto index = build_index(corpus, BackendKind::kBm25);
  const auto& lx = testing::bundled_lexicon();
  for (int i = 0; i < 10; ++i) {
    const auto text = corpus.documents()[g.index(10)].text;
    const auto hits = ids_of(index->query(text, 50));
    const std::set<std::string> rel{"doc1", "doc4", "doc7"};
    for (const auto m : {Metric::kAp, Metric::kRecall, Metric::kRr}) {
      const double expected = m == Metric::kAp       ? testing::oracle_ap(hits, rel, 5)
                              : m == Metric::kRecall ? testing::oracle_recall(hits, rel, 5)
                                                     : testing::oracle_rr(hits, rel, 5);
      EXPECT_NEAR(reward(*index, lexedit::tokenize(text, lx, "c"), {m, 5}, corpus), expected, 1e-12);
    }
  }
}

// Local stand-in for an embedding service: hashes characters into dim slots.
class FakeEmbeddingServer {
 public:
  explicit FakeEmbeddingServer(std::size_t dim) {
    server_.Post("/embed", [dim, this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json vectors = nlohmann::json::array();
      for (const auto& t : body.at("texts")) {
        std::vector<float> v(dim, 0.0F);
        for (char c : t.get<std::string>()) v[static_cast<unsigned char>(c) % dim] += 1.0F;
        vectors.push_back(v);
      }
      res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEmbeddingServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::atomic<int> requests{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(ExternalEmbedder, UsesServiceAndCaches) {
  FakeEmbeddingServer server(16);
  const ExternalEmbedder e(server.url(), 16);
  const auto v = e.embed("abc");
  EXPECT_EQ(v.size(), 16u);
  EXPECT_EQ(e.embed("abc"), v);
  EXPECT_EQ(server.requests.load(), 1);
  EXPECT_EQ(e.cache_size(), 1u);

  auto corpus = testing::make_corpus({{"x", "hello world"}, {"y", "zzz"}});
  IndexOptions io;
  io.embedder = std::make_shared<ExternalEmbedder>(server.url(), 16);
  const auto index = build_index(corpus, BackendKind::kKnn, io);
  EXPECT_EQ(index->query("hello world", 1)[0].doc_id, "x");

  const ExternalEmbedder wrong_dim(server.url(), 8);
  EXPECT_EQ(thrown_code([&] { wrong_dim.embed("abc"); }), ErrorCode::kEmbeddingServiceUnavailable);
}

TEST(ExternalEmbedder, UnreachableServiceIsReported) {
  const ExternalEmbedder e("http://127.0.0.1:1", 8, 0.5);
  EXPECT_EQ(thrown_code([&] { e.embed("abc"); }), ErrorCode::kEmbeddingServiceUnavailable);
}

// trajgen and policy may only reach search through SearchEndpoint / Scorer.
TEST(Architecture, LearnersDoNotSeeIndexInternals) {
  const std::regex forbidden(R"(#include\s*[<"].*(bm25_index|hnsw_index)\.h[>"])");
  std::size_t scanned = 0;
  for (const char* sub : {"core/src/trajgen", "core/src/policy", "core/include/claimforge/trajgen",
                          "core/include/claimforge/policy"}) {
    for (const auto& entry : std::filesystem::directory_iterator(testing::source_dir() / sub)) {
      std::ifstream in(entry.path());
      std::string line;
      while (std::getline(in, line)) {
        EXPECT_FALSE(std::regex_search(line, forbidden)) << entry.path() << ": " << line;
      }
      ++scanned;
    }
  }
  EXPECT_GT(scanned, 10u);
}

}  // namespace
}  // namespace claimforge::searchenv
