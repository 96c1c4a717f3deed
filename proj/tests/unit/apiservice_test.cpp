#include <gtest/gtest.h>

#include <thread>

#include "claimforge/apiservice/service.h"
#include "claimforge/ingest/dataset.h"
#include "claimforge/lexedit/editor.h"
#include "claimforge/policy/trainer.h"
#include "claimforge/searchenv/endpoint.h"
#include "claimforge/trajgen/generator.h"
#include "fixtures.h"

#include <httplib.h>
#include <json.hpp>

namespace claimforge::apiservice {
namespace {

using nlohmann::json;

std::shared_ptr<const policy::LoadedModel> small_dt(const ingest::PlantedBenchmark& bench,
                                                     const searchenv::Scorer& scorer) {
  const auto claims = ingest::tokenize_claims(bench.data.claims, bench.lexicon);
  std::vector<trajgen::Trajectory> ts;
  const trajgen::RewardMode dense[] = {trajgen::RewardMode::kDense};
  for (const auto& r : trajgen::generate_dataset(claims, bench.lexicon, scorer, {})) {
    const auto t = trajgen::to_trajectories(r, dense);
    ts.insert(ts.end(), t.begin(), t.end());
  }
  policy::PolicyConfig cfg;
  cfg.embed_dim = 16;
  cfg.n_heads = 2;
  cfg.n_layers = 1;
  cfg.epochs = 3;
  cfg.encoder_buckets = 1024;
  return std::make_shared<const policy::LoadedModel>(policy::train_decision_transformer(ts, cfg).model);
}

struct World {
  const ingest::PlantedBenchmark& bench = testing::small_planted();
  std::shared_ptr<const searchenv::SearchEndpoint> bm25 =
      searchenv::build_index(bench.data.corpus, searchenv::BackendKind::kBm25);
  std::shared_ptr<const searchenv::SearchEndpoint> knn =
      searchenv::build_index(bench.data.corpus, searchenv::BackendKind::kKnn);
  searchenv::Scorer scorer{*bm25, bench.data.corpus, {}};
  std::shared_ptr<const policy::LoadedModel> model = small_dt(bench, scorer);

  ServiceArtifacts artifacts(bool with_model = true) const {
    return ServiceArtifacts{bench.data.corpus,
                            bench.lexicon,
                            {{searchenv::BackendKind::kBm25, bm25}, {searchenv::BackendKind::kKnn, knn}},
                            with_model ? model : nullptr,
                            {}};
  }
};

const World& world() {
  static const World w;
  return w;
}

const ApiService& service() {
  static const ApiService s(world().artifacts());
  return s;
}

json call(const ApiService& s, const std::string& method, const std::string& path, const json& body,
          int expect_status = 200) {
  const auto r = s.handle(method, path, body.is_null() ? "" : body.dump());
  EXPECT_EQ(r.status, expect_status) << path << " " << r.body;
  return json::parse(r.body);
}

std::string error_code(const json& j) { return j.at("error").at("code").get<std::string>(); }

TEST(Api, TokenizeThenApplyMatchesInProcess) {
  const auto& w = world();
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& text = w.bench.data.claims[i].claim;
    const auto tok = call(service(), "POST", "/v1/tokenize", {{"text", text}});
    auto claim = lexedit::tokenize(text, w.bench.lexicon);
    EXPECT_EQ(tok.at("tokens").get<std::vector<std::string>>(), claim.tokens());
    const auto legal = lexedit::legal_actions(claim, w.bench.lexicon);
    ASSERT_EQ(tok.at("legal_actions").size(), legal.size());
    json tokens = tok.at("tokens");
    for (int step = 0; step < 3 && !tok.at("legal_actions").empty(); ++step) {
      const auto options = lexedit::legal_actions(claim, w.bench.lexicon);
      if (options.empty()) break;
      const auto action = options[(i + step) % options.size()];
      const auto out = call(service(), "POST", "/v1/apply",
                            {{"tokens", tokens}, {"action_flat", lexedit::flatten_action(action)}});
      claim = lexedit::apply_action(claim, action, w.bench.lexicon);
      EXPECT_EQ(out.at("new_text").get<std::string>(), claim.text());
      EXPECT_EQ(out.at("tokens").get<std::vector<std::string>>(), claim.tokens());
      EXPECT_EQ(out.at("legal_actions").size(), lexedit::legal_actions(claim, w.bench.lexicon).size());
      tokens = out.at("tokens");
    }
  }
}

TEST(Api, ApplyRejectsIllegalActions) {
  const auto tokens = json::array({"the", "cat"});
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/apply", {{"tokens", tokens}, {"action_flat", 200}}, 400)),
            "IllegalAction");
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/apply", {{"tokens", tokens}, {"action_flat", 96 + 20}}, 400)),
            "IllegalAction");
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/tokenize", {{"text", "   "}}, 400)), "EmptyClaim");
}

TEST(Api, ScoreKnnRrForRelevantDocumentText) {
  const auto& w = world();
  const auto& claim = w.bench.data.claims[0];
  const auto& doc = w.bench.data.corpus.find(claim.relevant_doc_ids[0])->text;
  const auto out = call(service(), "POST", "/v1/score",
                        {{"text", doc}, {"backend", "knn"}, {"metric", "rr"}, {"k", 10}, {"claim_id", claim.claim_id}});
  EXPECT_EQ(out.at("reward").get<double>(), 1.0);
  EXPECT_EQ(out.at("ranking").at(0).at("relevant"), true);
  EXPECT_LE(out.at("ranking").size(), 10u);
  const auto bare = call(service(), "POST", "/score", {{"text", doc}});
  EXPECT_TRUE(bare.at("reward").is_null());
  EXPECT_EQ(bare.at("backend"), "bm25");
  EXPECT_EQ(bare.at("k"), 50);
}

TEST(Api, SuggestApplyScoreReproducesPreview) {
  const auto& w = world();
  int checked = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& c = w.bench.data.claims[i];
    const auto sug = call(service(), "POST", "/v1/suggest", {{"text", c.claim}, {"claim_id", c.claim_id}});
    EXPECT_EQ(sug.at("policy"), "dt");
    double total = 0.0;
    for (const auto& a : sug.at("actions")) total += a.at("predicted").get<double>();
    EXPECT_NEAR(total, 1.0, 1e-9);
    const auto& steps = sug.at("rollout_preview").at("steps");
    if (steps.empty()) continue;
    const auto tok = call(service(), "POST", "/v1/tokenize", {{"text", c.claim}});
    const auto applied = call(service(), "POST", "/v1/apply",
                              {{"tokens", tok.at("tokens")}, {"action_flat", steps[0].at("flat")}});
    EXPECT_EQ(applied.at("new_text"), steps[0].at("text"));
    const auto scored = call(service(), "POST", "/v1/score",
                             {{"text", applied.at("new_text")}, {"claim_id", c.claim_id}});
    EXPECT_EQ(scored.at("reward").get<double>(), steps[0].at("reward").get<double>());
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(Api, StatelessReplay) {
  const auto& c = world().bench.data.claims[3];
  const json req{{"text", c.claim}, {"claim_id", c.claim_id}};
  const auto first = service().handle("POST", "/v1/suggest", req.dump());
  service().handle("POST", "/v1/score", json{{"text", "unrelated words"}}.dump());
  service().handle("POST", "/v1/suggest", json{{"text", "other"}, {"claim_id", c.claim_id}}.dump());
  const auto second = service().handle("POST", "/v1/suggest", req.dump());
  EXPECT_EQ(first.body, second.body);
  const ApiService fresh(world().artifacts());
  EXPECT_EQ(fresh.handle("POST", "/v1/suggest", req.dump()).body, first.body);
}

TEST(Api, ErrorsAndRouting) {
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/tokenize", json(), 400)), "ParseError");
  EXPECT_EQ(service().handle("POST", "/v1/tokenize", "{bad").status, 400);
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/tokenize", json::array({1}), 400)), "ParseError");
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/tokenize", {{"txt", "a"}}, 400)), "InvalidArgument");
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/tokenize", {{"text", 3}}, 400)), "InvalidArgument");
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/score", {{"text", "a"}, {"claim_id", "nope"}}, 400)),
            "UnknownClaim");
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/score", {{"text", "a"}, {"backend", "solr"}}, 400)),
            "InvalidArgument");
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/suggest", {{"text", "a b"}, {"claim_id", "nope"}}, 400)),
            "UnknownClaim");
  EXPECT_EQ(error_code(call(service(), "GET", "/v1/tokenize", json(), 405)), "MethodNotAllowed");
  EXPECT_EQ(error_code(call(service(), "POST", "/v1/health", json(), 405)), "MethodNotAllowed");
  EXPECT_EQ(error_code(call(service(), "GET", "/v1/nothing", json(), 404)), "NotFound");
  const ApiService no_model(world().artifacts(false));
  EXPECT_EQ(error_code(call(no_model, "POST", "/v1/suggest", {{"text", "a"}, {"claim_id", "x"}}, 503)),
            "NoPolicy");
}

TEST(Api, HealthAndStats) {
  const auto& w = world();
  const auto h = call(service(), "GET", "/v1/health", json());
  EXPECT_EQ(h.at("status"), "ok");
  EXPECT_EQ(h.at("documents"), w.bench.data.corpus.size());
  EXPECT_EQ(h.at("backends"), json::array({"bm25", "knn"}));
  EXPECT_EQ(h.at("policy"), "dt");
  const auto s = call(service(), "GET", "/corpus/stats", json());
  EXPECT_EQ(s.at("judged_claims"), w.bench.data.claims.size());
  EXPECT_EQ(s.at("relevant_pairs"), w.bench.data.claims.size());
  EXPECT_GT(s.at("mean_doc_terms").get<double>(), 0.0);
}

TEST(Api, Snippet) {
  EXPECT_EQ(snippet("short text"), "short text");
  EXPECT_EQ(snippet("alpha beta gamma", 12), "alpha beta...");
  EXPECT_EQ(snippet("abcdefghijkl mn", 5), "abcde...");
  const std::string long_text(150, 'a');
  const auto s = snippet(long_text + " " + long_text);
  EXPECT_EQ(s, long_text + "...");
  EXPECT_LE(snippet(std::string(500, 'x')).size(), kSnippetChars + 3);
}

TEST(Api, LoopbackHttp) {
  HttpServer server(service());
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  httplib::Result health;
  for (int attempt = 0; attempt < 50 && !health; ++attempt) {
    health = client.Get("/v1/health");
    if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body).at("status"), "ok");
  const auto tok = client.Post("/v1/tokenize", json{{"text", "the cat sat"}}.dump(), "application/json");
  ASSERT_TRUE(tok);
  EXPECT_EQ(json::parse(tok->body).at("tokens"), json::array({"the", "cat", "sat"}));
  const auto bad = client.Post("/v1/apply", "{", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(client.Get("/v1/missing")->status, 404);
  server.stop();
  t.join();
}

}  // namespace
}  // namespace claimforge::apiservice
