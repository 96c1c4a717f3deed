#include <gtest/gtest.h>

#include "claimforge/ingest/dataset.h"
#include "claimforge/lexedit/editor.h"
#include "claimforge/policy/checkpoint.h"
#include "claimforge/policy/classifier.h"
#include "claimforge/policy/decision_transformer.h"
#include "claimforge/policy/rollout.h"
#include "claimforge/policy/trainer.h"
#include "claimforge/searchenv/endpoint.h"
#include "expect_error.h"
#include "fixtures.h"
#include "prop.h"

namespace claimforge::policy {
namespace {

using testing::thrown_code;
using trajgen::RewardMode;
using trajgen::Trajectory;

PolicyConfig small_config() {
  PolicyConfig c;
  c.n_layers = 2;
  c.n_heads = 2;
  c.embed_dim = 16;
  c.block_size = 4;
  c.encoder_buckets = 256;
  c.seed = 5;
  return c;
}

std::vector<EncodedState> prepare_all(const DecisionTransformer& m, std::initializer_list<const char*> texts) {
  std::vector<EncodedState> out;
  for (const char* t : texts) out.push_back(m.encoder().prepare(t));
  return out;
}

TEST(PolicyConfig, Validation) {
  for (auto mutate : std::vector<std::function<void(PolicyConfig&)>>{
           [](PolicyConfig& c) { c.n_heads = 3; }, [](PolicyConfig& c) { c.block_size = 0; },
           [](PolicyConfig& c) { c.epochs = -1; }, [](PolicyConfig& c) { c.learning_rate = 0; },
           [](PolicyConfig& c) { c.batch_size = 0; }}) {
    auto c = small_config();
    mutate(c);
    EXPECT_EQ(thrown_code([&] { c.validate(); }), ErrorCode::kInvalidArgument);
  }
}

TEST(DecisionTransformer, OutputShapeAndErrors) {
  DecisionTransformer m(small_config());
  const auto states = prepare_all(m, {"a b c", "a b", "b"});
  const std::vector<DtSequence> batch{{{{1.0, 0, 96}, {0.5, 1, 1}}}, {{{0.3, 2, 0}}}};
  const auto out = m.forward(batch, states);
  ASSERT_EQ(out.size(), 2u);
  for (const auto& x : out) {
    EXPECT_EQ(x.rows(), 4);
    EXPECT_EQ(x.cols(), 128);
    EXPECT_TRUE(x.allFinite());
  }
  const auto fwd = [&](std::vector<DtSequence> b) { m.forward(b, states); };
  EXPECT_EQ(thrown_code([&] { fwd({DtSequence{}}); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(thrown_code([&] { fwd({{{{1, 0, 1}, {1, 0, 1}, {1, 0, 1}, {1, 0, 1}, {1, 0, 1}}}}); }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(thrown_code([&] { fwd({{{{1, 0, 128}}}}); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(thrown_code([&] { fwd({{{{1, 3, 0}}}}); }), ErrorCode::kShapeMismatch);
}

// Left padding plus causal masking: a step's logits depend only on the
// tokens up to its state token.
TEST(DecisionTransformerProperty, PrefixInvariance) {
  DecisionTransformer m(small_config());
  testing::Gen g(17);
  std::vector<EncodedState> states;
  for (int i = 0; i < 12; ++i) states.push_back(m.encoder().prepare(g.word(4) + " " + g.word(5)));
  for (int trial = 0; trial < 40; ++trial) {
    DtSequence full;
    for (int t = g.integer(1, 4); t > 0; --t) {
      full.steps.push_back({g.real(0, 3), g.integer(0, 11), g.integer(0, 127)});
    }
    const auto whole = m.forward(std::vector<DtSequence>{full}, states)[0];
    const int T = static_cast<int>(full.steps.size());
    for (int len = 1; len <= T; ++len) {
      DtSequence prefix{{full.steps.begin(), full.steps.begin() + len}};
      // The action of the last step must not matter either.
      prefix.steps.back().action = g.integer(0, 127);
      const auto part = m.forward(std::vector<DtSequence>{prefix}, states)[0];
      ASSERT_TRUE(part.row(3).isApprox(whole.row(4 - T + len - 1), 1e-10));
    }
  }
}

TEST(DecisionTransformerProperty, BatchPermutationInvariance) {
  DecisionTransformer m(small_config());
  const auto states = prepare_all(m, {"a b c", "a b", "b", "c d"});
  std::vector<DtSequence> batch{{{{1.0, 0, 96}, {0.5, 1, 1}}}, {{{0.3, 2, 0}}},
                                {{{2.0, 3, 5}, {1.0, 1, 7}, {0.5, 0, 9}}}};
  const auto a = m.forward(batch, states);
  std::vector<DtSequence> reversed(batch.rbegin(), batch.rend());
  const auto b = m.forward(reversed, states);
  for (std::size_t i = 0; i < batch.size(); ++i) EXPECT_TRUE(a[i].isApprox(b[2 - i], 1e-12));
  EXPECT_NEAR(m.loss(batch, states), m.loss(reversed, states), 1e-12);
}

std::vector<Trajectory> toy_trajectories() {
  // Four fixed start states, each with its own two-step path.
  return {
      {"a", RewardMode::kDense, {{1.5, "red fox runs", 96, 0.5}, {1.0, "fox runs", 33, 1.0}}, 1.0, 0.1},
      {"b", RewardMode::kDense, {{1.2, "blue owl sleeps", 65, 0.6}, {0.6, "blue owl slept", 2, 0.6}}, 0.6, 0.2},
      {"c", RewardMode::kDense, {{0.9, "green frog jumps", 1, 0.9}}, 0.9, 0.3},
      {"d", RewardMode::kDense, {{1.8, "old bear eats fish", 98, 0.8}, {1.0, "old bear fish", 34, 1.0}}, 1.0, 0.4},
  };
}

TEST(Training, MemorizesToyData) {
  auto cfg = small_config();
  cfg.epochs = 300;
  cfg.batch_size = 4;
  cfg.learning_rate = 3e-3;
  const auto ts = toy_trajectories();
  const auto dt = train_decision_transformer(ts, cfg);
  EXPECT_GT(dt.report.initial_loss, 3.0);
  EXPECT_LT(dt.report.epoch_losses.back(), 0.05);
  EXPECT_EQ(dt.report.examples, ts.size());
  const auto cls = train_classifier(ts, cfg);
  EXPECT_LT(cls.report.epoch_losses.back(), 0.05);
  for (const auto& t : ts) EXPECT_EQ(cls.model.classify(t.steps[0].state), t.steps[0].action);
}

TEST(Training, DeterministicForSeed) {
  auto cfg = small_config();
  cfg.epochs = 3;
  cfg.batch_size = 2;
  const auto ts = toy_trajectories();
  const auto a = train_decision_transformer(ts, cfg);
  const auto b = train_decision_transformer(ts, cfg);
  EXPECT_EQ(a.report.epoch_losses, b.report.epoch_losses);
  for (std::size_t i = 0; i < a.model.params().all().size(); ++i) {
    EXPECT_EQ(a.model.params().all()[i]->value, b.model.params().all()[i]->value);
  }
  cfg.seed = 6;
  const auto c = train_decision_transformer(ts, cfg);
  EXPECT_NE(a.report.epoch_losses, c.report.epoch_losses);
}

TEST(Training, Errors) {
  const auto cfg = small_config();
  EXPECT_EQ(thrown_code([&] { train_decision_transformer({}, cfg); }), ErrorCode::kEmptyDataset);
  EXPECT_EQ(thrown_code([&] { train_classifier({}, cfg); }), ErrorCode::kEmptyDataset);
  Trajectory too_long{"x", RewardMode::kDense, {}, 0.0, std::nullopt};
  for (int i = 0; i < 5; ++i) too_long.steps.push_back({0.1, "a", 1, 0.1});
  EXPECT_EQ(thrown_code([&] { train_decision_transformer(std::vector{too_long}, cfg); }),
            ErrorCode::kShapeMismatch);
}

TEST(Training, RtgQuantile) {
  std::vector<Trajectory> ts;
  for (double r : {0.4, 0.1, 0.3, 0.2, 0.5}) ts.push_back({"x", RewardMode::kDense, {{r, "a", 1, r}}, r, {}});
  EXPECT_NEAR(initial_rtg_quantile(ts, 0.9), 0.46, 1e-12);
  EXPECT_NEAR(initial_rtg_quantile(ts, 0.5), 0.3, 1e-12);
  EXPECT_EQ(initial_rtg_quantile(ts, 0.0), 0.1);
}

// Every training example starts with remove@0, so the unmasked argmax is 96.
TEST(Classifier, DegenerateDataPredictsRemoveFirst) {
  auto cfg = small_config();
  cfg.epochs = 30;
  cfg.learning_rate = 3e-3;
  testing::Gen g(2);
  std::vector<Trajectory> ts;
  for (int i = 0; i < 40; ++i) {
    ts.push_back({"c" + std::to_string(i), RewardMode::kDense,
                  {{0.5, g.word(4) + " " + g.word(6) + " " + g.word(3), 96, 0.5}}, 0.5, {}});
  }
  const auto cls = train_classifier(ts, cfg);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(cls.model.classify(g.word(5) + " " + g.word(4)), 96);
}

TEST(Checkpoint, RoundTripBothKinds) {
  auto cfg = small_config();
  cfg.epochs = 2;
  const auto ts = toy_trajectories();
  auto dt = train_decision_transformer(ts, cfg);
  const auto cls = train_classifier(ts, cfg);
  testing::TempDir dir;
  save_checkpoint(dir / "dt.ckpt", dt.model);
  save_checkpoint(dir / "cls.ckpt", cls.model);

  const auto loaded_dt = load_checkpoint(dir / "dt.ckpt");
  const auto* m = std::get_if<DecisionTransformer>(&loaded_dt);
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->target_rtg, dt.model.target_rtg);
  const auto states = prepare_all(dt.model, {"red fox runs", "fox runs"});
  const std::vector<DtSequence> batch{{{{1.5, 0, 96}, {1.0, 1, 33}}}};
  EXPECT_EQ(m->forward(batch, states)[0], dt.model.forward(batch, states)[0]);

  const auto loaded_cls = load_checkpoint(dir / "cls.ckpt");
  const auto* c = std::get_if<ActionClassifier>(&loaded_cls);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->logits("red fox runs"), cls.model.logits("red fox runs"));

  auto bytes = testing::read_file(dir / "dt.ckpt");
  testing::write_file(dir / "cut.ckpt", bytes.substr(0, bytes.size() - 9));
  EXPECT_EQ(thrown_code([&] { load_checkpoint(dir / "cut.ckpt"); }), ErrorCode::kFormatError);
  bytes[0] = 'X';
  testing::write_file(dir / "magic.ckpt", bytes);
  EXPECT_EQ(thrown_code([&] { load_checkpoint(dir / "magic.ckpt"); }), ErrorCode::kFormatError);
}

struct PlantedScorer {
  const ingest::PlantedBenchmark& bench = testing::small_planted();
  std::unique_ptr<searchenv::SearchEndpoint> index =
      searchenv::build_index(bench.data.corpus, searchenv::BackendKind::kBm25);
  searchenv::Scorer scorer{*index, bench.data.corpus, {}};
  std::vector<lexedit::TokenizedClaim> claims = ingest::tokenize_claims(bench.data.claims, bench.lexicon);
};

const PlantedScorer& planted() {
  static const PlantedScorer p;
  return p;
}

void expect_consistent(const RolloutRecord& r, const lexedit::TokenizedClaim& claim,
                       const PlantedScorer& p, int max_steps, bool stops_at_perfect = true) {
  EXPECT_EQ(r.original_reward, p.scorer(claim));
  EXPECT_EQ(r.original_text, claim.text());
  ASSERT_LE(r.actions.size(), static_cast<std::size_t>(max_steps));
  ASSERT_EQ(r.texts.size(), r.actions.size());
  ASSERT_EQ(r.rewards.size(), r.actions.size());
  auto state = claim;
  for (std::size_t t = 0; t < r.actions.size(); ++t) {
    const auto a = lexedit::unflatten_action(r.actions[t]);
    ASSERT_TRUE(lexedit::is_legal(state, a, p.bench.lexicon));
    state = lexedit::apply_action(state, a, p.bench.lexicon);
    EXPECT_EQ(r.texts[t], state.text());
    EXPECT_EQ(r.rewards[t], p.scorer(state));
    if (stops_at_perfect && t + 1 < r.actions.size()) EXPECT_LT(r.rewards[t], 1.0);
  }
}

TEST(Rollout, RtgBookkeepingAndLegality) {
  const auto& p = planted();
  auto cfg = small_config();
  cfg.epochs = 1;
  const auto dt = train_decision_transformer(toy_trajectories(), cfg);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto r = rollout(dt.model, p.claims[i], p.bench.lexicon, p.scorer, {2.5, false});
    expect_consistent(r, p.claims[i], p, cfg.block_size);
    ASSERT_EQ(r.rtg_inputs.size(), r.actions.size());
    if (r.rtg_inputs.empty()) continue;
    EXPECT_EQ(r.rtg_inputs[0], 2.5);
    for (std::size_t t = 1; t < r.rtg_inputs.size(); ++t) {
      EXPECT_NEAR(r.rtg_inputs[t], r.rtg_inputs[t - 1] - r.rewards[t - 1], 1e-12);
    }
  }
  const auto d = rollout(dt.model, p.claims[0], p.bench.lexicon, p.scorer);
  if (!d.rtg_inputs.empty()) EXPECT_EQ(d.rtg_inputs[0], dt.model.target_rtg);
}

TEST(Rollout, BaselinesAreConsistent) {
  const auto& p = planted();
  auto cfg = small_config();
  cfg.epochs = 1;
  const auto cls = train_classifier(toy_trajectories(), cfg);
  const ClassifierRewriter once(cls.model, false, 4);
  const ClassifierRewriter iterated(cls.model, true, 4);
  const RandomRewriter random(4, 9);
  const IdentityRewriter identity;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& c = p.claims[i];
    const auto o = once.rewrite(c, p.bench.lexicon, p.scorer);
    expect_consistent(o, c, p, 1);
    expect_consistent(iterated.rewrite(c, p.bench.lexicon, p.scorer), c, p, 4);
    const auto r = random.rewrite(c, p.bench.lexicon, p.scorer);
    expect_consistent(r, c, p, 4, false);
    EXPECT_EQ(r.actions, random.rewrite(c, p.bench.lexicon, p.scorer).actions);
    const auto id = identity.rewrite(c, p.bench.lexicon, p.scorer);
    EXPECT_TRUE(id.actions.empty());
    EXPECT_EQ(id.final_reward(), id.original_reward);
  }
}

TEST(Rollout, MaskedArgmax) {
  const auto& lx = testing::bundled_lexicon();
  const auto claim = lexedit::tokenize("the cat sat", lx);
  RowVector logits = RowVector::Zero(128);
  logits(127) = 5.0;  // remove@31 is out of range
  const int best = masked_argmax(logits, claim, lx);
  EXPECT_NE(best, 127);
  EXPECT_TRUE(lexedit::is_legal(claim, lexedit::unflatten_action(best), lx));
  // Equal logits: the lowest legal id wins.
  int lowest = -1;
  for (int f = 0; f < 128 && lowest < 0; ++f) {
    if (lexedit::is_legal(claim, lexedit::unflatten_action(f), lx)) lowest = f;
  }
  EXPECT_EQ(masked_argmax(RowVector::Zero(128), claim, lx), lowest);
}

}  // namespace
}  // namespace claimforge::policy
