#include <filesystem>
#include <fstream>
#include <iostream>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "claimforge/error.h"
#include "claimforge/evalharness/pipeline.h"
#include "claimforge/evalharness/report.h"
#include "claimforge/lexedit/editor.h"
#include "claimforge/policy/checkpoint.h"
#include "claimforge/policy/rollout.h"
#include "commands.h"
#include "common.h"

namespace claimforge::cli {

namespace fs = std::filesystem;

namespace {

struct PolicyChoice {
  std::unique_ptr<policy::Rewriter> rewriter;
  int block_size = 4;
};

PolicyChoice make_rewriter(const policy::LoadedModel& model, std::optional<double> target_rtg,
                           bool classifier_once, bool terminate_on_illegal) {
  PolicyChoice out;
  if (const auto* dt = std::get_if<policy::DecisionTransformer>(&model)) {
    policy::RolloutOptions options;
    options.target_rtg = target_rtg;
    options.terminate_on_illegal = terminate_on_illegal;
    out.rewriter = std::make_unique<policy::DtRewriter>(*dt, options);
    out.block_size = dt->config().block_size;
  } else {
    const auto& cls = std::get<policy::ActionClassifier>(model);
    out.block_size = cls.config().block_size;
    out.rewriter = std::make_unique<policy::ClassifierRewriter>(cls, !classifier_once, out.block_size);
  }
  return out;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt::format("{:+.2f}%", 100.0 * *v) : std::string("n/a");
}

}  // namespace

void register_rewrite(CLI::App& app) {
  struct Options {
    DataOptions data;
    std::string ckpt;
    std::string claim;
    std::string claim_id;
    std::optional<double> target_rtg;
    bool classifier_once = false;
    bool terminate_on_illegal = false;
    bool json = false;
  };
  auto opts = std::make_shared<Options>();
  auto* sub = app.add_subcommand("rewrite", "Rewrite one claim with a trained policy");
  add_data_options(sub, opts->data, true);
  sub->add_option("--ckpt", opts->ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  sub->add_option("--claim", opts->claim, "Claim text (defaults to the stored text of --claim-id)");
  sub->add_option("--claim-id", opts->claim_id, "Claim whose judgments score the rewrite");
  sub->add_option("--target-rtg", opts->target_rtg, "Return-to-go prompt (decision transformer)");
  sub->add_flag("--once", opts->classifier_once, "Apply a classifier checkpoint a single time");
  sub->add_flag("--terminate-on-illegal", opts->terminate_on_illegal,
                "Stop a decision-transformer rollout when its top action is illegal");
  sub->add_flag("--json", opts->json, "Print JSON instead of a table");
  sub->callback([opts] {
    const auto data = load_data(opts->data);
    std::string claim_id = opts->claim_id;
    std::string text = opts->claim;
    for (const auto& c : data.data.claims) {
      if (claim_id.empty() && !text.empty() && c.claim == text) claim_id = c.claim_id;
      if (text.empty() && c.claim_id == claim_id) text = c.claim;
    }
    if (claim_id.empty()) {
      throw Error(ErrorCode::kUnknownClaim, "claim text not found in --claims; pass --claim-id");
    }
    if (text.empty()) throw Error(ErrorCode::kUnknownClaim, "unknown claim id '" + claim_id + "'");

    const auto model = policy::load_checkpoint(opts->ckpt);
    const auto choice = make_rewriter(model, opts->target_rtg, opts->classifier_once, opts->terminate_on_illegal);
    const searchenv::Scorer scorer(*data.index, data.data.corpus, data.spec);
    const auto claim = lexedit::tokenize(text, data.lexicon, claim_id);
    const auto rec = choice.rewriter->rewrite(claim, data.lexicon, scorer);

    if (opts->json) {
      nlohmann::ordered_json j;
      j["claim_id"] = rec.claim_id;
      j["policy"] = choice.rewriter->name();
      j["backend"] = std::string(searchenv::backend_name(data.index->backend()));
      j["metric"] = std::string(searchenv::metric_name(data.spec.metric));
      j["k"] = data.spec.k;
      j["original"] = {{"text", rec.original_text}, {"reward", rec.original_reward}};
      auto steps = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < rec.actions.size(); ++i) {
        const auto a = lexedit::unflatten_action(rec.actions[i]);
        nlohmann::ordered_json s{{"step", i + 1},
                                 {"action", {{"flat", rec.actions[i]},
                                             {"kind", std::string(lexedit::edit_kind_name(a.kind))},
                                             {"position", a.position}}},
                                 {"text", rec.texts[i]},
                                 {"reward", rec.rewards[i]}};
        if (i < rec.rtg_inputs.size()) s["rtg"] = rec.rtg_inputs[i];
        steps.push_back(std::move(s));
      }
      j["steps"] = std::move(steps);
      j["final"] = {{"text", rec.final_text()}, {"reward", rec.final_reward()}};
      std::cout << j.dump(2) << '\n';
      return;
    }
    std::cout << fmt::format("claim {} ({}, {}@{}, policy {})\n", rec.claim_id,
                             searchenv::backend_name(data.index->backend()),
                             searchenv::metric_name(data.spec.metric), data.spec.k,
                             choice.rewriter->name());
    std::cout << fmt::format("{:>4}  {:<12} {:>8}  {}\n", "step", "action", "reward", "query");
    std::cout << fmt::format("{:>4}  {:<12} {:>8.4f}  {}\n", 0, "-", rec.original_reward, rec.original_text);
    for (std::size_t i = 0; i < rec.actions.size(); ++i) {
      std::cout << fmt::format("{:>4}  {:<12} {:>8.4f}  {}\n", i + 1,
                               lexedit::to_string(lexedit::unflatten_action(rec.actions[i])),
                               rec.rewards[i], rec.texts[i]);
    }
    std::cout << fmt::format("final {:.4f} ({:+.4f})\n", rec.final_reward(),
                             rec.final_reward() - rec.original_reward);
  });
}

void register_eval(CLI::App& app) {
  struct Options {
    DataOptions data;
    std::string ckpt;
    std::string report;
    std::size_t dev = 0;
    std::uint64_t random_seed = 1;
    std::optional<double> target_rtg;
    bool classifier_once = false;
    bool terminate_on_illegal = false;
    double flat_epsilon = 0.01;
    std::string answer_key;
    unsigned threads = 1;
  };
  auto opts = std::make_shared<Options>();
  auto* sub = app.add_subcommand("eval", "Evaluate a policy against the claim and random baselines");
  add_data_options(sub, opts->data, true);
  sub->add_option("--ckpt", opts->ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  sub->add_option("--report", opts->report, "Report directory")->required();
  sub->add_option("--dev", opts->dev, "Evaluate only the last N claims (0 = all)");
  sub->add_option("--random-seed", opts->random_seed, "Random-edit baseline seed");
  sub->add_option("--target-rtg", opts->target_rtg, "Return-to-go prompt (decision transformer)");
  sub->add_flag("--once", opts->classifier_once, "Apply a classifier checkpoint a single time");
  sub->add_flag("--terminate-on-illegal", opts->terminate_on_illegal,
                "Stop a decision-transformer rollout when its top action is illegal");
  sub->add_option("--flat-epsilon", opts->flat_epsilon, "Tolerance for flat step curves");
  sub->add_option("--answer-key", opts->answer_key, "Answer key JSONL; reports headroom recovery")
      ->check(CLI::ExistingFile);
  sub->add_option("--threads", opts->threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->callback([opts] {
    const auto data = load_data(opts->data);
    const searchenv::Scorer scorer(*data.index, data.data.corpus, data.spec);
    auto claims = ingest::tokenize_claims(data.data.claims, data.lexicon);
    if (opts->dev > 0 && opts->dev < claims.size()) {
      claims.erase(claims.begin(), claims.end() - static_cast<std::ptrdiff_t>(opts->dev));
    }
    const auto model = policy::load_checkpoint(opts->ckpt);
    const auto choice = make_rewriter(model, opts->target_rtg, opts->classifier_once, opts->terminate_on_illegal);

    evalharness::ReportBundle bundle;
    bundle.flat_epsilon = opts->flat_epsilon;
    bundle.primary = evalharness::evaluate(*choice.rewriter, claims, data.lexicon, scorer, opts->threads);
    bundle.baselines.push_back(
        evalharness::evaluate(policy::IdentityRewriter{}, claims, data.lexicon, scorer, opts->threads));
    bundle.baselines.push_back(evalharness::evaluate(
        policy::RandomRewriter(choice.block_size, opts->random_seed), claims, data.lexicon, scorer,
        opts->threads));
    evalharness::write_report_dir(opts->report, bundle);

    std::cout << fmt::format("{} claims, {} {}@{}\n", claims.size(),
                             searchenv::backend_name(data.index->backend()),
                             searchenv::metric_name(data.spec.metric), data.spec.k);
    std::cout << fmt::format("{:<22} {:>10} {:>10}\n", "system", "mean", "vs claim");
    for (const auto* r : {&bundle.baselines[0], &bundle.baselines[1], &bundle.primary}) {
      std::cout << fmt::format("{:<22} {:>10.4f} {:>10}\n", r->system, r->rewritten_mean,
                               fmt_opt(r->relative_improvement));
    }
    if (!opts->answer_key.empty()) {
      const auto key = ingest::load_answer_key(opts->answer_key);
      std::cout << fmt::format("headroom recovered {:.2f}%\n",
                               100.0 * evalharness::headroom_recovery(bundle.primary, key));
    }
    std::cout << "wrote report to " << opts->report << '\n';
  });
}

void register_ablate(CLI::App& app) {
  struct Options {
    std::string corpus;
    std::string claims;
    std::string lexicon;
    evalharness::PipelineConfig pipeline;
    std::vector<std::string> backends{"bm25", "knn"};
    std::vector<std::string> metrics{"ap", "recall", "rr"};
    std::string out;
  };
  auto opts = std::make_shared<Options>();
  auto& p = opts->pipeline;
  auto* sub = app.add_subcommand("ablate", "Retriever x metric x negative-examples ablation");
  sub->add_option("--corpus", opts->corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  sub->add_option("--claims", opts->claims, "Claims JSONL")->required()->check(CLI::ExistingFile);
  sub->add_option("--lexicon", opts->lexicon, "Lexicon directory")->check(CLI::ExistingDirectory);
  sub->add_option("--backends", opts->backends, "Retrievers")->check(CLI::IsMember({"bm25", "knn"}));
  sub->add_option("--metrics", opts->metrics, "Rewards")->check(CLI::IsMember({"ap", "recall", "rr"}));
  sub->add_option("--k", p.spec.k, "Metric cutoff");
  sub->add_option("--dev", p.dev_claims, "Dev claims taken from the end of the file");
  sub->add_option("--depth", p.gen.max_depth, "Search depth");
  sub->add_option("--top-n", p.gen.top_n_sequences, "Sequences kept per claim");
  sub->add_option("--gen-seed", p.gen.seed, "Pruning seed");
  sub->add_option("--layers", p.policy.n_layers, "Transformer blocks");
  sub->add_option("--heads", p.policy.n_heads, "Attention heads");
  sub->add_option("--dim", p.policy.embed_dim, "Embedding width");
  sub->add_option("--epochs", p.policy.epochs, "Training epochs");
  sub->add_option("--seed", p.policy.seed, "Training seed");
  sub->add_option("--threads", p.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", opts->out, "Output directory")->required();
  sub->callback([opts] {
    auto data = ingest::load_dataset(opts->claims, opts->corpus);
    const auto lexicon = load_lexicon(opts->lexicon, opts->corpus);
    evalharness::AblationGrid grid;
    grid.backends.clear();
    for (const auto& b : opts->backends) grid.backends.push_back(backend_or_throw(b));
    grid.metrics.clear();
    for (const auto& m : opts->metrics) grid.metrics.push_back(metric_or_throw(m));
    const auto matrix = evalharness::run_ablation(data, lexicon, grid, opts->pipeline);

    fs::create_directories(opts->out);
    std::ofstream csv(fs::path(opts->out) / "ablation.csv");
    evalharness::write_ablation_csv(csv, matrix.cells);
    const auto table = evalharness::render_ablation_table(matrix);
    std::ofstream(fs::path(opts->out) / "ablation.txt") << table;
    std::cout << table;
  });
}

}  // namespace claimforge::cli
