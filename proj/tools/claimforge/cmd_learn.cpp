#include <array>
#include <iostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "claimforge/error.h"
#include "claimforge/policy/checkpoint.h"
#include "claimforge/policy/trainer.h"
#include "claimforge/trajgen/generator.h"
#include "claimforge/trajgen/stats.h"
#include "commands.h"
#include "common.h"

namespace claimforge::cli {

void register_gen(CLI::App& app) {
  struct Options {
    DataOptions data;
    trajgen::GenConfig gen;
    std::string rtg = "both";
    unsigned threads = 1;
    std::string out;
  };
  auto opts = std::make_shared<Options>();
  auto* sub = app.add_subcommand("gen", "Generate edit trajectories by breadth-first search");
  add_data_options(sub, opts->data, true);
  sub->add_option("--depth", opts->gen.max_depth, "Maximum edits per trajectory");
  sub->add_option("--top-n", opts->gen.top_n_sequences, "Sequences kept per claim");
  sub->add_flag("--include-negative", opts->gen.include_negative, "Also keep reward-decreasing paths");
  sub->add_option("--seed", opts->gen.seed, "Pruning seed");
  sub->add_option("--min-improvement", opts->gen.min_improvement, "Relative improvement threshold");
  sub->add_option("--prune", opts->gen.random_prune_prob, "Random pruning probability");
  sub->add_option("--max-frontier", opts->gen.max_frontier, "Per-level frontier cap (0 = none)");
  sub->add_option("--rtg", opts->rtg, "dense | sparse | both")
      ->check(CLI::IsMember({"dense", "sparse", "both"}));
  sub->add_option("--threads", opts->threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", opts->out, "Trajectory JSONL")->required();
  sub->callback([opts] {
    opts->gen.validate();
    const auto data = load_data(opts->data);
    const searchenv::Scorer scorer(*data.index, data.data.corpus, data.spec);
    const auto claims = ingest::tokenize_claims(data.data.claims, data.lexicon);
    const auto results = trajgen::generate_dataset(claims, data.lexicon, scorer, opts->gen, opts->threads);

    std::vector<trajgen::RewardMode> modes;
    if (opts->rtg != "sparse") modes.push_back(trajgen::RewardMode::kDense);
    if (opts->rtg != "dense") modes.push_back(trajgen::RewardMode::kSparse);
    std::vector<trajgen::Trajectory> all;
    std::array<std::size_t, 3> outcomes{};
    for (const auto& r : results) {
      ++outcomes[static_cast<std::size_t>(r.outcome)];
      auto t = trajgen::to_trajectories(r, modes);
      all.insert(all.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
    }
    trajgen::save_trajectories(opts->out, all);
    std::cout << fmt::format("claims {}: generated {}, already perfect {}, no improvement {}\n",
                             results.size(), outcomes[0], outcomes[1], outcomes[2]);
    std::cout << fmt::format("wrote {} trajectories to {}\n", all.size(), opts->out);
    if (all.empty()) return;
    const auto stats = trajgen::dataset_stats(all);
    std::cout << fmt::format("{} mode: {} steps, mean length {:.3f}, mean best gain {:.4f}\n",
                             trajgen::reward_mode_name(stats.mode), stats.steps, stats.mean_length,
                             stats.mean_best_gain);
    for (int k = 0; k < lexedit::kEditKinds; ++k) {
      const auto& s = stats.per_kind[k];
      std::cout << fmt::format("  {:<8} {:>7} steps {:>6.2f}%  mean delta {:+.4f}\n",
                               lexedit::edit_kind_name(static_cast<lexedit::EditKind>(k)), s.count,
                               100.0 * s.fraction, s.mean_delta);
    }
  });
}

void register_train(CLI::App& app) {
  struct Options {
    std::string trajectories;
    std::string mode = "dt";
    std::string rtg = "dense";
    std::string encoder = "trainable";
    policy::PolicyConfig policy;
    std::string out;
  };
  auto opts = std::make_shared<Options>();
  auto* sub = app.add_subcommand("train", "Train a decision transformer or one-action classifier");
  sub->add_option("--trajectories", opts->trajectories, "Trajectory JSONL")->required()->check(CLI::ExistingFile);
  sub->add_option("--mode", opts->mode, "dt | classifier")->check(CLI::IsMember({"dt", "classifier"}));
  sub->add_option("--rtg", opts->rtg, "dense | sparse")->check(CLI::IsMember({"dense", "sparse"}));
  sub->add_option("--layers", opts->policy.n_layers, "Transformer blocks");
  sub->add_option("--heads", opts->policy.n_heads, "Attention heads");
  sub->add_option("--dim", opts->policy.embed_dim, "Embedding width");
  sub->add_option("--block-size", opts->policy.block_size, "Max edits per episode (K)");
  sub->add_option("--epochs", opts->policy.epochs, "Training epochs");
  sub->add_option("--batch-size", opts->policy.batch_size, "Minibatch size");
  sub->add_option("--lr", opts->policy.learning_rate, "Adam learning rate");
  sub->add_option("--encoder", opts->encoder, "trainable | frozen")
      ->check(CLI::IsMember({"trainable", "frozen"}));
  sub->add_option("--buckets", opts->policy.encoder_buckets, "Trainable encoder hash buckets");
  sub->add_option("--seed", opts->policy.seed, "Initialization and shuffling seed");
  sub->add_option("--out", opts->out, "Checkpoint path")->required();
  sub->callback([opts] {
    opts->policy.state_encoder = *policy::parse_encoder_kind(opts->encoder);
    opts->policy.validate();
    const auto mode = *trajgen::parse_reward_mode(opts->rtg);
    std::vector<trajgen::Trajectory> selected;
    for (auto& t : trajgen::load_trajectories(opts->trajectories)) {
      if (t.mode == mode) selected.push_back(std::move(t));
    }
    if (selected.empty()) {
      throw Error(ErrorCode::kEmptyDataset, "no " + opts->rtg + " trajectories in " + opts->trajectories);
    }
    policy::TrainReport report;
    if (opts->mode == "dt") {
      auto trained = policy::train_decision_transformer(selected, opts->policy);
      policy::save_checkpoint(opts->out, trained.model);
      report = trained.report;
      std::cout << fmt::format("target rtg {:.4f}\n", trained.model.target_rtg);
    } else {
      auto trained = policy::train_classifier(selected, opts->policy);
      policy::save_checkpoint(opts->out, trained.model);
      report = trained.report;
    }
    std::cout << fmt::format("trained {} on {} examples: loss {:.4f} -> {:.4f}\n", opts->mode,
                             report.examples, report.initial_loss,
                             report.epoch_losses.empty() ? report.initial_loss : report.epoch_losses.back());
    std::cout << "wrote " << opts->out << '\n';
  });
}

}  // namespace claimforge::cli
