#pragma once

#include <CLI11.hpp>

namespace claimforge::cli {

// Each registers a subcommand whose callback does the work.
void register_fixtures(CLI::App& app);
void register_index(CLI::App& app);
void register_gen(CLI::App& app);
void register_train(CLI::App& app);
void register_rewrite(CLI::App& app);
void register_eval(CLI::App& app);
void register_ablate(CLI::App& app);
void register_serve(CLI::App& app);

}  // namespace claimforge::cli
