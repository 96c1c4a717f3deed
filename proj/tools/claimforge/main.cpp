#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "claimforge/error.h"
#include "commands.h"

int main(int argc, char** argv) {
  CLI::App app{"claimforge: learned claim rewriting for retrieval"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Warnings and errors only");
  app.parse_complete_callback([&] {
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);
  });

  using namespace claimforge::cli;
  register_fixtures(app);
  register_index(app);
  register_gen(app);
  register_train(app);
  register_rewrite(app);
  register_eval(app);
  register_ablate(app);
  register_serve(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
