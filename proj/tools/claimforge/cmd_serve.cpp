#include <csignal>
#include <iostream>

#include <spdlog/spdlog.h>

#include "claimforge/apiservice/service.h"
#include "claimforge/error.h"
#include "commands.h"
#include "common.h"

namespace claimforge::cli {

namespace {

apiservice::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

void register_serve(CLI::App& app) {
  struct Options {
    std::string corpus;
    std::string claims;
    std::string lexicon;
    std::vector<std::string> indexes;
    std::string ckpt;
    std::string addr = "127.0.0.1:8080";
    std::string embed_url;
    std::size_t embed_dim = 256;
  };
  auto opts = std::make_shared<Options>();
  auto* sub = app.add_subcommand("serve", "Serve the HTTP API");
  sub->add_option("--corpus", opts->corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  sub->add_option("--claims", opts->claims, "Claims JSONL with judgments")->check(CLI::ExistingFile);
  sub->add_option("--lexicon", opts->lexicon, "Lexicon directory")->check(CLI::ExistingDirectory);
  sub->add_option("--index", opts->indexes, "Index snapshot(s); a BM25 index is built when none")
      ->check(CLI::ExistingFile);
  sub->add_option("--ckpt", opts->ckpt, "Policy checkpoint for /suggest")->check(CLI::ExistingFile);
  sub->add_option("--addr", opts->addr, "host:port");
  sub->add_option("--embed-url", opts->embed_url, "External embedding service base URL (knn)");
  sub->add_option("--embed-dim", opts->embed_dim, "Embedding dimension");
  sub->callback([opts] {
    apiservice::ServiceArtifacts artifacts;
    if (opts->claims.empty()) {
      artifacts.corpus = ingest::load_corpus(opts->corpus);
    } else {
      artifacts.corpus = ingest::load_dataset(opts->claims, opts->corpus).corpus;
    }
    artifacts.lexicon = load_lexicon(opts->lexicon, opts->corpus);
    const auto embedder = opts->embed_url.empty() ? nullptr : make_embedder(opts->embed_url, opts->embed_dim);
    for (const auto& path : opts->indexes) {
      std::shared_ptr<const searchenv::SearchEndpoint> index = searchenv::load_index(path, embedder);
      artifacts.endpoints[index->backend()] = std::move(index);
    }
    if (artifacts.endpoints.empty()) {
      artifacts.endpoints[searchenv::BackendKind::kBm25] =
          searchenv::build_index(artifacts.corpus, searchenv::BackendKind::kBm25);
    }
    if (!opts->ckpt.empty()) {
      artifacts.model = std::make_shared<const policy::LoadedModel>(policy::load_checkpoint(opts->ckpt));
    }

    const auto colon = opts->addr.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--addr must be host:port");
    const std::string host = opts->addr.substr(0, colon);
    const int port = std::stoi(opts->addr.substr(colon + 1));

    const apiservice::ApiService service(std::move(artifacts));
    apiservice::HttpServer server(service);
    const int bound = server.bind(host, port);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on http://" << host << ':' << bound << "/v1/" << std::endl;
    server.listen();
    g_server = nullptr;
  });
}

}  // namespace claimforge::cli
