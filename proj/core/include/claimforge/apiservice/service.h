#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "claimforge/lexedit/lexicon.h"
#include "claimforge/policy/checkpoint.h"
#include "claimforge/searchenv/corpus.h"
#include "claimforge/searchenv/endpoint.h"
#include "claimforge/searchenv/reward.h"

namespace claimforge::apiservice {

inline constexpr std::size_t kSnippetChars = 200;

struct ServiceArtifacts {
  searchenv::Corpus corpus;
  lexedit::Lexicon lexicon;
  std::map<searchenv::BackendKind, std::shared_ptr<const searchenv::SearchEndpoint>> endpoints;
  std::shared_ptr<const policy::LoadedModel> model;  // may be null
  searchenv::RewardSpec default_spec;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

// Routes live under /v1/ and, as aliases, at the root:
//   POST tokenize, apply, score, suggest; GET health, corpus/stats.
// Errors are {"error":{"code":..., "message":...}} with the ErrorCode name
// as the code. Handlers read only the artifacts and the request body.
class ApiService {
 public:
  explicit ApiService(ServiceArtifacts artifacts);

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

  const ServiceArtifacts& artifacts() const noexcept { return artifacts_; }

 private:
  ServiceArtifacts artifacts_;
};

// Cuts at the last space before `limit` characters (or at `limit` when the
// first word is longer) and appends "..." when anything was dropped.
std::string snippet(std::string_view text, std::size_t limit = kSnippetChars);

// Blocking HTTP front end over an ApiService.
class HttpServer {
 public:
  explicit HttpServer(const ApiService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws Error(kIoError).
  int bind(const std::string& host, int port);
  void listen();  // until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace claimforge::apiservice
