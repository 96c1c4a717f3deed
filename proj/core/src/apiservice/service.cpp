#include "claimforge/apiservice/service.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <httplib.h>
#include <json.hpp>

#include "claimforge/error.h"
#include "claimforge/lexedit/editor.h"
#include "claimforge/lexedit/tokenizer.h"
#include "claimforge/policy/rollout.h"
#include "claimforge/searchenv/analyzer.h"

namespace claimforge::apiservice {

namespace {

using Json = nlohmann::ordered_json;

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

ApiResponse json_response(int status, const Json& body) { return {status, body.dump()}; }

ApiResponse error_response(int status, std::string_view code, std::string_view message) {
  return json_response(status, Json{{"error", Json{{"code", code}, {"message", message}}}});
}

Json parse_body(std::string_view body) {
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParseError, "request body is not valid JSON");
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "request body must be a JSON object");
  return j;
}

template <typename T>
std::optional<T> field(const Json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + name + "' has the wrong type");
  }
}

template <typename T>
T required(const Json& j, const char* name) {
  auto v = field<T>(j, name);
  if (!v) throw Error(ErrorCode::kInvalidArgument, std::string("missing field '") + name + "'");
  return *std::move(v);
}

Json action_json(lexedit::EditAction a) {
  return Json{{"kind", std::string(lexedit::edit_kind_name(a.kind))},
              {"position", a.position},
              {"flat", lexedit::flatten_action(a)}};
}

Json state_json(const lexedit::TokenizedClaim& claim, const lexedit::Lexicon& lexicon) {
  Json pos = Json::array();
  for (const auto p : claim.pos()) pos.push_back(std::string(lexedit::pos_tag(p)));
  Json legal = Json::array();
  for (const auto a : lexedit::legal_actions(claim, lexicon)) legal.push_back(action_json(a));
  return Json{{"text", claim.text()}, {"tokens", claim.tokens()}, {"pos", std::move(pos)},
              {"legal_actions", std::move(legal)}};
}

// A state arrives either as a token list or as raw text.
lexedit::TokenizedClaim read_state(const Json& j, const lexedit::Lexicon& lexicon) {
  auto claim_id = field<std::string>(j, "claim_id").value_or("");
  if (auto tokens = field<std::vector<std::string>>(j, "tokens")) {
    return lexedit::from_tokens(std::move(*tokens), lexicon, std::move(claim_id));
  }
  return lexedit::tokenize(required<std::string>(j, "text"), lexicon, std::move(claim_id));
}

struct Scoring {
  const searchenv::SearchEndpoint* endpoint;
  searchenv::RewardSpec spec;
};

Scoring read_scoring(const Json& j, const ServiceArtifacts& a) {
  Scoring s{nullptr, a.default_spec};
  if (auto name = field<std::string>(j, "backend")) {
    const auto kind = searchenv::parse_backend(*name);
    if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown backend '" + *name + "'");
    const auto it = a.endpoints.find(*kind);
    if (it == a.endpoints.end()) {
      throw Error(ErrorCode::kInvalidArgument, "backend '" + *name + "' is not loaded");
    }
    s.endpoint = it->second.get();
  } else {
    if (a.endpoints.empty()) throw Error(ErrorCode::kInvalidArgument, "no search backend loaded");
    s.endpoint = a.endpoints.begin()->second.get();
  }
  if (auto name = field<std::string>(j, "metric")) {
    const auto m = searchenv::parse_metric(*name);
    if (!m) throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + *name + "'");
    s.spec.metric = *m;
  }
  if (auto k = field<int>(j, "k")) {
    if (*k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
    s.spec.k = *k;
  }
  return s;
}

ApiResponse handle_tokenize(const ServiceArtifacts& a, const Json& req) {
  const auto claim = lexedit::tokenize(required<std::string>(req, "text"), a.lexicon);
  return json_response(200, state_json(claim, a.lexicon));
}

ApiResponse handle_apply(const ServiceArtifacts& a, const Json& req) {
  const auto claim = read_state(req, a.lexicon);
  const int flat = required<int>(req, "action_flat");
  if (flat < 0 || flat >= lexedit::kActionSpaceSize) {
    throw Error(ErrorCode::kIllegalAction, "action " + std::to_string(flat) + " is outside [0, 128)");
  }
  const auto action = lexedit::unflatten_action(flat);
  const auto next = lexedit::apply_action(claim, action, a.lexicon);
  Json out = state_json(next, a.lexicon);
  Json body{{"new_text", next.text()}, {"action", action_json(action)}};
  for (auto& [key, value] : out.items()) {
    if (key != "text") body[key] = std::move(value);
  }
  return json_response(200, body);
}

ApiResponse handle_score(const ServiceArtifacts& a, const Json& req) {
  const auto text = required<std::string>(req, "text");
  const auto scoring = read_scoring(req, a);
  const auto claim_id = field<std::string>(req, "claim_id");
  const std::set<std::string>* relevant = nullptr;
  if (claim_id) {
    relevant = a.corpus.relevant(*claim_id);
    if (!relevant) throw Error(ErrorCode::kUnknownClaim, "no judgments for claim '" + *claim_id + "'");
  }
  const auto hits = scoring.endpoint->query(text, static_cast<std::size_t>(scoring.spec.k));
  Json ranking = Json::array();
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const auto* doc = a.corpus.find(hits[i].doc_id);
    Json row{{"rank", i + 1}, {"doc_id", hits[i].doc_id}, {"score", hits[i].score},
             {"snippet", doc ? snippet(doc->text) : std::string()}};
    if (relevant) row["relevant"] = relevant->contains(hits[i].doc_id);
    ranking.push_back(std::move(row));
    ids.push_back(hits[i].doc_id);
  }
  Json body{{"backend", std::string(searchenv::backend_name(scoring.endpoint->backend()))},
            {"metric", std::string(searchenv::metric_name(scoring.spec.metric))},
            {"k", scoring.spec.k}};
  body["reward"] = relevant ? Json(searchenv::score_ranking(ids, *relevant, scoring.spec)) : Json(nullptr);
  body["ranking"] = std::move(ranking);
  return json_response(200, body);
}

policy::RowVector first_step_logits(const policy::LoadedModel& model,
                                    const lexedit::TokenizedClaim& claim, double rtg) {
  if (const auto* dt = std::get_if<policy::DecisionTransformer>(&model)) {
    const std::vector<policy::EncodedState> states{dt->encoder().prepare(claim.text())};
    policy::DtSequence seq;
    seq.steps.push_back(policy::DtStep{rtg, 0, 0});
    return dt->forward(std::span<const policy::DtSequence>(&seq, 1), states)
        .front()
        .row(dt->config().block_size - 1);
  }
  return std::get<policy::ActionClassifier>(model).logits(claim.text());
}

ApiResponse handle_suggest(const ServiceArtifacts& a, const Json& req) {
  if (!a.model) return error_response(503, "NoPolicy", "no policy checkpoint is loaded");
  const auto claim = read_state(req, a.lexicon);
  const auto claim_id = required<std::string>(req, "claim_id");
  if (!a.corpus.relevant(claim_id)) {
    throw Error(ErrorCode::kUnknownClaim, "no judgments for claim '" + claim_id + "'");
  }
  const lexedit::TokenizedClaim scored(claim.tokens(), claim.pos(), claim_id);
  const auto scoring = read_scoring(req, a);
  const searchenv::Scorer scorer(*scoring.endpoint, a.corpus, scoring.spec);
  const auto target = field<double>(req, "target_rtg");

  const auto* dt = std::get_if<policy::DecisionTransformer>(a.model.get());
  const double rtg = target.value_or(dt ? dt->target_rtg : 0.0);
  const auto logits = first_step_logits(*a.model, scored, rtg);

  auto legal = lexedit::legal_actions(scored, a.lexicon);
  std::stable_sort(legal.begin(), legal.end(), [&](auto x, auto y) {
    return logits(lexedit::flatten_action(x)) > logits(lexedit::flatten_action(y));
  });
  double max_logit = -INFINITY;
  for (const auto act : legal) max_logit = std::max(max_logit, logits(lexedit::flatten_action(act)));
  double z = 0.0;
  for (const auto act : legal) z += std::exp(logits(lexedit::flatten_action(act)) - max_logit);
  Json actions = Json::array();
  for (const auto act : legal) {
    Json row = action_json(act);
    row["predicted"] = std::exp(logits(lexedit::flatten_action(act)) - max_logit) / z;
    row["logit"] = logits(lexedit::flatten_action(act));
    actions.push_back(std::move(row));
  }

  policy::RolloutRecord rec;
  std::string policy_name;
  if (dt) {
    policy::RolloutOptions options;
    options.target_rtg = rtg;
    rec = policy::rollout(*dt, scored, a.lexicon, scorer, options);
    policy_name = "dt";
  } else {
    const auto& cls = std::get<policy::ActionClassifier>(*a.model);
    rec = policy::ClassifierRewriter(cls, true, cls.config().block_size).rewrite(scored, a.lexicon, scorer);
    policy_name = "classifier";
  }
  Json steps = Json::array();
  for (std::size_t i = 0; i < rec.actions.size(); ++i) {
    Json step = action_json(lexedit::unflatten_action(rec.actions[i]));
    step["step"] = i + 1;
    step["text"] = rec.texts[i];
    step["reward"] = rec.rewards[i];
    if (i < rec.rtg_inputs.size()) step["rtg"] = rec.rtg_inputs[i];
    steps.push_back(std::move(step));
  }
  Json body{{"policy", policy_name}, {"text", scored.text()}, {"claim_id", claim_id}};
  if (dt) body["target_rtg"] = rtg;
  body["actions"] = std::move(actions);
  body["rollout_preview"] = Json{{"original_reward", rec.original_reward},
                                 {"final_reward", rec.final_reward()},
                                 {"steps", std::move(steps)}};
  return json_response(200, body);
}

ApiResponse handle_health(const ServiceArtifacts& a) {
  Json backends = Json::array();
  for (const auto& [kind, _] : a.endpoints) backends.push_back(std::string(searchenv::backend_name(kind)));
  Json policy_name = nullptr;
  if (a.model) {
    policy_name = std::holds_alternative<policy::DecisionTransformer>(*a.model) ? "dt" : "classifier";
  }
  return json_response(200, Json{{"status", "ok"}, {"api", "v1"}, {"documents", a.corpus.size()},
                                 {"backends", std::move(backends)}, {"policy", policy_name}});
}

ApiResponse handle_stats(const ServiceArtifacts& a) {
  std::size_t terms = 0;
  for (const auto& d : a.corpus.documents()) terms += searchenv::analyze(d.text).size();
  std::size_t pairs = 0;
  for (const auto& [_, docs] : a.corpus.relevance()) pairs += docs.size();
  const double mean = a.corpus.empty() ? 0.0 : static_cast<double>(terms) / static_cast<double>(a.corpus.size());
  return json_response(
      200, Json{{"documents", a.corpus.size()},
                {"judged_claims", a.corpus.relevance().size()},
                {"relevant_pairs", pairs},
                {"mean_doc_terms", mean},
                {"lexicon", Json{{"synonym_entries", a.lexicon.synonym_entries()},
                                 {"pos_entries", a.lexicon.pos_entries()},
                                 {"verb_entries", a.lexicon.verb_entries()}}}});
}

}  // namespace

std::string snippet(std::string_view text, std::size_t limit) {
  if (text.size() <= limit) return std::string(text);
  std::size_t cut = text.rfind(' ', limit);
  if (cut == std::string_view::npos || cut == 0) cut = limit;
  std::string out(text.substr(0, cut));
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out + "...";
}

ApiService::ApiService(ServiceArtifacts artifacts) : artifacts_(std::move(artifacts)) {}

ApiResponse ApiService::handle(std::string_view method, std::string_view path,
                               std::string_view body) const {
  if (path.starts_with("/v1/")) path.remove_prefix(3);
  const bool post = method == "POST";
  const bool get = method == "GET";
  try {
    if (path == "/tokenize" || path == "/apply" || path == "/score" || path == "/suggest") {
      if (!post) return error_response(405, "MethodNotAllowed", "use POST");
      const Json req = parse_body(body);
      if (path == "/tokenize") return handle_tokenize(artifacts_, req);
      if (path == "/apply") return handle_apply(artifacts_, req);
      if (path == "/score") return handle_score(artifacts_, req);
      return handle_suggest(artifacts_, req);
    }
    if (path == "/health" || path == "/corpus/stats") {
      if (!get) return error_response(405, "MethodNotAllowed", "use GET");
      return path == "/health" ? handle_health(artifacts_) : handle_stats(artifacts_);
    }
    return error_response(404, "NotFound", "no route " + std::string(path));
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::kEmbeddingServiceUnavailable ? 502 : 400;
    return error_response(status, error_code_name(e.code()), e.what());
  }
}

struct HttpServer::Impl {
  const ApiService* service;
  httplib::Server server;
};

HttpServer::HttpServer(const ApiService& service) : impl_(std::make_unique<Impl>()) {
  impl_->service = &service;
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = impl_->service->handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  impl_->server.Get(".*", route);
  impl_->server.Post(".*", route);
  impl_->server.Put(".*", route);
  impl_->server.Delete(".*", route);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace claimforge::apiservice
