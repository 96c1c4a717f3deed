#include "claimforge/policy/checkpoint.h"

#include <fstream>
#include <json.hpp>

#include "../common/binary_io.h"
#include "claimforge/error.h"

namespace claimforge::policy {

using nlohmann::json;

namespace {

enum class ModelKind : std::uint32_t { kDecisionTransformer = 0, kClassifier = 1 };

json config_json(const PolicyConfig& c) {
  return {{"n_layers", c.n_layers},
          {"n_heads", c.n_heads},
          {"embed_dim", c.embed_dim},
          {"block_size", c.block_size},
          {"state_encoder", encoder_kind_name(c.state_encoder)},
          {"encoder_buckets", c.encoder_buckets},
          {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"grad_clip", c.grad_clip},
          {"seed", c.seed}};
}

PolicyConfig config_from_json(const json& j) {
  PolicyConfig c;
  c.n_layers = j.at("n_layers").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.block_size = j.at("block_size").get<int>();
  const auto enc = parse_encoder_kind(j.at("state_encoder").get<std::string>());
  if (!enc) throw Error(ErrorCode::kFormatError, "unknown state encoder in checkpoint");
  c.state_encoder = *enc;
  c.encoder_buckets = j.at("encoder_buckets").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.grad_clip = j.at("grad_clip").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

void write_file(const std::filesystem::path& path, ModelKind kind, const json& header,
                const ParamSet& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  detail::write_magic(out, "CFCK");
  detail::write_pod<std::uint32_t>(out, kCheckpointVersion);
  detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(kind));
  detail::write_string(out, header.dump());
  detail::write_pod<std::uint64_t>(out, params.all().size());
  for (const auto& p : params.all()) {
    detail::write_string(out, p->name);
    detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(p->value.rows()));
    detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(p->value.cols()));
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void read_tensors(std::istream& in, ParamSet& params) {
  const auto n = detail::read_pod<std::uint64_t>(in);
  if (n != params.all().size()) {
    throw Error(ErrorCode::kFormatError, "checkpoint has " + std::to_string(n) +
                                             " tensors; model expects " +
                                             std::to_string(params.all().size()));
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto name = detail::read_string(in);
    const auto rows = detail::read_pod<std::uint64_t>(in);
    const auto cols = detail::read_pod<std::uint64_t>(in);
    Param* p = params.find(name);
    if (!p) throw Error(ErrorCode::kFormatError, "unknown tensor " + name);
    if (rows != static_cast<std::uint64_t>(p->value.rows()) ||
        cols != static_cast<std::uint64_t>(p->value.cols())) {
      throw Error(ErrorCode::kFormatError, "shape mismatch for tensor " + name);
    }
    if (!in.read(reinterpret_cast<char*>(p->value.data()),
                 static_cast<std::streamsize>(p->value.size() * sizeof(double)))) {
      throw Error(ErrorCode::kFormatError, "truncated tensor " + name);
    }
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const DecisionTransformer& model) {
  json header = {{"model", "decision_transformer"},
                 {"config", config_json(model.config())},
                 {"target_rtg", model.target_rtg}};
  write_file(path, ModelKind::kDecisionTransformer, header, model.params());
}

void save_checkpoint(const std::filesystem::path& path, const ActionClassifier& model) {
  json header = {{"model", "classifier"}, {"config", config_json(model.config())}};
  write_file(path, ModelKind::kClassifier, header, model.params());
}

LoadedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  detail::expect_magic(in, "CFCK");
  const auto version = detail::read_pod<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto kind = detail::read_pod<std::uint32_t>(in);
  json header;
  try {
    header = json::parse(detail::read_string(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad checkpoint header: ") + e.what());
  }
  PolicyConfig config;
  try {
    config = config_from_json(header.at("config"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad checkpoint config: ") + e.what());
  }
  if (kind == static_cast<std::uint32_t>(ModelKind::kDecisionTransformer)) {
    DecisionTransformer model(config);
    model.target_rtg = header.value("target_rtg", 1.0);
    read_tensors(in, model.params());
    return LoadedModel(std::in_place_type<DecisionTransformer>, std::move(model));
  }
  if (kind == static_cast<std::uint32_t>(ModelKind::kClassifier)) {
    ActionClassifier model(config);
    read_tensors(in, model.params());
    return LoadedModel(std::in_place_type<ActionClassifier>, std::move(model));
  }
  throw Error(ErrorCode::kFormatError, "unknown model kind " + std::to_string(kind));
}

}  // namespace claimforge::policy
