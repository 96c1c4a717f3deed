#include "claimforge/searchenv/hnsw_index.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>

#include "../common/binary_io.h"
#include "claimforge/error.h"
#include "claimforge/searchenv/analyzer.h"

namespace claimforge::searchenv {

namespace {

// Strict weak order: more similar first, then lower id.
struct Closer {
  template <typename C>
  bool operator()(const C& a, const C& b) const {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.id < b.id;
  }
};

// Heap orders. `FurtherOnTop` keeps the worst result at the top.
struct FurtherOnTop {
  template <typename C>
  bool operator()(const C& a, const C& b) const { return Closer{}(a, b); }
};
struct CloserOnTop {
  template <typename C>
  bool operator()(const C& a, const C& b) const { return Closer{}(b, a); }
};

}  // namespace

HnswGraph::HnswGraph(std::size_t dim, HnswParams params)
    : dim_(dim),
      params_(params),
      level_mult_(1.0 / std::log(static_cast<double>(std::max<std::size_t>(params.m, 2)))),
      rng_(params.seed) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "HNSW dim must be positive");
  if (params_.m < 2) throw Error(ErrorCode::kInvalidArgument, "HNSW M must be >= 2");
}

int HnswGraph::draw_level() {
  // 53-bit uniform in (0, 1].
  const double u = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  return static_cast<int>(std::floor(-std::log(u) * level_mult_));
}

float HnswGraph::similarity(std::span<const float> q, std::uint32_t id) const {
  const float* v = vectors_.data() + static_cast<std::size_t>(id) * dim_;
  float dot = 0.0f;
  for (std::size_t i = 0; i < dim_; ++i) dot += q[i] * v[i];
  return dot;
}

std::vector<HnswGraph::Candidate> HnswGraph::search_layer(
    std::span<const float> q, std::uint32_t entry, std::size_t ef, int level,
    std::vector<std::uint32_t>& visited_mark, std::uint32_t& visit_epoch) const {
  ++visit_epoch;
  if (visit_epoch == 0) {
    std::fill(visited_mark.begin(), visited_mark.end(), 0u);
    visit_epoch = 1;
  }
  std::priority_queue<Candidate, std::vector<Candidate>, CloserOnTop> frontier;
  std::priority_queue<Candidate, std::vector<Candidate>, FurtherOnTop> results;
  const Candidate start{similarity(q, entry), entry};
  frontier.push(start);
  results.push(start);
  visited_mark[entry] = visit_epoch;

  while (!frontier.empty()) {
    const auto current = frontier.top();
    if (results.size() >= ef && Closer{}(results.top(), current)) break;
    frontier.pop();
    for (const auto nb : links_[current.id][level]) {
      if (visited_mark[nb] == visit_epoch) continue;
      visited_mark[nb] = visit_epoch;
      const Candidate c{similarity(q, nb), nb};
      if (results.size() < ef || Closer{}(c, results.top())) {
        frontier.push(c);
        results.push(c);
        if (results.size() > ef) results.pop();
      }
    }
  }
  std::vector<Candidate> out;
  out.reserve(results.size());
  while (!results.empty()) {
    out.push_back(results.top());
    results.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Diversity heuristic: keep a candidate only if it is closer to the base
// than to every neighbor already kept.
std::vector<std::uint32_t> HnswGraph::select_neighbors(std::vector<Candidate> candidates,
                                                       std::size_t m) const {
  std::sort(candidates.begin(), candidates.end(), Closer{});
  std::vector<std::uint32_t> kept;
  kept.reserve(m);
  for (const auto& c : candidates) {
    if (kept.size() >= m) break;
    bool good = true;
    for (const auto k : kept) {
      if (similarity(vector(c.id), k) > c.sim) {
        good = false;
        break;
      }
    }
    if (good) kept.push_back(c.id);
  }
  return kept;
}

std::uint32_t HnswGraph::add(std::span<const float> vec) {
  if (vec.size() != dim_) throw Error(ErrorCode::kShapeMismatch, "HNSW vector dim mismatch");
  const auto id = static_cast<std::uint32_t>(levels_.size());
  const int level = draw_level();
  vectors_.insert(vectors_.end(), vec.begin(), vec.end());
  levels_.push_back(level);
  links_.emplace_back(static_cast<std::size_t>(level) + 1);
  scratch_mark_.push_back(0);

  if (id == 0) {
    entry_point_ = 0;
    max_level_ = level;
    return id;
  }

  std::uint32_t entry = entry_point_;
  for (int l = max_level_; l > level; --l) {
    entry = search_layer(vec, entry, 1, l, scratch_mark_, scratch_epoch_).front().id;
  }
  for (int l = std::min(level, max_level_); l >= 0; --l) {
    auto found =
        search_layer(vec, entry, params_.ef_construction, l, scratch_mark_, scratch_epoch_);
    auto selected = select_neighbors(found, params_.m);
    links_[id][l] = selected;
    for (const auto nb : selected) {
      auto& back = links_[nb][l];
      back.push_back(id);
      if (back.size() > max_links(l)) {
        std::vector<Candidate> pool;
        pool.reserve(back.size());
        for (const auto x : back) pool.push_back({similarity(vector(nb), x), x});
        back = select_neighbors(std::move(pool), max_links(l));
      }
    }
    entry = found.front().id;
  }
  if (level > max_level_) {
    max_level_ = level;
    entry_point_ = id;
  }
  return id;
}

std::vector<Neighbor> HnswGraph::search(std::span<const float> query, std::size_t k,
                                        std::size_t ef,
                                        std::span<const std::uint32_t> tie_rank) const {
  if (query.size() != dim_) throw Error(ErrorCode::kShapeMismatch, "query dim mismatch");
  if (levels_.empty() || k == 0) return {};
  thread_local std::vector<std::uint32_t> marks;
  thread_local std::uint32_t epoch = 0;
  if (marks.size() < levels_.size()) {
    marks.assign(levels_.size(), 0u);
    epoch = 0;
  }
  std::uint32_t entry = entry_point_;
  for (int l = max_level_; l > 0; --l) {
    entry = search_layer(query, entry, 1, l, marks, epoch).front().id;
  }
  auto found = search_layer(query, entry, std::max(ef, k), 0, marks, epoch);
  const auto rank = [&](std::uint32_t id) { return tie_rank.empty() ? id : tie_rank[id]; };
  std::sort(found.begin(), found.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return rank(a.id) < rank(b.id);
  });
  std::vector<Neighbor> out;
  out.reserve(std::min(k, found.size()));
  for (std::size_t i = 0; i < found.size() && i < k; ++i) out.push_back({found[i].id, found[i].sim});
  return out;
}

void HnswGraph::write(std::ostream& out) const {
  detail::write_pod<std::uint64_t>(out, dim_);
  detail::write_pod<std::uint64_t>(out, params_.m);
  detail::write_pod<std::uint64_t>(out, params_.ef_construction);
  detail::write_pod<std::uint64_t>(out, params_.ef_search);
  detail::write_pod<std::uint64_t>(out, params_.seed);
  detail::write_pod<std::uint32_t>(out, entry_point_);
  detail::write_pod<std::int32_t>(out, max_level_);
  detail::write_vector(out, vectors_);
  detail::write_vector(out, levels_);
  for (const auto& node : links_) {
    for (const auto& layer : node) detail::write_vector(out, layer);
  }
}

HnswGraph HnswGraph::read(std::istream& in) {
  const auto dim = detail::read_pod<std::uint64_t>(in);
  HnswParams params;
  params.m = detail::read_pod<std::uint64_t>(in);
  params.ef_construction = detail::read_pod<std::uint64_t>(in);
  params.ef_search = detail::read_pod<std::uint64_t>(in);
  params.seed = detail::read_pod<std::uint64_t>(in);
  HnswGraph g(dim, params);
  g.entry_point_ = detail::read_pod<std::uint32_t>(in);
  g.max_level_ = detail::read_pod<std::int32_t>(in);
  g.vectors_ = detail::read_vector<float>(in);
  g.levels_ = detail::read_vector<int>(in);
  if (g.vectors_.size() != g.levels_.size() * dim) {
    throw Error(ErrorCode::kFormatError, "HNSW vector table size mismatch");
  }
  g.links_.resize(g.levels_.size());
  for (std::size_t i = 0; i < g.levels_.size(); ++i) {
    if (g.levels_[i] < 0 || g.levels_[i] > 64) throw Error(ErrorCode::kFormatError, "bad level");
    g.links_[i].resize(static_cast<std::size_t>(g.levels_[i]) + 1);
    for (auto& layer : g.links_[i]) {
      layer = detail::read_vector<std::uint32_t>(in);
      for (const auto nb : layer) {
        if (nb >= g.levels_.size()) throw Error(ErrorCode::kFormatError, "bad HNSW link");
      }
    }
  }
  if (!g.levels_.empty() && g.entry_point_ >= g.levels_.size()) {
    throw Error(ErrorCode::kFormatError, "bad HNSW entry point");
  }
  g.scratch_mark_.assign(g.levels_.size(), 0u);
  g.scratch_epoch_ = 0;
  return g;
}

bool HnswGraph::operator==(const HnswGraph& other) const {
  return dim_ == other.dim_ && entry_point_ == other.entry_point_ &&
         max_level_ == other.max_level_ && vectors_ == other.vectors_ &&
         levels_ == other.levels_ && links_ == other.links_;
}

std::vector<Neighbor> brute_force_knn(const HnswGraph& graph, std::span<const float> query,
                                      std::size_t k) {
  std::vector<Neighbor> all;
  all.reserve(graph.size());
  for (std::uint32_t id = 0; id < graph.size(); ++id) {
    const auto v = graph.vector(id);
    float dot = 0.0f;
    for (std::size_t i = 0; i < v.size(); ++i) dot += query[i] * v[i];
    all.push_back({id, dot});
  }
  const auto n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.similarity != b.similarity) return a.similarity > b.similarity;
                      return a.id < b.id;
                    });
  all.resize(n);
  return all;
}

KnnIndex::KnnIndex(const Corpus& corpus, std::shared_ptr<const Embedder> embedder,
                   HnswParams params, std::size_t top_k)
    : SearchEndpoint(top_k),
      graph_(embedder ? embedder->dim() : 256, params),
      embedder_(std::move(embedder)) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot index an empty corpus");
  if (!embedder_) embedder_ = std::make_shared<HashedBowEmbedder>(256);
  doc_ids_.reserve(corpus.size());
  for (const auto& doc : corpus.documents()) {
    std::vector<float> v;
    try {
      v = embedder_->embed(doc.text);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyQuery) throw;
      // Term-less documents sit at the origin and never match.
      v.assign(embedder_->dim(), 0.0f);
    }
    graph_.add(v);
    doc_ids_.push_back(doc.doc_id);
  }
  rank_ids();
}

KnnIndex::KnnIndex(std::vector<std::string> doc_ids, HnswGraph graph,
                   std::shared_ptr<const Embedder> embedder, std::size_t top_k)
    : SearchEndpoint(top_k),
      doc_ids_(std::move(doc_ids)),
      graph_(std::move(graph)),
      embedder_(std::move(embedder)) {
  if (doc_ids_.size() != graph_.size()) {
    throw Error(ErrorCode::kFormatError, "doc id table does not match graph size");
  }
  if (embedder_->dim() != graph_.dim()) {
    throw Error(ErrorCode::kShapeMismatch, "embedder dim does not match index dim");
  }
  rank_ids();
}

void KnnIndex::rank_ids() {
  std::vector<std::uint32_t> order(doc_ids_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return doc_ids_[a] < doc_ids_[b]; });
  id_rank_.assign(doc_ids_.size(), 0u);
  for (std::uint32_t r = 0; r < order.size(); ++r) id_rank_[order[r]] = r;
}

std::vector<ScoredDoc> KnnIndex::query(std::string_view text, std::size_t k) const {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::kEmptyQuery, "query text is blank");
  }
  if (embedder_->mode() == EmbeddingMode::kHashedBow && analyze(text).empty()) return {};
  const auto q = embedder_->embed(text);
  const auto hits = graph_.search(q, k, graph_.params().ef_search, id_rank_);
  std::vector<ScoredDoc> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back({doc_ids_[h.id], static_cast<double>(h.similarity)});
  return out;
}

void KnnIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  detail::write_magic(out, "CFIX");
  detail::write_pod<std::uint32_t>(out, kSnapshotVersion);
  detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(BackendKind::kKnn));
  detail::write_pod<std::uint64_t>(out, top_k());
  detail::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(embedder_->mode()));
  detail::write_pod<std::uint64_t>(out, embedder_->dim());
  std::string url;
  if (const auto* ext = dynamic_cast<const ExternalEmbedder*>(embedder_.get())) url = ext->base_url();
  detail::write_string(out, url);
  detail::write_pod<std::uint64_t>(out, doc_ids_.size());
  for (const auto& id : doc_ids_) detail::write_string(out, id);
  graph_.write(out);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace claimforge::searchenv
