#include "claimforge/ingest/planted.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <json.hpp>
#include <set>
#include <spdlog/spdlog.h>
#include <thread>
#include <unordered_set>

#include "claimforge/error.h"
#include "claimforge/lexedit/editor.h"
#include "claimforge/lexedit/tokenizer.h"
#include "claimforge/searchenv/endpoint.h"

namespace claimforge::ingest {

namespace {

// SplitMix64 with multiply-shift bounding: fully specified, so the output
// is byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(((next() >> 32) * static_cast<std::uint64_t>(n)) >> 32);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

 private:
  std::uint64_t state_;
};

const std::vector<std::string> kStopwords = {"the", "a", "of", "in", "on", "to", "and", "with"};

enum class Slot { kStop, kAdj, kNoun, kVerb, kAdv };

const std::vector<std::vector<Slot>> kTemplates = {
    {Slot::kStop, Slot::kAdj, Slot::kNoun, Slot::kVerb, Slot::kStop, Slot::kNoun, Slot::kAdv},
    {Slot::kNoun, Slot::kVerb, Slot::kStop, Slot::kAdj, Slot::kNoun, Slot::kStop, Slot::kNoun},
    {Slot::kStop, Slot::kNoun, Slot::kStop, Slot::kNoun, Slot::kVerb, Slot::kAdj, Slot::kNoun},
    {Slot::kAdj, Slot::kNoun, Slot::kVerb, Slot::kAdv, Slot::kStop, Slot::kAdj, Slot::kNoun},
};

struct Vocabulary {
  std::vector<std::string> nouns, adjs, advs, verbs, distractors;
  std::map<std::string, std::string> substitute;  // clean word -> synonym
  std::map<std::string, std::string> past;        // verb base -> past form
  std::vector<std::string> content;               // nouns, adjs, advs, verbs
};

class WordMaker {
 public:
  explicit WordMaker(Rng& rng) : rng_(&rng) {
    for (const auto& s : kStopwords) used_.insert(s);
  }
  std::string make() {
    static const std::string kC = "bdfgklmnprstvz";
    static const std::string kV = "aeiou";
    for (;;) {
      std::string w;
      const std::size_t syllables = 2 + rng_->below(2);
      for (std::size_t i = 0; i < syllables; ++i) {
        w.push_back(kC[rng_->below(kC.size())]);
        w.push_back(kV[rng_->below(kV.size())]);
      }
      if (rng_->below(2) == 0) w.push_back(kC[rng_->below(kC.size())]);
      if (w.size() >= 2 && w.compare(w.size() - 2, 2, "ed") == 0) continue;
      if (used_.insert(w).second && used_.insert(w + "ed").second) return w;
    }
  }

 private:
  Rng* rng_;
  std::unordered_set<std::string> used_;
};

Vocabulary make_vocabulary(Rng& rng) {
  Vocabulary v;
  WordMaker maker(rng);
  auto fill = [&](std::vector<std::string>& out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(maker.make());
  };
  fill(v.nouns, 220);
  fill(v.adjs, 80);
  fill(v.advs, 30);
  fill(v.verbs, 80);
  fill(v.distractors, 60);
  for (const auto* group : {&v.nouns, &v.adjs}) {
    for (std::size_t i = 0; i < group->size(); i += 2) v.substitute[(*group)[i]] = maker.make();
  }
  for (const auto& b : v.verbs) v.past[b] = b + "ed";
  for (const auto* group : {&v.nouns, &v.adjs, &v.advs, &v.verbs}) {
    v.content.insert(v.content.end(), group->begin(), group->end());
  }
  return v;
}

lexedit::Lexicon make_lexicon(const Vocabulary& v) {
  lexedit::Lexicon lex;
  for (const auto& s : kStopwords) lex.add_pos(s, lexedit::PosCategory::kStopWord);
  for (const auto& w : v.nouns) lex.add_pos(w, lexedit::PosCategory::kNoun);
  for (const auto& w : v.adjs) lex.add_pos(w, lexedit::PosCategory::kAdjective);
  for (const auto& w : v.advs) lex.add_pos(w, lexedit::PosCategory::kAdverb);
  for (const auto& w : v.verbs) lex.add_pos(w, lexedit::PosCategory::kVerb);
  for (const auto& [word, sub] : v.substitute) {
    lex.add_pos(sub, lex.category(word));
    lex.add_synonyms(word, {sub});
    lex.add_synonyms(sub, {word});
  }
  for (const auto& [base, past] : v.past) lex.add_verb_form(past, base);
  return lex;
}

std::string join(const std::vector<std::string>& words) { return lexedit::detokenize(words); }

bool claim_has(const std::vector<std::string>& claim, const std::string& word) {
  return std::find(claim.begin(), claim.end(), word) != claim.end();
}

std::string pad_id(std::size_t i, int width) {
  auto s = std::to_string(i);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

}  // namespace

AnswerKeyEntry exhaustive_best(const lexedit::TokenizedClaim& claim,
                               const lexedit::Lexicon& lexicon, const StateReward& reward,
                               int depth) {
  AnswerKeyEntry e;
  e.claim_id = claim.claim_id();
  e.original_reward = reward(claim);
  e.best_reward = e.original_reward;
  if (e.best_reward >= 1.0) return e;
  struct Node {
    lexedit::TokenizedClaim claim;
    std::vector<int> path;
  };
  std::unordered_set<std::string> seen{claim.text()};
  std::vector<Node> frontier{{claim, {}}};
  for (int d = 1; d <= depth && !frontier.empty(); ++d) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (const auto action : lexedit::legal_actions(node.claim, lexicon)) {
        auto child = lexedit::apply_action(node.claim, action, lexicon);
        if (!seen.insert(child.text()).second) continue;
        Node n{std::move(child), node.path};
        n.path.push_back(lexedit::flatten_action(action));
        const double r = reward(n.claim);
        if (r > e.best_reward) {
          e.best_reward = r;
          e.best_actions = n.path;
        }
        next.push_back(std::move(n));
      }
    }
    if (e.best_reward >= 1.0) break;
    frontier = std::move(next);
  }
  return e;
}

std::vector<AnswerKeyEntry> compute_answer_key(std::span<const lexedit::TokenizedClaim> claims,
                                               const lexedit::Lexicon& lexicon,
                                               const searchenv::Scorer& scorer, int depth,
                                               unsigned threads) {
  std::vector<AnswerKeyEntry> out(claims.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < claims.size(); i = next++) {
      out[i] = exhaustive_best(claims[i], lexicon, scorer, depth);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  return out;
}

PlantedBenchmark make_planted_benchmark(const PlantedConfig& cfg) {
  if (cfg.n_claims < 1) throw Error(ErrorCode::kInvalidArgument, "n_claims must be >= 1");
  if (cfg.min_corruptions < 1 || cfg.max_corruptions < cfg.min_corruptions) {
    throw Error(ErrorCode::kInvalidArgument, "bad corruption range");
  }
  Rng rng(cfg.seed);
  Rng evidence_rng(cfg.seed ^ 0x65766964656e6365ULL);
  const Vocabulary vocab = make_vocabulary(rng);
  PlantedBenchmark bench;
  bench.lexicon = make_lexicon(vocab);
  auto& corpus = bench.data.corpus;

  for (std::size_t i = 0; i < cfg.n_claims; ++i) {
    const std::string id = "pc-" + pad_id(i, 5);
    const auto& tmpl = kTemplates[rng.below(kTemplates.size())];
    std::vector<std::string> clean;
    std::vector<std::size_t> content_pos;
    std::set<std::string> used;
    std::size_t verb_pos = 0;
    for (const auto slot : tmpl) {
      const std::vector<std::string>* pool = nullptr;
      switch (slot) {
        case Slot::kStop: clean.push_back(rng.pick(kStopwords)); continue;
        case Slot::kAdj: pool = &vocab.adjs; break;
        case Slot::kNoun: pool = &vocab.nouns; break;
        case Slot::kVerb: pool = &vocab.verbs; verb_pos = clean.size(); break;
        case Slot::kAdv: pool = &vocab.advs; break;
      }
      std::string w;
      do { w = rng.pick(*pool); } while (!used.insert(w).second);
      content_pos.push_back(clean.size());
      clean.push_back(std::move(w));
    }

    std::vector<std::string> claim = clean;
    std::vector<std::string> tokens_added;  // corruption tokens
    std::vector<std::size_t> distractor_slots;
    const int n_corrupt =
        cfg.min_corruptions + static_cast<int>(rng.below(cfg.max_corruptions - cfg.min_corruptions + 1));
    bool verb_done = false;
    std::set<std::size_t> swapped;
    std::size_t n_distractors = 0;
    for (int c = 0; c < n_corrupt; ++c) {
      const double u = rng.unit();
      if (u < 0.2 && !verb_done) {
        verb_done = true;
        claim[verb_pos] = vocab.past.at(clean[verb_pos]);
        tokens_added.push_back(claim[verb_pos]);
        continue;
      }
      if (u < 0.5) {
        std::vector<std::size_t> options;
        for (auto p : content_pos) {
          if (vocab.substitute.count(clean[p]) && !swapped.count(p)) options.push_back(p);
        }
        if (!options.empty()) {
          const auto p = rng.pick(options);
          swapped.insert(p);
          claim[p] = vocab.substitute.at(clean[p]);
          tokens_added.push_back(claim[p]);
          continue;
        }
      }
      ++n_distractors;
    }
    for (std::size_t k = 0; k < n_distractors; ++k) {
      std::string d;
      do { d = rng.pick(vocab.distractors); } while (std::find(tokens_added.begin(), tokens_added.end(), d) != tokens_added.end());
      const auto at = rng.below(claim.size() + 1);
      claim.insert(claim.begin() + static_cast<std::ptrdiff_t>(at), d);
      tokens_added.push_back(d);
    }

    const std::string rel_id = "pd-" + pad_id(i, 5);
    corpus.add_document(rel_id, join(clean));
    std::vector<std::string> content;
    for (auto p : content_pos) content.push_back(clean[p]);
    std::size_t miss = rng.below(content.size());
    for (std::size_t t = 0; t < tokens_added.size(); ++t) {
      for (int copy = 0; copy < 2; ++copy) {
        std::vector<std::string> words;
        for (std::size_t c = 0; c < content.size(); ++c) {
          if (c != miss) words.push_back(content[c]);
        }
        miss = (miss + 1) % content.size();
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), tokens_added[t]);
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), rng.pick(kStopwords));
        corpus.add_document(rel_id + "-x" + std::to_string(2 * t + copy), join(words));
      }
    }
    for (std::size_t c = 0; c < content.size(); ++c) {
      std::vector<std::string> words;
      for (std::size_t o = 0; o < content.size(); ++o) {
        if (o != c) words.push_back(content[o]);
      }
      corpus.add_document(rel_id + "-m" + std::to_string(c), join(words));
    }

    ClaimRecord rec;
    rec.claim_id = id;
    rec.claim = join(claim);
    rec.relevant_doc_ids = {rel_id};
    if (cfg.evidence_docs) {
      std::vector<std::string> words;
      std::vector<std::string> intact;
      for (auto p : content_pos) {
        if (claim_has(claim, clean[p])) {
          intact.push_back(clean[p]);
        } else {
          words.push_back(clean[p]);
        }
      }
      if (!intact.empty()) words.push_back(evidence_rng.pick(intact));
      while (words.size() < 6) {
        const auto& w = evidence_rng.pick(vocab.content);
        if (!used.count(w)) words.push_back(w);
      }
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(evidence_rng.below(words.size() + 1)),
                   evidence_rng.pick(kStopwords));
      for (std::size_t k = words.size(); k > 1; --k) std::swap(words[k - 1], words[evidence_rng.below(k)]);
      corpus.add_document(rel_id + "-e", join(words));
      rec.relevant_doc_ids.push_back(rel_id + "-e");
    }
    rec.label = rng.below(2) == 0 ? "supports" : "refutes";
    corpus.set_relevant(id, rec.relevant_doc_ids);
    bench.data.claims.push_back(std::move(rec));
  }

  for (std::size_t b = 0; b < cfg.background_docs; ++b) {
    const std::size_t len = 6 + rng.below(7);
    std::vector<std::string> words;
    for (std::size_t k = 0; k < len; ++k) {
      words.push_back(rng.below(10) < 3 ? rng.pick(kStopwords) : rng.pick(vocab.content));
    }
    corpus.add_document("bg-" + pad_id(b, 5), join(words));
  }

  if (cfg.answer_key) {
    const auto index = searchenv::build_index(corpus, searchenv::BackendKind::kBm25);
    const searchenv::Scorer scorer(*index, corpus, cfg.answer_spec);
    const auto claims = tokenize_claims(bench.data.claims, bench.lexicon);
    bench.answer_key = compute_answer_key(claims, bench.lexicon, scorer, cfg.answer_depth, cfg.threads);
  }
  spdlog::info("planted benchmark: {} claims, {} documents", bench.data.claims.size(), corpus.size());
  return bench;
}

void save_answer_key(const std::filesystem::path& path, std::span<const AnswerKeyEntry> key) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (const auto& e : key) {
    out << nlohmann::ordered_json{{"claim_id", e.claim_id},
                          {"original_reward", e.original_reward},
                          {"best_reward", e.best_reward},
                          {"best_actions", e.best_actions}}
               .dump()
        << '\n';
  }
}

std::vector<AnswerKeyEntry> load_answer_key(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<AnswerKeyEntry> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back(AnswerKeyEntry{j.at("claim_id").get<std::string>(),
                                   j.at("original_reward").get<double>(),
                                   j.at("best_reward").get<double>(),
                                   j.at("best_actions").get<std::vector<int>>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, "answer key line " + std::to_string(n) + ": " + e.what(), n);
    }
  }
  return out;
}

void write_planted_benchmark(const std::filesystem::path& dir, const PlantedBenchmark& bench,
                             std::size_t dev_claims) {
  std::filesystem::create_directories(dir);
  save_corpus(dir / "corpus.jsonl", bench.data.corpus);
  save_claims(dir / "claims.jsonl", bench.data.claims);
  save_answer_key(dir / "answer_key.jsonl", bench.answer_key);
  bench.lexicon.save(dir / "lexicon");
  if (dev_claims > 0) {
    const auto& all = bench.data.claims;
    const auto split = all.size() - std::min(dev_claims, all.size());
    save_claims(dir / "claims_train.jsonl", std::span(all).first(split));
    save_claims(dir / "claims_dev.jsonl", std::span(all).subspan(split));
  }
}

}  // namespace claimforge::ingest
