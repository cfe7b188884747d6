#include "ranking.hpp"

#include <algorithm>
#include <stdexcept>

namespace dret::rank {

namespace {

void sort_ranked(std::vector<RankedCandidate>& v) {
  std::sort(v.begin(), v.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "CR" || name == "cr") return Method::CR;
  if (name == "AR" || name == "ar") return Method::AR;
  if (name == "CAR" || name == "car") return Method::CAR;
  throw std::invalid_argument("unknown method '" + name + "' (expected CR, AR or CAR)");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::CR: return "CR";
    case Method::AR: return "AR";
    case Method::CAR: return "CAR";
  }
  return "?";
}

const CandidateRecord& CandidateStore::by_id(std::uint64_t id) const {
  if (id >= records.size() || records[id].id != id) {
    throw std::out_of_range("CandidateStore: unknown record id " + std::to_string(id));
  }
  return records[id];
}

CandidateStore build_store(const hred::HredParams& p,
                           const std::vector<corpus::Dialogue>& dialogues) {
  CandidateStore store;
  for (const auto& d : dialogues) {
    if (d.utterances.size() < 2) continue;
    std::vector<Vec> h;
    h.reserve(d.utterances.size());
    for (const auto& u : d.utterances) h.push_back(hred::encode_utterance(p, u.word_ids));
    std::vector<Vec> c = hred::encode_context(p, h);
    for (std::size_t m = 1; m < d.utterances.size(); ++m) {
      CandidateRecord rec;
      rec.id = store.records.size();
      rec.context_embedding = f32_round(c[m - 1]);
      rec.response_embedding = f32_round(h[m]);
      rec.response_text = d.utterances[m].tokens;
      store.records.push_back(std::move(rec));
    }
  }
  if (store.records.empty()) {
    throw std::runtime_error("build_store: empty store (no dialogue has two utterances)");
  }
  return store;
}

lsh::LshForest build_forest(const CandidateStore& store, const lsh::ForestConfig& cfg) {
  if (store.records.empty()) throw std::runtime_error("build_forest: empty store");
  lsh::LshForest forest(store.records.front().context_embedding.size(), cfg);
  for (const auto& rec : store.records) forest.insert(rec.id, rec.context_embedding);
  return forest;
}

std::vector<RankedCandidate> score_cr(const Vec& c_q,
                                      const std::vector<CandidateRecord>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("score_cr: no candidates");
  std::vector<RankedCandidate> out;
  out.reserve(candidates.size());
  for (const auto& cand : candidates) {
    out.push_back({cand.id, cosine(cand.context_embedding, c_q), Method::CR});
  }
  sort_ranked(out);
  return out;
}

std::vector<RankedCandidate> score_ar(const std::vector<CandidateRecord>& candidates,
                                      bool include_self) {
  if (candidates.empty()) throw std::invalid_argument("score_ar: no candidates");
  const double k = static_cast<double>(candidates.size());
  std::vector<RankedCandidate> out;
  out.reserve(candidates.size());
  for (std::size_t x = 0; x < candidates.size(); ++x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!include_self && i == x) continue;
      acc += cosine(candidates[x].response_embedding, candidates[i].response_embedding);
    }
    out.push_back({candidates[x].id, acc / k, Method::AR});
  }
  sort_ranked(out);
  return out;
}

std::vector<RankedCandidate> score_car(const Vec& c_q,
                                       const std::vector<CandidateRecord>& candidates,
                                       std::size_t pool) {
  if (candidates.empty()) throw std::invalid_argument("score_car: no candidates");
  if (pool < 1 || pool > candidates.size()) {
    throw std::invalid_argument("score_car: pool size must satisfy 1 <= n <= k");
  }
  std::vector<RankedCandidate> by_cr = score_cr(c_q, candidates);
  std::vector<const Vec*> pool_responses;
  pool_responses.reserve(pool);
  for (std::size_t i = 0; i < pool; ++i) {
    // by_cr carries store ids; find the matching candidate entry
    for (const auto& cand : candidates) {
      if (cand.id == by_cr[i].id) {
        pool_responses.push_back(&cand.response_embedding);
        break;
      }
    }
  }
  std::vector<RankedCandidate> out;
  out.reserve(candidates.size());
  for (const auto& cand : candidates) {
    double acc = 0.0;
    for (const Vec* r : pool_responses) acc += cosine(cand.response_embedding, *r);
    out.push_back({cand.id, acc / static_cast<double>(pool), Method::CAR});
  }
  sort_ranked(out);
  return out;
}

std::vector<RankedCandidate> retrieve_and_rank(const Vec& c_q, const CandidateStore& store,
                                               const lsh::LshForest& forest,
                                               const RetrieveConfig& cfg) {
  if (cfg.budget < 1) throw std::invalid_argument("retrieve_and_rank: budget must be >= 1");
  std::vector<std::uint64_t> ids = forest.query(c_q, cfg.budget);
  std::vector<CandidateRecord> candidates;
  candidates.reserve(ids.size());
  for (std::uint64_t id : ids) {
    const CandidateRecord& rec = store.by_id(id);
    if (cosine(rec.context_embedding, c_q) >= 1.0 - 1e-9) continue;  // the query itself
    candidates.push_back(rec);
  }
  if (candidates.empty()) return {};
  switch (cfg.method) {
    case Method::CR: return score_cr(c_q, candidates);
    case Method::AR: return score_ar(candidates);
    case Method::CAR:
      return score_car(c_q, candidates, std::min(cfg.car_pool, candidates.size()));
  }
  return {};
}

}  // namespace dret::rank
